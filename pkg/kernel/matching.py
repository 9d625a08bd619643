"""
Schwartz matching at t = 0, γ-scans and transition matrices between the half-lines
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import joblib
import numpy as np
import pandas as pd
from scipy import stats

from algebra.ncpoly import NCPolynomial
from asymptotics.gauge import Gamma
from config import config as default_config, HsolvConfig
from kernel.basis import BasisJet, basis_from_table, canonical_basis, transport_to_origin
from realization.coefficients import coefficient_table
from realization.ode_realization import adjoint_parameter, formal_adjoint, realize
from utils.errors import (DecayClassificationError, NumericalFailure, ValidationError,
                          WronskianCollapseError)

logger = logging.getLogger(__name__)


def _encode(z) -> Optional[List[float]]:
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def decaying_indices(roots: Sequence[complex], threshold: float) -> Tuple[int, ...]:
    """Indices with Re γ_j < -threshold; any |Re γ_j| ≤ threshold is undecidable"""
    values = [complex(z) for z in roots]
    undecided = [z for z in values if abs(z.real) <= threshold]
    if undecided:
        raise DecayClassificationError(
            f"roots {', '.join(f'{z:.6g}' for z in undecided)} have |Re| ≤ {threshold:g}")
    return tuple(i for i, z in enumerate(values) if z.real < -threshold)


@dataclass(frozen=True, eq=False)
class MatchReport:
    p: int
    q: int
    matrix: np.ndarray            # n × (p+q), orthonormal blocks [Q⁺ | Q⁻] at t = 0
    sigma_min: float
    gamma_param: Gamma
    sign: int
    singular_values: np.ndarray
    dimension_forced: bool = False

    def to_record(self) -> Dict[str, Any]:
        return {
            'gamma': _encode(self.gamma_param),
            'sign': self.sign,
            'p': self.p,
            'q': self.q,
            'sigma_min': self.sigma_min,
            'singular_values': [float(v) for v in self.singular_values],
            'dimension_forced': self.dimension_forced,
        }


def schwartz_match(P: NCPolynomial, sign: int, gamma: Gamma, tol: float = None,
                   cfg: HsolvConfig = None, window=None) -> MatchReport:
    """Smallest singular value of the adjoint solutions decaying at +∞ and at -∞, matched at t = 0"""
    cfg = cfg or default_config
    tol = cfg.SIGMA_TOL if tol is None else tol
    R = formal_adjoint(realize(P, sign))
    table = coefficient_table(R, cfg)
    param = None if gamma is None else adjoint_parameter(gamma)
    decaying = decaying_indices(table.roots, cfg.DECAY_RE_THRESHOLD)
    n, p = table.n, len(decaying)

    blocks = []
    for side in (1, -1):
        if not p:
            break
        basis = basis_from_table(R, table, param, window, cfg, side=side, indices=decaying)
        blocks.append(transport_to_origin(basis, cfg).Q)
    q = p
    if p + q == 0:
        matrix = np.zeros((n, 0), dtype=complex)
        singular = np.zeros(0)
        sigma_min = 1.0
    else:
        matrix = np.hstack(blocks)
        singular = np.linalg.svd(matrix, compute_uv=False)
        sigma_min = 0.0 if p + q > n else float(np.min(singular))
    report = MatchReport(p=p, q=q, matrix=matrix, sigma_min=sigma_min, gamma_param=gamma,
                         sign=sign, singular_values=singular, dimension_forced=p + q > n)
    verdict = "candidate" if sigma_min < tol else "empty"
    logger.debug(f"🎯 Schwartz match γ={gamma}, sign {sign:+d}: p={p}, q={q}, "
                 f"σ_min={sigma_min:.3e} ({verdict})")
    return report


@dataclass(frozen=True)
class ScanPoint:
    gamma: float
    sigma_min: float
    p: int
    q: int
    error: Optional[str] = None


@dataclass
class ScanResult:
    sign: int
    tol: float
    points: List[ScanPoint] = field(default_factory=list)
    dip_counts: List[int] = field(default_factory=list)
    limit_point: bool = False

    @property
    def dips(self) -> List[ScanPoint]:
        return [pt for pt in self.points if pt.sigma_min < self.tol]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            'gamma': pt.gamma, 'sigma_min': pt.sigma_min, 'p': pt.p, 'q': pt.q,
        } for pt in self.points], columns=['gamma', 'sigma_min', 'p', 'q'])

    def to_record(self) -> Dict[str, Any]:
        return {
            'sign': self.sign,
            'tol': self.tol,
            'limit_point': self.limit_point,
            'dip_counts': list(self.dip_counts),
            'points': [{'gamma': pt.gamma, 'sigma_min': pt.sigma_min, 'p': pt.p, 'q': pt.q,
                        'error': pt.error} for pt in self.points],
        }


def _refinement(points: List[ScanPoint], tol: float, factor: int) -> List[float]:
    """New γ values around dips and near-dip local minima"""
    gammas = [pt.gamma for pt in points]
    sigmas = [pt.sigma_min for pt in points]
    centers = []
    for i, sigma in enumerate(sigmas):
        if not np.isfinite(sigma):
            continue
        if sigma < tol:
            centers.append(i)
        elif 0 < i < len(sigmas) - 1 and sigma < sigmas[i - 1] and sigma < sigmas[i + 1] \
                and sigma < 1e3 * tol:
            centers.append(i)
    known = {round(g, 12) for g in gammas}
    fresh = set()
    for i in centers:
        lo, hi = gammas[max(i - 1, 0)], gammas[min(i + 1, len(gammas) - 1)]
        for g in np.linspace(lo, hi, 2 * factor + 1)[1:-1]:
            if round(float(g), 12) not in known:
                fresh.add(round(float(g), 12))
    return sorted(fresh)


def gamma_scan(P: NCPolynomial, sign: int, interval: Tuple[float, float] = None,
               grid_size: int = None, tol: float = None, cfg: HsolvConfig = None,
               window=None) -> ScanResult:
    """σ_min over a γ-grid with local refinement; flags dips that multiply under refinement"""
    cfg = cfg or default_config
    scan = cfg.get_scan_config()
    lo, hi = interval if interval is not None else scan['interval']
    grid_size = scan['grid_size'] if grid_size is None else grid_size
    tol = scan['tol'] if tol is None else tol
    if not 0 < lo < hi:
        raise ValidationError(f"scan interval needs 0 < lo < hi, got ({lo}, {hi})")
    if lo < cfg.GAMMA_MIN:
        raise ValidationError(f"scan interval starts below γ₀ = {cfg.GAMMA_MIN}")
    if grid_size < 2:
        raise ValidationError("scan needs at least two grid points")

    def evaluate(gamma: float) -> ScanPoint:
        try:
            report = schwartz_match(P, sign, gamma, tol, cfg, window)
            return ScanPoint(float(gamma), report.sigma_min, report.p, report.q)
        except NumericalFailure as e:
            logger.warning(f"⚠️ Scan point γ={gamma:g} failed: {e}")
            return ScanPoint(float(gamma), float('nan'), 0, 0, str(e))

    def evaluate_all(gammas: Sequence[float]) -> List[ScanPoint]:
        if scan['workers'] > 1 and len(gammas) > 1:
            return joblib.Parallel(n_jobs=scan['workers'], prefer="threads")(
                joblib.delayed(evaluate)(g) for g in gammas)
        return [evaluate(g) for g in gammas]

    result = ScanResult(sign=sign, tol=tol)
    result.points = evaluate_all([float(g) for g in np.linspace(lo, hi, grid_size)])
    result.dip_counts.append(len(result.dips))
    every_point_dips = len(result.dips) == len(result.points)

    if not every_point_dips:
        for _ in range(scan['refine_rounds']):
            fresh = _refinement(result.points, tol, scan['refine_factor'])
            if not fresh:
                break
            result.points = sorted(result.points + evaluate_all(fresh), key=lambda pt: pt.gamma)
            result.dip_counts.append(len(result.dips))

    growing = any(b > a for a, b in zip(result.dip_counts, result.dip_counts[1:]))
    confirmed = any(pt.sigma_min < scan['confirm_tol'] for pt in result.dips)
    result.limit_point = bool(result.dips) and (every_point_dips or growing) and confirmed
    logger.info(f"🔭 γ-scan sign {sign:+d} on [{lo:g}, {hi:g}]: {len(result.points)} points, "
                f"dips {result.dip_counts}, limit point {'yes' if result.limit_point else 'no'}")
    return result


@dataclass(frozen=True, eq=False)
class TransitionReport:
    matrix: np.ndarray            # ψ⁻_l = Σ_k A_lk ψ⁺_k
    block_pattern: List[List[int]]
    residual: float
    condition: float
    gamma_param: Gamma

    def to_record(self) -> Dict[str, Any]:
        return {
            'gamma': _encode(self.gamma_param),
            'matrix': [[_encode(v) for v in row] for row in self.matrix],
            'block_pattern': self.block_pattern,
            'residual': self.residual,
            'condition': self.condition,
        }


def transition_matrix(basis_plus: BasisJet, basis_minus: BasisJet, cfg: HsolvConfig = None,
                      block_tol: float = 1e-8) -> TransitionReport:
    """A(γ) from the t = 0 jets: J⁻ = J⁺ Aᵀ"""
    cfg = cfg or default_config
    n = basis_plus.n
    if basis_minus.n != n or len(basis_plus.indices) != n or len(basis_minus.indices) != n:
        raise ValidationError("transition matrices need two complete bases of the same order")
    same_gamma = (basis_plus.gamma_param is None and basis_minus.gamma_param is None) or (
        basis_plus.gamma_param is not None and basis_minus.gamma_param is not None
        and abs(complex(basis_plus.gamma_param) - complex(basis_minus.gamma_param)) <= 1e-12)
    if not same_gamma or basis_plus.sign != basis_minus.sign:
        raise ValidationError("both bases must belong to the same operator and γ")
    J_plus = transport_to_origin(basis_plus, cfg).raw()
    J_minus = transport_to_origin(basis_minus, cfg).raw()
    try:
        A_T = np.linalg.solve(J_plus, J_minus)
    except np.linalg.LinAlgError as e:
        raise WronskianCollapseError(f"jet matrix at t = 0 is singular: {e}") from e
    A = A_T.T
    residual = float(np.linalg.norm(J_minus - J_plus @ A_T) / np.linalg.norm(J_minus))
    peak = float(np.max(np.abs(A)))
    pattern = [[int(abs(v) > block_tol * peak) for v in row] for row in A]
    report = TransitionReport(matrix=A, block_pattern=pattern, residual=residual,
                              condition=float(np.linalg.cond(J_plus)),
                              gamma_param=basis_plus.gamma_param)
    logger.debug(f"🔀 Transition matrix at γ={basis_plus.gamma_param}: residual {residual:.2e}, "
                 f"cond {report.condition:.2e}")
    return report


def degenerate_rows(gammas: Sequence[float], matrices: Sequence[np.ndarray], columns: Sequence[int],
                    threshold: float = None) -> List[Dict[str, Any]]:
    """Geometric-decay fit of log max_{k ∈ columns} |A_rk| along the γ-sequence, per row r"""
    threshold = default_config.DECAY_RE_THRESHOLD if threshold is None else threshold
    gammas = np.asarray(gammas, dtype=float)
    if len(gammas) != len(matrices) or len(gammas) < 3:
        raise ValidationError("degenerate-row fits need at least three matrices, one per γ")
    columns = list(columns)
    rows = []
    for r in range(matrices[0].shape[0]):
        if not columns:
            rows.append({'row': r, 'slope': 0.0, 'r_squared': 0.0, 'degenerate': False})
            continue
        peak = np.array([np.max(np.abs(A[r, columns])) for A in matrices])
        fit = stats.linregress(gammas, np.log(np.maximum(peak, 1e-300)))
        r_squared = float(fit.rvalue ** 2)
        rows.append({
            'row': r,
            'slope': float(fit.slope),
            'r_squared': r_squared,
            'degenerate': bool(fit.slope < -threshold and r_squared > 0.9),
        })
    return rows


@dataclass(frozen=True, eq=False)
class TransitionScan:
    gammas: np.ndarray
    reports: List[TransitionReport]
    rows: List[Dict[str, Any]]


def transition_scan(P: NCPolynomial, sign: int, gammas: Sequence[float], window=None,
                    cfg: HsolvConfig = None) -> TransitionScan:
    """Transition matrices along a γ-sequence with the degenerate-row report"""
    cfg = cfg or default_config
    reports = []
    columns: Tuple[int, ...] = ()
    for gamma in gammas:
        plus = canonical_basis(P, sign, gamma, window, cfg, side=1)
        minus = canonical_basis(P, sign, gamma, window, cfg, side=-1)
        columns = decaying_indices(plus.frame.roots, cfg.DECAY_RE_THRESHOLD)
        reports.append(transition_matrix(plus, minus, cfg))
    rows = degenerate_rows(gammas, [r.matrix for r in reports], columns)
    flagged = [r['row'] for r in rows if r['degenerate']]
    logger.info(f"🧾 Transition scan over {len(reports)} γ values, degenerate rows: {flagged or 'none'}")
    return TransitionScan(gammas=np.asarray(gammas, dtype=float), reports=reports, rows=rows)
