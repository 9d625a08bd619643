"""
Genericity checks and characteristic roots of the top-grade symbol
"""
import cmath
import logging
import functools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from algebra.ncpoly import NCPolynomial, homogeneous_part, symbol_coefficients, to_complex
from config import config as default_config, HsolvConfig
from utils.errors import (NonGenericError, RootDisagreementError, RootFinderError,
                          ValidationError)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenericityReport:
    is_generic: bool
    monic_defect: complex
    min_root_gap: float
    roots: Tuple[complex, ...]
    reasons: Tuple[str, ...] = field(default_factory=tuple)

    def to_record(self) -> dict:
        return {
            'is_generic': self.is_generic,
            'monic_defect': [self.monic_defect.real, self.monic_defect.imag],
            'min_root_gap': self.min_root_gap,
            'roots': [[z.real, z.imag] for z in self.roots],
            'reasons': list(self.reasons),
        }


def companion_roots(coeffs_low_first: Sequence[complex]) -> np.ndarray:
    """Eigenvalues of the companion matrix of a monic polynomial"""
    c = np.asarray(coeffs_low_first, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    matrix = np.zeros((n, n), dtype=complex)
    matrix[1:, :-1] = np.eye(n - 1)
    matrix[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(matrix)


def aberth_roots(coeffs_low_first: Sequence[complex], tol: float = 1e-14,
                 max_iter: int = 500) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration, seeded on a circle of radius 1 + max|c_k/c_n|"""
    c = np.asarray(coeffs_low_first, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    c = c / c[-1]
    p = np.polynomial.Polynomial(c)
    dp = p.deriv()
    magnitude = np.polynomial.Polynomial(np.abs(c))
    radius = 1.0 + np.max(np.abs(c[:-1]))
    # offset keeps real polynomials from trapping seeds on the real axis
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    active = np.ones(n, dtype=bool)
    eps = np.finfo(float).eps

    for iteration in range(max_iter):
        pz = p(z)
        # a root is done once |p(z)| sits at the rounding level of the evaluation
        active &= np.abs(pz) > 16 * eps * magnitude(np.abs(z))
        if not active.any():
            logger.debug(f"🔁 Aberth converged after {iteration} iterations")
            return z
        dpz = dp(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        repulsion = (1.0 / diff).sum(axis=1) - 1.0  # drop the diagonal's 1/1
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = pz / dpz
            delta = ratio / (1.0 - ratio * repulsion)
        delta = np.where(active & np.isfinite(delta), delta, 0.0)
        z = z - delta
        small = np.abs(delta) <= tol * np.maximum(1.0, np.abs(z))
        active &= ~small
        if not active.any():
            logger.debug(f"🔁 Aberth converged after {iteration + 1} iterations")
            return z
    raise RootFinderError(f"Aberth iteration did not converge in {max_iter} steps (degree {n})")


def _tie_tolerance(roots: Sequence[complex]) -> float:
    return 1e-12 * (1.0 + max((abs(z) for z in roots), default=0.0))


def order_roots(roots: Sequence[complex], gap_tol: Optional[float] = None
                ) -> Tuple[Tuple[complex, ...], Tuple[int, ...]]:
    """Descending real part, ties broken by descending imaginary part.

    Returns (ordered, permutation) with ordered[i] == roots[permutation[i]].
    """
    gap_tol = default_config.ROOT_GAP_TOL if gap_tol is None else gap_tol
    values = [complex(z) for z in roots]
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= gap_tol:
                raise ValidationError(f"duplicate roots {values[i]} and {values[j]}")
    tie = _tie_tolerance(values)

    def compare(a: int, b: int) -> int:
        za, zb = values[a], values[b]
        if abs(za.real - zb.real) > tie:
            return -1 if za.real > zb.real else 1
        return -1 if za.imag > zb.imag else 1

    permutation = tuple(sorted(range(len(values)), key=functools.cmp_to_key(compare)))
    return tuple(values[i] for i in permutation), permutation


def min_gap(roots: Sequence[complex]) -> float:
    values = list(roots)
    if len(values) < 2:
        return float('inf')
    return min(abs(values[i] - values[j])
               for i in range(len(values)) for j in range(i + 1, len(values)))


def root_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy nearest matching; returns the largest relative mismatch"""
    remaining = list(b)
    worst = 0.0
    for z in a:
        idx = int(np.argmin([abs(z - w) for w in remaining]))
        w = remaining.pop(idx)
        worst = max(worst, abs(z - w) / max(1.0, abs(z)))
    return worst


def roots_of_symbol(coeffs_low_first: Sequence[complex], cfg: HsolvConfig = None) -> Tuple[complex, ...]:
    """Cross-validated roots of a monic polynomial (Aberth vs companion eigenvalues), ordered"""
    cfg = cfg or default_config
    primary = aberth_roots(coeffs_low_first, max_iter=cfg.ROOT_MAX_ITER)
    check = companion_roots(coeffs_low_first)
    mismatch = root_mismatch(primary, check)
    if mismatch > cfg.ROOT_AGREEMENT_TOL:
        raise RootDisagreementError(
            f"root methods disagree by {mismatch:.3e} (tolerance {cfg.ROOT_AGREEMENT_TOL:.1e})")
    gap = min_gap(primary)
    if gap <= cfg.ROOT_GAP_TOL:
        raise NonGenericError(f"repeated characteristic roots (min gap {gap:.3e})")
    ordered, _ = order_roots(primary, cfg.ROOT_GAP_TOL)
    return ordered


def characteristic_roots(P_n: NCPolynomial, cfg: HsolvConfig = None) -> Tuple[complex, ...]:
    """Roots of z -> P_n(iz, 1), computed twice and cross-validated, in canonical order"""
    cfg = cfg or default_config
    n = P_n.degree
    if n < 1:
        raise ValidationError("characteristic roots need a polynomial of degree >= 1")
    top = homogeneous_part(P_n, n)
    coeffs = [to_complex(c) for c in symbol_coefficients(top, 1)]
    if abs(coeffs[-1]) <= cfg.MONIC_TOL:
        raise NonGenericError("top-grade symbol has vanishing leading coefficient")
    roots = roots_of_symbol(coeffs, cfg)
    logger.info(f"🌱 Characteristic roots: {', '.join(f'{z:.6g}' for z in roots)}")
    return roots


def check_generic(P: NCPolynomial, tol: float = None, cfg: HsolvConfig = None) -> GenericityReport:
    """Monic normalization P_n(iz,0) = z^n plus distinct characteristic roots"""
    cfg = cfg or default_config
    tol = cfg.MONIC_TOL if tol is None else tol
    n = P.degree
    if n < 2:
        raise ValidationError(f"genericity needs degree >= 2, got {n}")
    top = homogeneous_part(P, n)
    at_zero = [to_complex(c) for c in symbol_coefficients(top, 0)]
    monic_defect = at_zero[n] - 1.0
    reasons: List[str] = []
    if abs(monic_defect) > tol:
        reasons.append(f"P_n(iz,0) has leading coefficient {at_zero[n]:.6g}, not 1")
    lower = max((abs(c) for c in at_zero[:n]), default=0.0)
    if lower > tol:
        reasons.append("P_n(iz,0) has nonzero coefficients below z^n")

    roots: Tuple[complex, ...] = ()
    gap = 0.0
    at_one = [to_complex(c) for c in symbol_coefficients(top, 1)]
    if abs(at_one[n]) > tol:
        raw = aberth_roots(at_one, max_iter=cfg.ROOT_MAX_ITER)
        gap = min_gap(raw)
        if gap > cfg.ROOT_GAP_TOL:
            roots, _ = order_roots(raw, cfg.ROOT_GAP_TOL)
        else:
            roots = tuple(complex(z) for z in raw)
            reasons.append(f"repeated characteristic roots (min gap {gap:.3e})")
    else:
        reasons.append("P_n(iz,1) is not of full degree")

    report = GenericityReport(
        is_generic=not reasons,
        monic_defect=complex(monic_defect),
        min_root_gap=float(gap),
        roots=roots,
        reasons=tuple(reasons),
    )
    if report.is_generic:
        logger.info(f"✅ Operator is generic of degree {n}, min root gap {gap:.3g}")
    else:
        logger.warning(f"⚠️ Operator is not generic: {'; '.join(reasons)}")
    return report


def rotate_roots(roots: Sequence[complex], angle: float) -> Tuple[complex, ...]:
    """Roots multiplied by e^{2i angle}, reordered"""
    factor = cmath.exp(2j * angle)
    ordered, _ = order_roots([z * factor for z in roots])
    return ordered
