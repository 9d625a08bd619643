"""
Integral-bound harness and envelope estimates for canonical bases

The harness checks, with quadrature on scaled integrands,

    ∫₀^t e^{γs²+αs}(1+s)^a ds  ≲ e^{γt²+αt}(1+t)^{a+1}
    ∫_t^∞ e^{-γs²+αs}(1+s)^a ds ≲ e^{-γt²+αt}(1+t)^a
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from algebra.ncpoly import NCPolynomial
from config import config as default_config, HsolvConfig
from kernel.basis import BasisJet, canonical_basis
from realization.coefficients import CompanionMatrix
from utils.errors import QuadratureError, ValidationError

logger = logging.getLogger(__name__)


def _quad(f, lo: float, hi: float, points=None) -> float:
    value, _ = integrate.quad(f, lo, hi, points=points, limit=200)
    if not math.isfinite(value):
        raise QuadratureError(f"quadrature on [{lo:g}, {hi:g}] returned {value}")
    return value


def growth_ratio(gamma: float, alpha: float, a: float, t: float) -> float:
    if t == 0:
        return 0.0
    tail = 1.0 + t

    def f(s):
        return math.exp(gamma * (s * s - t * t) + alpha * (s - t)) * ((1.0 + s) / tail) ** a / tail

    width = min(t, 10.0 / (gamma * t + abs(alpha) + 1.0))
    return _quad(f, 0.0, t - width) + _quad(f, t - width, t) if width < t else _quad(f, 0.0, t)


def decay_ratio(gamma: float, alpha: float, a: float, t: float) -> float:
    tail = 1.0 + t

    def f(s):
        return math.exp(-gamma * (s * s - t * t) + alpha * (s - t)) * ((1.0 + s) / tail) ** a

    peak = max(t, alpha / (2 * gamma))
    head = _quad(f, t, peak) if peak > t else 0.0
    return head + _quad(f, peak, np.inf)


@dataclass
class BoundReport:
    gamma: float
    alpha: float
    a: float
    t_max: float
    growth_sup: float
    decay_sup: float
    cauchy_defect: float                  # relative change of the growth sup from 3/4 t_max to t_max
    sweep: List[Dict[str, float]] = field(default_factory=list)
    sweep_sup: float = 0.0
    sweep_factor: float = 1.0

    @property
    def finite(self) -> bool:
        values = [self.growth_sup, self.decay_sup, self.sweep_sup]
        return all(math.isfinite(v) for v in values)

    def to_record(self) -> Dict[str, Any]:
        return {
            'gamma': self.gamma, 'alpha': self.alpha, 'a': self.a, 't_max': self.t_max,
            'growth_sup': self.growth_sup, 'decay_sup': self.decay_sup,
            'cauchy_defect': self.cauchy_defect, 'sweep_sup': self.sweep_sup,
            'sweep_factor': self.sweep_factor, 'sweep': self.sweep,
        }


def _sups(gamma: float, alpha: float, a: float, grid: np.ndarray, split: int):
    growth = np.array([growth_ratio(gamma, alpha, a, t) for t in grid])
    decay = np.array([decay_ratio(gamma, alpha, a, t) for t in grid])
    return float(np.max(growth)), float(np.max(decay)), float(np.max(growth[:split + 1]))


def integral_bound_harness(gamma: float, alpha: float, a: float, t_max: float = None,
                           alpha0: float = None, cfg: HsolvConfig = None) -> BoundReport:
    """Sup-ratios of both integral bounds on a nested grid, plus the α-sweep over [-α₀, α₀]"""
    cfg = cfg or default_config
    est = cfg.get_estimates_config()
    t_max = est['t_max'] if t_max is None else t_max
    alpha0 = est['alpha0'] if alpha0 is None else alpha0
    if gamma <= 0 or a < 0:
        raise ValidationError(f"harness needs γ > 0 and a ≥ 0, got γ={gamma}, a={a}")
    if abs(alpha) > alpha0:
        raise ValidationError(f"|α| = {abs(alpha)} exceeds α₀ = {alpha0}")
    step = est['grid_step']
    grid = np.arange(0.0, t_max + step / 2, step)
    split = int(np.searchsorted(grid, 0.75 * t_max, side='right')) - 1

    growth_sup, decay_sup, early = _sups(gamma, alpha, a, grid, split)
    report = BoundReport(gamma=gamma, alpha=alpha, a=a, t_max=t_max, growth_sup=growth_sup,
                         decay_sup=decay_sup,
                         cauchy_defect=abs(growth_sup - early) / max(growth_sup, 1e-300))
    for value in np.linspace(-alpha0, alpha0, est['sweep_points']):
        g_sup, d_sup, _ = _sups(gamma, float(value), a, grid, split)
        report.sweep.append({'alpha': float(value), 'growth_sup': g_sup, 'decay_sup': d_sup})
    report.sweep_sup = max(row['growth_sup'] for row in report.sweep)
    at_zero = growth_sup if alpha == 0 else _sups(gamma, 0.0, a, grid, split)[0]
    report.sweep_factor = report.sweep_sup / max(at_zero, 1e-300)
    logger.debug(f"∫ Harness γ={gamma:g}, α={alpha:g}, a={a:g}: growth sup {growth_sup:.4g}, "
                 f"decay sup {decay_sup:.4g}, sweep factor {report.sweep_factor:.3g}")
    return report


def _derivative_rows(companion: CompanionMatrix, gamma, orders: int) -> List[List[Polynomial]]:
    """r_0 = e_1, r_{m+1} = r_m' + r_m A; ψ^{(m)} = r_m · (ψ, …, ψ^{(n-1)})"""
    n = companion.n
    A = companion.polynomial_matrix(gamma)
    zero = Polynomial([0j])
    r = [zero] * n
    r[0] = Polynomial([1 + 0j])
    rows = [r]
    for _ in range(orders):
        nxt = []
        for k in range(n):
            acc = r[k].deriv()
            for i in range(n):
                acc = acc + r[i] * A[i][k]
            nxt.append(acc)
        r = nxt
        rows.append(r)
    return rows


@dataclass
class EstimateReport:
    entries: List[Dict[str, Any]] = field(default_factory=list)
    ray_angle: float = 0.0

    @property
    def passed(self) -> bool:
        return all(e['passed'] for e in self.entries)

    def to_record(self) -> Dict[str, Any]:
        return {'ray_angle': self.ray_angle, 'passed': self.passed, 'entries': self.entries}


def estimate_report(basis: BasisJet, cfg: HsolvConfig = None) -> EstimateReport:
    """sup_t |∂^j ψ_k| (1+|t|)^{-j} e^{-Re Φ_k}, stable when extending from half the window to all of it"""
    cfg = cfg or default_config
    est = cfg.get_estimates_config()
    n = basis.n
    orders = n + est['extra_orders']
    companion = CompanionMatrix(basis.table)
    rows = _derivative_rows(companion, basis.gamma_param, orders - 1)
    t = basis.t_grid
    weight = 1.0 + np.abs(t)
    half = len(t) // 2
    report = EstimateReport(ray_angle=basis.ray_angle)
    for a, k in enumerate(basis.indices):
        J = basis.jets[a]                                         # (N, n)
        for j in range(orders):
            if j < n:
                values = J[:, j]
            else:
                coeffs = np.array([poly(t) for poly in rows[j]]).T  # (N, n)
                values = np.sum(coeffs * J, axis=1)
            ratio = np.abs(values) / weight ** j
            full = float(np.max(ratio))
            first = float(np.max(ratio[:half + 1]))
            stable = math.isfinite(full) and full <= est['extension_factor'] * max(first, 1e-300)
            report.entries.append({'k': k, 'j': j, 'sup': full, 'half_window_sup': first,
                                   'stable': stable, 'passed': stable})
    logger.debug(f"📏 Estimate report θ={basis.ray_angle:g}: {len(report.entries)} entries, "
                 f"{'pass' if report.passed else 'fail'}")
    return report


def ray_estimate_report(P: NCPolynomial, sign: int, gamma, angle: float, window=None,
                        cfg: HsolvConfig = None) -> List[EstimateReport]:
    """estimate_report on the sector samples θ ∈ {α - h, α, α + h}"""
    cfg = cfg or default_config
    h = cfg.SECTOR_HALF_ANGLE
    reports = []
    for theta in (angle - h, angle, angle + h):
        basis = canonical_basis(P, sign, gamma, window, cfg, side=1, ray_angle=theta)
        reports.append(estimate_report(basis, cfg))
    logger.info(f"📐 Ray estimates around θ={angle:g}: "
                f"{sum(r.passed for r in reports)}/{len(reports)} sectors pass")
    return reports
