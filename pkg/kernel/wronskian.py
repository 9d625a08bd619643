"""
Wronskians, quotients h_l = W_l / W and adjoint-kernel jets

Everything is computed in the construction variable of the basis with the
exponentials kept apart:  log W = Σ Φ_k + n(n-1)/2 log t + log det M, where
M = S₀(1)(I + E)[x_0 … x_{n-1}], and h_l = e^{-Φ_l} [M⁻¹]_{l,n-1} t^{-(n-1)}.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy import stats

from asymptotics.gauge import log_branch
from config import config as default_config, HsolvConfig
from kernel.basis import BasisJet
from realization.coefficients import CompanionMatrix
from realization.ode_realization import formal_adjoint
from utils.errors import ValidationError, WronskianCollapseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WronskianData:
    s: np.ndarray
    log_W: np.ndarray             # (N,)
    log_det_M: np.ndarray         # (N,), phase unwrapped
    M_inv: np.ndarray             # (N, n, n)
    h_scaled: np.ndarray          # (n, N): e^{Φ_l} h_l
    h_log_scale: np.ndarray       # (n, N): -Φ_l
    abel_defect: np.ndarray       # (N - 2,), relative, interior points
    growth_slope: Optional[float]
    growth_intercept: Optional[float]
    expected_slope: float

    @property
    def max_abel_defect(self) -> float:
        return float(np.max(self.abel_defect)) if self.abel_defect.size else 0.0

    def h_envelope(self) -> np.ndarray:
        """sup_t |h_l| e^{Re Φ_l} per l"""
        return np.max(np.abs(self.h_scaled), axis=1)

    def to_record(self) -> Dict[str, Any]:
        return {
            'max_abel_defect': self.max_abel_defect,
            'growth_slope': self.growth_slope,
            'expected_slope': self.expected_slope,
            'h_envelope': [float(v) for v in self.h_envelope()],
        }


def wronskians(basis: BasisJet, cfg: HsolvConfig = None) -> WronskianData:
    """W, h_l and the Abel identity d/dt log W = trace A on the grid"""
    cfg = cfg or default_config
    if not basis.is_complete():
        raise ValidationError("Wronskians need the complete basis in index order")
    expo, n = basis.expo, basis.n
    s = basis.s_grid
    points = basis.construction_grid
    M = np.empty((len(s), n, n), dtype=complex)
    for p, t in enumerate(points):
        M[p] = expo.gauge_matrix(t) @ basis.w_values[:, p, :].T
    sign, log_abs = np.linalg.slogdet(M)
    if np.min(log_abs) < np.log(cfg.WRONSKIAN_FLOOR):
        raise WronskianCollapseError(f"Wronskian falls below the floor (log|det| = {np.min(log_abs):.1f})")
    log_det = log_abs + 1j * np.unwrap(np.angle(sign))

    phi = expo.phi_all(points)                         # (n, N)
    log_t = log_branch(points)
    log_W = phi.sum(axis=0) + n * (n - 1) / 2 * log_t + log_det

    M_inv = np.linalg.inv(M)
    h_scaled = M_inv[:, :, n - 1].T * (np.asarray(points, dtype=complex) ** (-(n - 1)))[None, :]
    if basis.side == -1:
        h_scaled = h_scaled * (-1.0) ** (n - 1)

    # d/dt log W against trace A in the construction variable
    companion = CompanionMatrix(basis.table)
    direction = basis.direction
    lam_sum = np.array([expo.lambdas(t).sum() for t in points])
    d_log_det = np.gradient(log_det, s) / direction
    derivative = lam_sum + n * (n - 1) / (2 * np.asarray(points, dtype=complex)) + d_log_det
    trace = np.array([companion.trace(t, expo.gamma_param) for t in points])
    defect = np.abs(derivative - trace) / np.maximum(1.0, np.abs(trace))
    abel = defect[1:-1]

    slope = intercept = None
    if not basis.ray_angle:
        fit = stats.linregress(s[1:-1], np.gradient(log_W.real, s)[1:-1])
        slope, intercept = float(fit.slope), float(fit.intercept)
    expected = float(np.sum(expo.roots).real)
    logger.info(f"📈 Wronskian: Abel defect {float(np.max(abel)) if abel.size else 0.0:.2e}, "
                f"growth slope {slope if slope is None else round(slope, 6)} (expected {expected:.6g})")
    return WronskianData(s=s, log_W=log_W, log_det_M=log_det, M_inv=M_inv, h_scaled=h_scaled,
                         h_log_scale=-phi, abel_defect=abel, growth_slope=slope,
                         growth_intercept=intercept, expected_slope=expected)


@dataclass(frozen=True, eq=False)
class AdjointJets:
    """H[l, p, m] = e^{Φ_l} h_l^{(m)}, m = 0..n; conj(h_l) spans ker 𝓛γ*"""

    H: np.ndarray
    residual: np.ndarray          # (n, N), relative
    max_residual: float

    def conjugated(self) -> np.ndarray:
        return np.conj(self.H)


def _derivative_columns(companion: CompanionMatrix, gamma, n: int) -> List[List[Polynomial]]:
    """c_0 = e_n, c_{m+1} = c_m' - A c_m, so that h^{(m)} = row_l(U⁻¹) · c_m"""
    A = companion.polynomial_matrix(gamma)
    zero = Polynomial([0j])
    c = [zero] * n
    c[n - 1] = Polynomial([1 + 0j])
    out = [c]
    for _ in range(n):
        nxt = []
        for i in range(n):
            acc = c[i].deriv()
            for k in range(n):
                acc = acc - A[i][k] * c[k]
            nxt.append(acc)
        c = nxt
        out.append(c)
    return out


def adjoint_kernel_basis(basis: BasisJet, wron: WronskianData = None,
                         cfg: HsolvConfig = None) -> AdjointJets:
    """Jets of h_l up to order n and the residual of the formal adjoint on conj(h_l)"""
    cfg = cfg or default_config
    if basis.side != 1 or basis.ray_angle:
        raise ValidationError("adjoint jets are built on the positive real half-line")
    wron = wron or wronskians(basis, cfg)
    n = basis.n
    gamma = basis.gamma_param
    columns = _derivative_columns(CompanionMatrix(basis.table), gamma, n)
    t = basis.s_grid
    inv_powers = t[:, None] ** (-np.arange(n))[None, :]          # (N, n)
    H = np.empty((n, len(t), n + 1), dtype=complex)
    for m, c in enumerate(columns):
        values = np.array([poly(t) for poly in c]).T              # (N, n)
        # Σ_k [M⁻¹]_{l,k} t^{-k} c_{m,k}(t)
        H[:, :, m] = np.einsum('plk,pk->lp', wron.M_inv, inv_powers * values)

    adjoint = formal_adjoint(basis.realization)
    adj_gamma = None if gamma is None else np.conj(complex(gamma))
    polys = adjoint.coefficient_polynomials(adj_gamma)
    coeffs = np.array([poly(t) for poly in polys])               # (n + 1, N)
    conj_H = np.conj(H)
    value = np.einsum('bp,lpb->lp', coeffs, conj_H)
    scale = np.einsum('bp,lpb->lp', np.abs(coeffs), np.abs(conj_H))
    residual = np.abs(value) / np.maximum(scale, np.finfo(float).tiny)
    worst = float(np.max(residual))
    logger.debug(f"🪞 Adjoint residual max {worst:.3e}")
    return AdjointJets(H=H, residual=residual, max_residual=worst)
