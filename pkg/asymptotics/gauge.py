"""
Gauge solve, exponents and the reduced w-system

With S(t) = S₀(t)(I + 𝒜/t + Δ/t²) the companion system u' = A u becomes
v' = B(t) v, B = diag(λ) + 𝓡, λ_j = γ_j t + β_j + ρ_j/t and 𝓡 = O(t⁻²).
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra.roots import rotate_roots
from asymptotics.frame import Frame
from config import config as default_config, HsolvConfig
from kernel.w_system import WSystem
from realization.coefficients import CoeffTable
from utils.errors import OrderingError, RootCollisionError, ValidationError

logger = logging.getLogger(__name__)

Gamma = Optional[complex]   # None stands for γ = ∞


def log_branch(t):
    """ln|t| on real input, principal branch on complex input"""
    t = np.asarray(t)
    if np.isrealobj(t):
        return np.log(np.abs(t))
    return np.log(t.astype(complex))


def _encode(z: complex) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True, eq=False)
class ErrorBlocks:
    """𝒟₁ (constant) and 𝒟₂ (coefficient of 1/t) with the a_k, b_k that build them"""

    a: np.ndarray
    b: np.ndarray
    D1: np.ndarray
    D2: np.ndarray


def _check_frame(table: CoeffTable, frame: Frame, tol: float = 1e-8):
    if frame.n != table.n:
        raise ValidationError(f"frame has {frame.n} roots, table has order {table.n}")
    coeffs = np.asarray(table.symbol_coefficients(), dtype=complex)
    powers = np.arange(table.n + 1)
    for z in frame.gammas:
        zk = z ** powers
        scale = float(np.sum(np.abs(coeffs) * np.abs(zk)))
        if abs(coeffs @ zk) > tol * scale:
            raise ValidationError(f"frame root {z:.6g} does not annihilate the table's symbol")


def error_blocks(table: CoeffTable, frame: Frame, gamma: Gamma) -> ErrorBlocks:
    """[𝒟₁]_{i,j} = [S₀⁻¹(1)]_{i,n} Σ_k a_k γ_j^k, 𝒟₂ likewise with b_k"""
    _check_frame(table, frame)
    a = table.a_coefficients(gamma)
    b = table.b_coefficients(gamma)
    last = frame.S0_1_inv[:, -1]
    return ErrorBlocks(a=a, b=b,
                       D1=np.outer(last, a @ frame.S0_1),
                       D2=np.outer(last, b @ frame.S0_1))


@dataclass(frozen=True, eq=False)
class GaugeData:
    """𝒜, Δ (zero diagonals) and the 1/t coefficient M whose diagonal is ρ"""

    alpha: np.ndarray
    delta: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    K: np.ndarray            # t·S₀⁻¹S₀′
    M: np.ndarray            # 𝒟₂ + [𝒟₁,𝒜] + 𝒜[𝒜,Γ] - K
    gamma: Gamma = None

    def E(self, t: complex) -> np.ndarray:
        t = complex(t)
        return self.alpha / t + self.delta / t ** 2

    def E_prime(self, t: complex) -> np.ndarray:
        t = complex(t)
        return -self.alpha / t ** 2 - 2 * self.delta / t ** 3


def _gaps(frame: Frame, gap_tol: float) -> Tuple[np.ndarray, np.ndarray]:
    g = frame.gammas
    G = g[None, :] - g[:, None]          # G_ij = γ_j - γ_i
    off = ~np.eye(frame.n, dtype=bool)
    if frame.n > 1 and np.min(np.abs(G[off])) <= gap_tol:
        raise RootCollisionError(f"root gap {np.min(np.abs(G[off])):.3e} too small for the gauge solve")
    return G, off


def solve_gauge(frame: Frame, D1: np.ndarray, D2: np.ndarray, gamma: Gamma,
                cfg: HsolvConfig = None) -> GaugeData:
    """Off-diagonal solves [𝒜,Γ] = 𝒟₁ and [Δ,Γ] = 𝒟₂ + [𝒟₁,𝒜] + 𝒜[𝒜,Γ] - t S₀⁻¹S₀′"""
    cfg = cfg or default_config
    G, off = _gaps(frame, cfg.ROOT_GAP_TOL)
    alpha = np.zeros_like(D1, dtype=complex)
    alpha[off] = D1[off] / G[off]
    K = frame.K
    M = D2 + (D1 @ alpha - alpha @ D1) + alpha @ (alpha * G) - K
    delta = np.zeros_like(M, dtype=complex)
    delta[off] = M[off] / G[off]
    return GaugeData(alpha=alpha, delta=delta, D1=D1, D2=D2, K=K, M=M, gamma=gamma)


def gauge_residuals(gauge: GaugeData, frame: Frame) -> Dict[str, float]:
    """Relative off-diagonal defects of both commutator equations"""
    G = frame.gammas[None, :] - frame.gammas[:, None]
    off = ~np.eye(frame.n, dtype=bool)
    if not off.any():
        return {'alpha': 0.0, 'delta': 0.0}
    first = (gauge.alpha * G - gauge.D1)[off]
    second = (gauge.delta * G - gauge.M)[off]
    scale1 = max(1.0, float(np.max(np.abs(gauge.D1))))
    scale2 = max(1.0, float(np.max(np.abs(gauge.M))))
    return {'alpha': float(np.max(np.abs(first))) / scale1,
            'delta': float(np.max(np.abs(second))) / scale2}


@dataclass(frozen=True, eq=False)
class ExponentData:
    """Φ_j(t) = γ_j t²/2 + β_j t + ρ_j log t at one parameter value"""

    table: CoeffTable
    frame: Frame
    gauge: GaugeData
    gamma_param: Gamma
    beta: np.ndarray
    rho: np.ndarray
    beta_limit: np.ndarray
    rho_limit: np.ndarray

    @property
    def roots(self) -> np.ndarray:
        return self.frame.gammas

    @property
    def n(self) -> int:
        return self.frame.n

    def lambdas(self, t: complex) -> np.ndarray:
        """Φ_j'(t) = γ_j t + β_j + ρ_j/t"""
        t = complex(t)
        return self.roots * t + self.beta + self.rho / t

    def phi(self, j: int, t) -> complex:
        return self.phi_all(t)[j]

    def phi_all(self, t) -> np.ndarray:
        """Φ_j at t; shape (n,) for scalar t, (n, N) for an array"""
        t = np.asarray(t)
        log_t = log_branch(t)
        if t.ndim == 0:
            return self.roots * t ** 2 / 2 + self.beta * t + self.rho * log_t
        return (self.roots[:, None] * t[None, :] ** 2 / 2 + self.beta[:, None] * t[None, :]
                + self.rho[:, None] * log_t[None, :])

    def gauge_matrix(self, t: complex) -> np.ndarray:
        """S₀(1)(I + 𝒜/t + Δ/t²); u = D_t · gauge_matrix · v"""
        return self.frame.S0_1 @ (np.eye(self.n) + self.gauge.E(t))

    def to_records(self) -> List[Dict[str, Any]]:
        param = self.gamma_param
        return [{
            'j': j,
            'gamma': _encode(self.roots[j]),
            'beta': _encode(self.beta[j]),
            'rho': _encode(self.rho[j]),
            'gamma_param': None if param is None else _encode(param),
            'beta_limit': _encode(self.beta_limit[j]),
            'rho_limit': _encode(self.rho_limit[j]),
        } for j in range(self.n)]


def exponents(table: CoeffTable, frame: Frame, gamma: Gamma, cfg: HsolvConfig = None) -> ExponentData:
    """β = diag 𝒟₁, ρ = diag M, plus the γ → ∞ limits"""
    blocks = error_blocks(table, frame, gamma)
    gauge = solve_gauge(frame, blocks.D1, blocks.D2, gamma, cfg)
    if gamma is None:
        limit = gauge
    else:
        inf_blocks = error_blocks(table, frame, None)
        limit = solve_gauge(frame, inf_blocks.D1, inf_blocks.D2, None, cfg)
    expo = ExponentData(
        table=table, frame=frame, gauge=gauge, gamma_param=gamma,
        beta=np.diag(gauge.D1).copy(), rho=np.diag(gauge.M).copy(),
        beta_limit=np.diag(limit.D1).copy(), rho_limit=np.diag(limit.M).copy(),
    )
    logger.debug(f"📐 Exponents at γ={gamma}: β={np.round(expo.beta, 6)}, ρ={np.round(expo.rho, 6)}")
    return expo


def _scaled_last_row(table: CoeffTable, gamma: Gamma) -> Callable[[complex], np.ndarray]:
    """t -> -t Q_j(t, γ), j < n, with the monomials flattened once"""
    js, cs, ps = [], [], []
    for j in range(table.n):
        for a, b, c in table.q_terms[j]:
            if a and gamma is None:
                continue
            js.append(j)
            cs.append(-c / (1.0 if a == 0 else complex(gamma) ** a))
            ps.append(1 - b)
    js, cs, ps = np.array(js, dtype=int), np.array(cs, dtype=complex), np.array(ps, dtype=float)
    n = table.n

    def row(t: complex) -> np.ndarray:
        out = np.zeros(n, dtype=complex)
        np.add.at(out, js, cs * complex(t) ** ps)
        return out

    return row


def transformed_matrix(expo: ExponentData, gauge: GaugeData = None) -> Callable[[complex], np.ndarray]:
    """t -> B(t) = (I+E)⁻¹[S₀(1)⁻¹(D_t⁻¹AD_t - N/t)S₀(1)(I+E) - E′]"""
    gauge = gauge or expo.gauge
    frame = expo.frame
    n = frame.n
    row = _scaled_last_row(expo.table, expo.gamma_param)
    S, S_inv = frame.S0_1, frame.S0_1_inv
    N = np.diag(np.arange(n)).astype(complex)
    I = np.eye(n, dtype=complex)
    upper = (np.arange(n - 1), np.arange(1, n))

    def B(t: complex) -> np.ndarray:
        t = complex(t)
        scaled = np.zeros((n, n), dtype=complex)
        scaled[upper] = t
        scaled[-1, :] = row(t)
        E = gauge.alpha / t + gauge.delta / t ** 2
        E_prime = -gauge.alpha / t ** 2 - 2 * gauge.delta / t ** 3
        C = S_inv @ (scaled - N / t) @ S
        return np.linalg.solve(I + E, C @ (I + E) - E_prime)

    return B


def check_ordering(expo: ExponentData, points: Sequence[complex], direction: complex = 1.0,
                   cfg: HsolvConfig = None):
    """Re(direction·(λ_j - λ_{j+1})) ≥ 0 on the sampled points wherever Re(γ e^{2iθ}) separates j, j+1"""
    cfg = cfg or default_config
    rotated = expo.roots * complex(direction) ** 2
    tie = 1e-12 * (1.0 + float(np.max(np.abs(rotated))))
    for t in points:
        lam = expo.lambdas(t)
        for j in range(expo.n - 1):
            if abs(rotated[j].real - rotated[j + 1].real) <= tie:
                continue
            diff = (complex(direction) * (lam[j] - lam[j + 1])).real
            if diff < -cfg.ORDERING_SLACK * (1.0 + abs(lam[j]) + abs(lam[j + 1])):
                raise OrderingError(
                    f"growth order of indices {j}, {j + 1} is violated at t={complex(t):.4g} "
                    f"(Re difference {diff:.3e})")


def reduced_system(expo: ExponentData, gauge: GaugeData = None, k: int = None,
                   domain: Sequence[float] = None, direction: complex = 1.0,
                   cfg: HsolvConfig = None) -> WSystem:
    """w-system tracking index k (default: the most recessive) along t = direction·s"""
    gauge = gauge or expo.gauge
    k = expo.n - 1 if k is None else k
    if not 0 <= k < expo.n:
        raise ValidationError(f"leading index {k} outside 0..{expo.n - 1}")
    if domain is not None:
        check_ordering(expo, [complex(direction) * s for s in domain], direction, cfg)
    return WSystem(n=expo.n, leading=k, lambdas=expo.lambdas,
                   matrix=transformed_matrix(expo, gauge), direction=direction)


def rotate(table: CoeffTable, angle: float) -> Tuple[Tuple[complex, ...], CoeffTable]:
    """Table of e^{inα} P(ie^{-iα}∂_ζ, ζe^{iα}) in ζ = t e^{-iα}, renormalized to a monic ∂^n

    The monomial t^a ∂^j picks up e^{i(n+a-j)α}; with a = l - j - 2m this is
    e^{i(n+l-2j-2m)α} for d_{l,j} (m = 0) and e_{l,j,m}.
    """
    if not 0.0 <= angle <= math.pi / 2:
        raise ValidationError(f"rotation angle must lie in [0, π/2], got {angle}")
    n = table.n

    def factor(l: int, j: int, m: int) -> complex:
        return cmath.exp(1j * (n + l - 2 * j - 2 * m) * angle)

    d = {(l, j): table.d_value(l, j) * factor(l, j, 0) for (l, j) in table.d}
    e = {(l, j, m): table.e_value(l, j, m) * factor(l, j, m) for (l, j, m) in table.e}
    roots = rotate_roots(table.roots, angle) if angle else tuple(table.roots)
    if not angle:
        d, e = dict(table.d), dict(table.e)
    rotated = CoeffTable(n=n, d=d, e=e, roots=roots, sign=table.sign,
                         adjoint=table.adjoint, angle=table.angle + angle)
    return roots, rotated
