"""
Canonical kernel bases ψ_k with ψ_k^{(j)} ~ t^j γ_k^j e^{Φ_k}

Jets are stored scaled: jets[k, p, j] = t^j [S₀(1)(I + E(t)) x_k(t)]_j and the raw
derivative is e^{log_scale[k, p]} · jets[k, p, j].  On the negative half-line the
construction runs in s = -t at parameter -γ and the jets are reflected.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from algebra.ncpoly import NCPolynomial
from algebra.roots import order_roots
from asymptotics.frame import Frame, build_frame
from asymptotics.gauge import ExponentData, Gamma, exponents, reduced_system
from config import config as default_config, HsolvConfig
from kernel.w_system import build_chain
from realization.coefficients import CoeffTable, CompanionMatrix, coefficient_table
from realization.ode_realization import OdeRealization, realize
from utils.errors import IntegrationError, ValidationError, WronskianCollapseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BasisJet:
    sign: int
    side: int
    gamma_param: Gamma            # parameter of the operator on the real line
    ray_angle: float
    indices: Tuple[int, ...]
    s_grid: np.ndarray            # construction parameter, increasing
    t_grid: np.ndarray            # points of the line: s, -s or s e^{iθ}
    jets: np.ndarray              # (len(indices), N, n)
    log_scale: np.ndarray         # (len(indices), N), Φ_k in the construction variable
    w_values: np.ndarray          # (len(indices), N, n), w-gauge solutions
    frame: Frame
    expo: ExponentData            # at the construction parameter
    table: CoeffTable
    realization: OdeRealization
    g_bound_ratio: Dict[int, float] = field(default_factory=dict)
    w_bound_ratio: float = 1.0

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.ray_angle) if self.ray_angle else 1.0

    @property
    def tangent(self) -> complex:
        """dt/ds"""
        return self.side * self.direction

    @property
    def construction_grid(self) -> np.ndarray:
        return self.s_grid * self.direction if self.ray_angle else self.s_grid

    def point(self, s: float) -> complex:
        return self.tangent * s

    def is_complete(self) -> bool:
        return self.indices == tuple(range(self.n))

    def log_abs(self) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(np.abs(self.jets)) + self.log_scale.real[:, :, None]

    def phase(self) -> np.ndarray:
        return np.angle(self.jets) + self.log_scale.imag[:, :, None]

    def raw_jets(self, p: int) -> np.ndarray:
        """(n, len(indices)) matrix of raw jets at grid point p; may overflow for wide windows"""
        return (self.jets[:, p, :] * np.exp(self.log_scale[:, p])[:, None]).T

    def to_records(self) -> List[Dict[str, Any]]:
        log_abs, phase = self.log_abs(), self.phase()
        rows = []
        for a, k in enumerate(self.indices):
            for p, t in enumerate(self.t_grid):
                for j in range(self.n):
                    rows.append({'t': [complex(t).real, complex(t).imag], 'k': k, 'j': j,
                                 'log_abs': float(log_abs[a, p, j]), 'phase': float(phase[a, p, j])})
        return rows


def _window(window, cfg: HsolvConfig) -> Tuple[float, float]:
    t0, t1 = window if window is not None else cfg.WINDOW
    if not 0 < t0 < t1:
        raise ValidationError(f"window needs 0 < t0 < T, got ({t0}, {t1})")
    return float(t0), float(t1)


def basis_from_table(R: OdeRealization, table: CoeffTable, gamma: Gamma, window=None,
                     cfg: HsolvConfig = None, side: int = 1, ray_angle: float = 0.0,
                     indices: Optional[Sequence[int]] = None) -> BasisJet:
    """Canonical solutions `indices` of the table's operator on one half-line or ray"""
    cfg = cfg or default_config
    t0, t1 = _window(window, cfg)
    n = table.n
    if side not in (1, -1):
        raise ValidationError(f"side must be +1 or -1, got {side}")
    if side == -1 and ray_angle:
        raise ValidationError("rays are only built from the positive side")
    if gamma is not None and abs(gamma) < cfg.GAMMA_MIN:
        raise ValidationError(f"|γ| = {abs(gamma):.3g} below the validated region (γ₀ = {cfg.GAMMA_MIN})")
    indices = tuple(range(n)) if indices is None else tuple(int(i) for i in indices)
    if any(not 0 <= i < n for i in indices) or len(set(indices)) != len(indices):
        raise ValidationError(f"indices {indices} are not distinct values in 0..{n - 1}")

    param = gamma if side == 1 or gamma is None else -complex(gamma)
    direction = cmath.exp(1j * ray_angle) if ray_angle else 1.0
    roots = tuple(table.roots)
    if ray_angle:
        _, perm = order_roots([z * direction ** 2 for z in roots], cfg.ROOT_GAP_TOL)
        roots = tuple(roots[i] for i in perm)
    frame = build_frame(roots, cfg.ROOT_GAP_TOL)
    expo = exponents(table, frame, param, cfg)

    grid = np.linspace(t0, t1, cfg.GRID_POINTS)
    domain = np.append(grid, t1 * cfg.TERMINAL_EXTENSION)
    system = reduced_system(expo, k=n - 1, domain=domain, direction=direction, cfg=cfg)
    chain = build_chain(system, (t0, t1), cfg)

    W = np.empty((len(indices), len(grid), n), dtype=complex)
    for a, k in enumerate(indices):
        x = chain.solution(k)
        W[a] = np.array([x(s) for s in grid])

    points = grid * direction if ray_angle else grid
    powers = np.arange(n)
    jets = np.empty_like(W)
    for p, t in enumerate(points):
        scale = complex(t) ** powers
        jets[:, p, :] = (expo.gauge_matrix(t) @ W[:, p, :].T).T * scale[None, :]
    log_scale = expo.phi_all(points)[list(indices)]

    if len(indices) == n:
        dets = np.abs(np.linalg.det(W[np.argsort(indices)].transpose(1, 2, 0)))
        if np.min(dets) < cfg.WRONSKIAN_FLOOR:
            raise WronskianCollapseError(f"w-gauge solutions lose independence (|det| = {np.min(dets):.3e})")

    t_grid = points
    if side == -1:
        jets = jets * ((-1.0) ** powers)[None, None, :]
        t_grid = -grid

    w_ratio = max((tr.bound_ratio for tr in chain.trajectories), default=1.0)
    basis = BasisJet(
        sign=table.sign, side=side, gamma_param=gamma, ray_angle=ray_angle, indices=indices,
        s_grid=grid, t_grid=t_grid, jets=jets, log_scale=log_scale, w_values=W,
        frame=frame, expo=expo, table=table, realization=R,
        g_bound_ratio=dict(chain.g_bound_ratio), w_bound_ratio=w_ratio,
    )
    logger.debug(f"🧬 Basis on side {side:+d}, θ={ray_angle:g}: {len(indices)} solutions on [{t0:g}, {t1:g}]")
    return basis


def canonical_basis(P: NCPolynomial, sign: int, gamma: Gamma, window=None, cfg: HsolvConfig = None,
                    side: int = 1, ray_angle: float = 0.0,
                    indices: Optional[Sequence[int]] = None) -> BasisJet:
    """Canonical basis of 𝓛γ for the ±t realization of P"""
    R = realize(P, sign)
    table = coefficient_table(R, cfg)
    return basis_from_table(R, table, gamma, window, cfg, side, ray_angle, indices)


def _integrate_linear(A, tangent: complex, point, span, Y0: np.ndarray, cfg: HsolvConfig) -> np.ndarray:
    """Y' = tangent·A(point(s))·Y over span; returns Y at the end"""
    n, m = Y0.shape

    def fun(s, y):
        return tangent * (A(point(s)) @ y.reshape(n, m)).ravel()

    sol = solve_ivp(fun, span, Y0.ravel().astype(complex), **cfg.get_integrator_config())
    if not sol.success:
        raise IntegrationError(f"companion propagation failed on {span}: {sol.message}")
    return sol.y[:, -1].reshape(n, m)


@dataclass(frozen=True, eq=False)
class JetResidualReport:
    defects: np.ndarray           # (len(indices), N - 1)
    max_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_defect <= self.tol)


def jet_residuals(basis: BasisJet, cfg: HsolvConfig = None) -> JetResidualReport:
    """One-step propagation of the companion system between adjacent grid points"""
    cfg = cfg or default_config
    A = CompanionMatrix(basis.table).A_builder(basis.gamma_param)
    grid = basis.s_grid
    defects = np.empty((len(basis.indices), len(grid) - 1))
    for p in range(len(grid) - 1):
        Y0 = basis.jets[:, p, :].T
        Y1 = _integrate_linear(A, basis.tangent, basis.point, (grid[p], grid[p + 1]), Y0, cfg)
        growth = np.exp(basis.log_scale[:, p + 1] - basis.log_scale[:, p])
        target = basis.jets[:, p + 1, :].T * growth[None, :]
        defects[:, p] = np.linalg.norm(Y1 - target, axis=0) / np.linalg.norm(target, axis=0)
    worst = float(np.max(defects)) if defects.size else 0.0
    logger.debug(f"🔬 Jet residual max {worst:.3e} over {defects.shape[1]} steps")
    return JetResidualReport(defects=defects, max_defect=worst, tol=cfg.JET_RESIDUAL_TOL)


@dataclass(frozen=True, eq=False)
class Transport:
    """Solutions at t = 0: span Q (orthonormal) and columns Q R · e^{log_scale}"""

    Q: np.ndarray
    R: np.ndarray
    jets: np.ndarray              # (n, m) in the basis' index order, scale factored out
    log_scale: np.ndarray         # (m,)

    def raw(self) -> np.ndarray:
        return self.jets * np.exp(self.log_scale)[None, :]


def transport_to_origin(basis: BasisJet, cfg: HsolvConfig = None) -> Transport:
    """Carry the first-grid-point jets to t = 0 through the polynomial companion, re-orthonormalizing per segment"""
    cfg = cfg or default_config
    if basis.ray_angle:
        raise ValidationError("transport to t = 0 is only defined on the real line")
    n, m = basis.n, len(basis.indices)
    if m == 0:
        empty = np.zeros((n, 0), dtype=complex)
        return Transport(Q=empty, R=np.zeros((0, 0), dtype=complex), jets=empty,
                         log_scale=np.zeros(0, dtype=complex))
    A = CompanionMatrix(basis.table).A_builder(basis.gamma_param)
    cols = basis.jets[:, 0, :].T
    norms = np.linalg.norm(cols, axis=0)
    log_scale = basis.log_scale[:, 0] + np.log(norms)
    # columns that grow fastest on the way in go first
    order = np.argsort([-k for k in basis.indices], kind='stable')
    Q, R_total = np.linalg.qr((cols / norms[None, :])[:, order])

    start = float(np.real(basis.t_grid[0]))
    segments = max(1, int(math.ceil(abs(start) / cfg.TRANSPORT_SEGMENT)))
    edges = np.linspace(start, 0.0, segments + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        Z = _integrate_linear(A, 1.0, lambda t: t, (a, b), Q, cfg)
        Q, R = np.linalg.qr(Z)
        R_total = R @ R_total
    inverse = np.argsort(order)
    jets = (Q @ R_total)[:, inverse]
    logger.debug(f"🚚 Transported {m} solutions from t={start:g} to 0 in {segments} segments")
    return Transport(Q=Q, R=R_total, jets=jets, log_scale=log_scale)
