"""
Well-conditioned w-gauge integration and the reduction-of-order chain

A tracked solution is written v = e^{Φ_k} w with Φ_k' = λ_k, so the w-equation
w' = (B - λ_k) w carries no exponential growth in its tracked slot.  The tracked
index of each level is the most recessive one left (the last in descending-Re
order); it is integrated backward with a unit terminal vector from a point past
the window end T, so the start-up transient has decayed on [t₀, T].  The other
indices are recovered by lifting through the chain and integrating forward.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp, cumulative_trapezoid

from config import config as default_config, HsolvConfig
from utils.errors import (BoundViolationError, IntegrationError, ValidationError,
                          VanishingComponentError)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WSystem:
    """w' = direction·(B(t) - λ_leading(t)) w along t = origin + direction·s"""

    n: int
    leading: int
    lambdas: Callable[[complex], np.ndarray]     # λ_j(t), j < n
    matrix: Callable[[complex], np.ndarray]      # B(t) of this level
    origin: complex = 0.0
    direction: complex = 1.0

    def point(self, s: float) -> complex:
        return self.origin + self.direction * s

    def lambda_tilde(self, t: complex) -> np.ndarray:
        lam = self.lambdas(t)
        return lam - lam[self.leading]

    def residual(self, t: complex) -> np.ndarray:
        """𝓡(t) = B(t) - diag(λ(t))"""
        return self.matrix(t) - np.diag(self.lambdas(t))

    def rhs_matrix(self, t: complex) -> np.ndarray:
        lam = self.lambdas(t)
        return self.matrix(t) - lam[self.leading] * np.eye(self.n)

    def rhs(self, s: float, w: np.ndarray) -> np.ndarray:
        return self.direction * (self.rhs_matrix(self.point(s)) @ w)


@dataclass(frozen=True, eq=False)
class WTrajectory:
    system: WSystem
    s: np.ndarray                 # ascending solver nodes
    w: np.ndarray                 # (n, len(s))
    solution: object              # scipy OdeSolution, dense in s
    bound_ratio: float

    def __call__(self, s) -> np.ndarray:
        return self.solution(s)


def _solve(fun, span, y0, cfg: HsolvConfig, what: str):
    sol = solve_ivp(fun, span, np.asarray(y0, dtype=complex), dense_output=True,
                    **cfg.get_integrator_config())
    if not sol.success:
        raise IntegrationError(f"{what}: {sol.message}")
    return sol


def _bound_ratio(system: WSystem, s: np.ndarray, w: np.ndarray, init_norm: float) -> float:
    """max over s of |w(s)| / (|init| exp(∫_s^y ‖𝓡‖_F))"""
    norms = np.array([np.linalg.norm(system.residual(system.point(x))) for x in s])
    norms *= abs(system.direction)
    cumulative = cumulative_trapezoid(norms, s, initial=0.0)
    tail = cumulative[-1] - cumulative
    ratio = np.linalg.norm(w, axis=0) / (init_norm * np.exp(tail))
    return float(np.max(ratio))


def integrate_w(system: WSystem, from_t: float, to_t: float, init: Sequence[complex],
                cfg: HsolvConfig = None, check_bound: bool = True) -> WTrajectory:
    """Backward integration from from_t down to to_t with the Gronwall bound check"""
    cfg = cfg or default_config
    if not from_t > to_t > 0:
        raise ValidationError(f"backward integration needs from_t > to_t > 0, got {from_t}, {to_t}")
    init = np.asarray(init, dtype=complex)
    sol = _solve(system.rhs, (from_t, to_t), init, cfg, "w-integration failed")
    order = np.argsort(sol.t)
    s, w = sol.t[order], sol.y[:, order]
    ratio = 1.0
    if check_bound:
        ratio = _bound_ratio(system, s, w, float(np.linalg.norm(init)))
        if ratio > cfg.W_BOUND_SLACK:
            raise BoundViolationError(
                f"|w| exceeds the Gronwall bound by {ratio:.3g} (slack {cfg.W_BOUND_SLACK:g})")
    logger.debug(f"🧵 w-integration [{to_t:g}, {from_t:g}] in {len(s)} steps, bound ratio {ratio:.3g}")
    return WTrajectory(system=system, s=s, w=w, solution=sol.sol, bound_ratio=ratio)


def reduction_of_order(system: WSystem, trajectory: WTrajectory, grid: np.ndarray,
                       floor: float = None) -> WSystem:
    """Next level from a tracked solution y of the last slot:

        B̃ = B[:-1, :-1] - (y[:-1] / y[-1]) ⊗ B[-1, :-1]
    """
    floor = default_config.COMPONENT_FLOOR if floor is None else floor
    if system.n < 2:
        raise ValidationError("a one-dimensional level has no reduction")
    last = np.abs(trajectory(grid)[-1])
    if np.min(last) < floor:
        raise VanishingComponentError(
            f"tracked component falls to {np.min(last):.3e} on the window (floor {floor:.1e})")
    parent, y_of = system.matrix, trajectory.solution
    origin, direction = system.origin, system.direction

    def matrix(t: complex) -> np.ndarray:
        B = parent(t)
        y = y_of(((t - origin) / direction).real)
        return B[:-1, :-1] - np.outer(y[:-1] / y[-1], B[-1, :-1])

    lambdas = system.lambdas
    return WSystem(n=system.n - 1, leading=system.n - 2,
                   lambdas=lambda t: lambdas(t)[:-1], matrix=matrix,
                   origin=origin, direction=direction)


@dataclass
class ReductionChain:
    """Levels 0..n-1 of the chain; level m has dimension n - m and tracks global index n-1-m"""

    top: WSystem
    window: tuple
    cfg: HsolvConfig = None
    levels: List[WSystem] = field(default_factory=list)
    trajectories: List[WTrajectory] = field(default_factory=list)
    g_bound_ratio: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        self.cfg = self.cfg or default_config
        t0, t1 = self.window
        self.grid = np.linspace(t0, t1, self.cfg.GRID_POINTS)
        self.levels = [self.top]

    @property
    def n(self) -> int:
        return self.top.n

    @property
    def terminal(self) -> float:
        """Start of the backward integrations, beyond the reported window"""
        return self.window[1] * self.cfg.TERMINAL_EXTENSION

    def level_of(self, index: int) -> int:
        if not 0 <= index < self.n:
            raise ValidationError(f"index {index} outside 0..{self.n - 1}")
        return self.n - 1 - index

    def tracked(self, m: int) -> WTrajectory:
        """Tracked trajectory of level m, building lower levels on demand"""
        while len(self.trajectories) <= m:
            level = len(self.trajectories)
            if level >= len(self.levels):
                self.levels.append(reduction_of_order(
                    self.levels[level - 1], self.trajectories[level - 1], self.grid,
                    self.cfg.COMPONENT_FLOOR))
            system = self.levels[level]
            init = np.zeros(system.n, dtype=complex)
            init[-1] = 1.0
            t0, _ = self.window
            self.trajectories.append(integrate_w(system, self.terminal, t0, init, self.cfg))
        return self.trajectories[m]

    def _lift(self, m: int, upper: Callable[[float], np.ndarray], index: int) -> Callable:
        """x_m = pad(x_{m+1}) + G y_m with G' = (B_m[-1,:-1]·x_{m+1}) / y_m[-1] + (λ_k - λ_index) G"""
        system, y = self.levels[m], self.tracked(m)
        k = system.n - 1
        t0, t1 = self.window
        direction = system.direction

        def rhs(s, G):
            t = system.point(s)
            B = system.matrix(t)
            ys = y(s)
            lam = system.lambdas(t)
            forcing = (B[-1, :-1] @ upper(s)) / ys[-1]
            return direction * (forcing + (lam[k] - lam[index]) * G)

        sol = _solve(rhs, (t0, t1), [0.0], self.cfg, f"lift at level {m} failed")
        G = sol.sol
        g_values = np.abs(G(self.grid)[0])
        self.g_bound_ratio[m] = max(self.g_bound_ratio.get(m, 0.0),
                                    float(np.max(g_values * self.grid)))

        def lifted(s):
            return np.append(upper(s), 0.0) + G(s)[0] * y(s)

        return lifted

    def solution(self, index: int) -> Callable[[float], np.ndarray]:
        """w-gauge solution x(s) of the top level for global index `index`"""
        m = self.level_of(index)
        current = self.tracked(m).solution
        for level in range(m - 1, -1, -1):
            current = self._lift(level, current, index)
        return current


def build_chain(system: WSystem, window: tuple, cfg: HsolvConfig = None) -> ReductionChain:
    chain = ReductionChain(top=system, window=window, cfg=cfg)
    logger.debug(f"⛓️ Reduction chain over {window} for dimension {system.n}")
    return chain
