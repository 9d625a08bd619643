"""
Vandermonde frame S₀(t) = D_t S₀(1) diagonalizing the principal companion matrix
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from algebra.roots import min_gap
from config import config as default_config
from utils.errors import FrameError, RootCollisionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Frame:
    """S₀(1)_{k,j} = γ_j^k (rows k = 0..n-1), D_t = diag(t^k)"""

    roots: Tuple[complex, ...]
    S0_1: np.ndarray
    S0_1_inv: np.ndarray

    @property
    def n(self) -> int:
        return len(self.roots)

    @cached_property
    def gammas(self) -> np.ndarray:
        return np.asarray(self.roots, dtype=complex)

    @cached_property
    def powers(self) -> np.ndarray:
        return np.arange(self.n)

    def D(self, t: complex) -> np.ndarray:
        return complex(t) ** self.powers

    def S0(self, t: complex) -> np.ndarray:
        return self.D(t)[:, None] * self.S0_1

    def S0_inv(self, t: complex) -> np.ndarray:
        """[S₀⁻¹(t)]_{i,j} = t^{-j} [S₀⁻¹(1)]_{i,j} (0-based j)"""
        return self.S0_1_inv / self.D(t)[None, :]

    def Lambda0(self, t: complex) -> np.ndarray:
        return np.diag(self.gammas * complex(t))

    def det_S0(self, t: complex) -> complex:
        n = self.n
        return complex(t) ** (n * (n - 1) // 2) * np.linalg.det(self.S0_1)

    @cached_property
    def K(self) -> np.ndarray:
        """t·S₀⁻¹S₀′ = S₀⁻¹(1) N S₀(1) with N = diag(0..n-1); constant in t"""
        return self.S0_1_inv @ (self.powers[:, None] * self.S0_1)

    def S0_inv_dS0(self, t: complex) -> np.ndarray:
        return self.K / complex(t)


def build_frame(roots: Sequence[complex], gap_tol: float = None) -> Frame:
    """Frame for roots in the given order (callers order them first)"""
    gap_tol = default_config.ROOT_GAP_TOL if gap_tol is None else gap_tol
    values = tuple(complex(z) for z in roots)
    gap = min_gap(values)
    if gap <= gap_tol:
        raise RootCollisionError(f"frame roots collide (min gap {gap:.3e})")
    S0_1 = np.vander(np.asarray(values), increasing=True).T
    try:
        S0_1_inv = np.linalg.inv(S0_1)
    except np.linalg.LinAlgError as e:
        raise FrameError(f"Vandermonde matrix is singular: {e}") from e
    logger.debug(f"🧭 Frame built for {len(values)} roots, cond {np.linalg.cond(S0_1):.2e}")
    return Frame(roots=values, S0_1=S0_1, S0_1_inv=S0_1_inv)
