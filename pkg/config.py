"""
Configuration for the Heisenberg solvability toolkit
Tolerances, windows and integrator settings shared by every numerical stage
"""

import os
import math
import logging
import dataclasses
from dotenv import load_dotenv
from dataclasses import dataclass, field
from typing import Dict, Tuple, Any
from datetime import datetime

load_dotenv()

logger = logging.getLogger(__name__)


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"⚠️ Ignoring malformed {name}={raw!r}, using {default}")
        return default
    if not math.isfinite(value) or value <= 0:
        logger.warning(f"⚠️ Ignoring non-positive {name}={raw!r}, using {default}")
        return default
    return value


def parse_window(text: str) -> Tuple[float, float]:
    """Parse 't0:T' into a validated window tuple"""
    parts = text.split(':')
    if len(parts) != 2:
        raise ValueError(f"window must look like 't0:T', got {text!r}")
    t0, t1 = float(parts[0]), float(parts[1])
    if not (0 < t0 < t1) or not math.isfinite(t1):
        raise ValueError(f"window needs 0 < t0 < T, got {text!r}")
    return t0, t1


def _env_window(default: Tuple[float, float]) -> Tuple[float, float]:
    raw = os.getenv('HSOLV_WINDOW')
    if raw is None or raw.strip() == '':
        return default
    try:
        return parse_window(raw)
    except ValueError as e:
        logger.warning(f"⚠️ Ignoring HSOLV_WINDOW: {e}")
        return default


@dataclass(frozen=True)
class HsolvConfig:
    """Numerical policy for roots, asymptotic frames, kernel bases and verdicts"""

    # Genericity and roots
    MONIC_TOL: float = 1e-12
    ROOT_GAP_TOL: float = 1e-8
    ROOT_AGREEMENT_TOL: float = 1e-9      # relative, Aberth vs companion eigenvalues
    ROOT_MAX_ITER: int = 500
    TABLE_TOL: float = 1e-10

    # Decay side and matching
    DECAY_RE_THRESHOLD: float = 1e-8
    SIGMA_TOL: float = field(default_factory=lambda: _env_float('HSOLV_TOL', 1e-6))
    SIGMA_CONFIRM_TOL: float = 1e-8

    # Window and grid
    WINDOW: Tuple[float, float] = field(default_factory=lambda: _env_window((5.0, 15.0)))
    GRID_POINTS: int = 600
    GAMMA_MIN: float = 0.5

    # Integrator (w-gauge)
    INTEGRATOR: Dict[str, Any] = field(default_factory=lambda: {
        'method': 'DOP853',
        'rtol': 1e-10,
        'atol': 1e-12,
    })
    TRANSPORT_SEGMENT: float = 0.5
    TERMINAL_EXTENSION: float = 1.5        # tracked solutions start at T·extension
    W_BOUND_SLACK: float = 10.0
    COMPONENT_FLOOR: float = 1e-8          # |v_n| floor in the reduction chain
    ORDERING_SLACK: float = 1e-8
    WRONSKIAN_FLOOR: float = 1e-300

    # Sector analysis
    SECTOR_HALF_ANGLE: float = math.pi / 16

    # Scan policy
    SCAN: Dict[str, Any] = field(default_factory=lambda: {
        'grid_size': 16,
        'interval': (1.0, 10.0),
        'refine_factor': 4,
        'refine_rounds': 2,
        'workers': 1,
    })

    # Integral bounds and envelopes
    ESTIMATES: Dict[str, Any] = field(default_factory=lambda: {
        'alpha0': 4.0,
        't_max': 40.0,
        'grid_step': 0.25,
        'sweep_points': 9,
        'extension_factor': 2.0,
        'extra_orders': 1,
    })

    # Verification thresholds
    JET_RESIDUAL_TOL: float = 1e-7
    ABEL_TOL: float = 1e-6
    ADJOINT_RESIDUAL_TOL: float = 1e-6
    GAUGE_TOL: float = 1e-12
    FRAME_TOL: float = 1e-10

    SCHEMA_VERSION: str = 'hsolv_report_v1'

    def __post_init__(self):
        """Validate settings and log the loaded configuration"""
        self._validate_config()
        logger.debug(f"🧮 Config loaded: window={self.WINDOW}, grid={self.GRID_POINTS}, "
                     f"sigma_tol={self.SIGMA_TOL}, integrator={self.INTEGRATOR['method']}")

    def _validate_config(self):
        """Validate configuration settings"""
        t0, t1 = self.WINDOW
        if not (0 < t0 < t1):
            raise ValueError(f"Invalid window {self.WINDOW}: need 0 < t0 < T")

        if self.GRID_POINTS < 8:
            raise ValueError("GRID_POINTS must be at least 8")

        for name in ('MONIC_TOL', 'ROOT_GAP_TOL', 'ROOT_AGREEMENT_TOL', 'SIGMA_TOL',
                     'SIGMA_CONFIRM_TOL', 'JET_RESIDUAL_TOL', 'ABEL_TOL', 'TRANSPORT_SEGMENT'):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

        if self.TERMINAL_EXTENSION < 1.0:
            raise ValueError("TERMINAL_EXTENSION must be at least 1")

        if self.SIGMA_CONFIRM_TOL > self.SIGMA_TOL:
            raise ValueError("SIGMA_CONFIRM_TOL must not exceed SIGMA_TOL")

        if not (0 < self.SECTOR_HALF_ANGLE < math.pi / 4):
            raise ValueError("SECTOR_HALF_ANGLE must lie in (0, pi/4)")

        lo, hi = self.SCAN['interval']
        if not (0 < lo < hi):
            raise ValueError(f"Invalid scan interval {self.SCAN['interval']}")
        if self.SCAN['grid_size'] < 2 or self.SCAN['workers'] < 1:
            raise ValueError("Scan needs grid_size >= 2 and workers >= 1")

    def get_integrator_config(self) -> Dict[str, Any]:
        """Keyword arguments for scipy.integrate.solve_ivp"""
        return {
            'method': self.INTEGRATOR['method'],
            'rtol': self.INTEGRATOR['rtol'],
            'atol': self.INTEGRATOR['atol'],
        }

    def get_scan_config(self) -> Dict[str, Any]:
        return {
            **self.SCAN,
            'tol': self.SIGMA_TOL,
            'confirm_tol': self.SIGMA_CONFIRM_TOL,
        }

    def get_estimates_config(self) -> Dict[str, Any]:
        return {**self.ESTIMATES, 'sector_half_angle': self.SECTOR_HALF_ANGLE}

    def get_tolerances(self) -> Dict[str, float]:
        return {
            'monic': self.MONIC_TOL,
            'root_gap': self.ROOT_GAP_TOL,
            'root_agreement': self.ROOT_AGREEMENT_TOL,
            'decay_re_threshold': self.DECAY_RE_THRESHOLD,
            'sigma': self.SIGMA_TOL,
            'sigma_confirm': self.SIGMA_CONFIRM_TOL,
            'jet_residual': self.JET_RESIDUAL_TOL,
            'abel': self.ABEL_TOL,
            'adjoint_residual': self.ADJOINT_RESIDUAL_TOL,
            'gauge': self.GAUGE_TOL,
            'frame': self.FRAME_TOL,
        }

    def with_overrides(self, **overrides) -> 'HsolvConfig':
        """Validated copy with selected fields replaced (used for CLI flags)"""
        return dataclasses.replace(self, **overrides)

    def export_config(self) -> Dict[str, Any]:
        """Echo embedded verbatim into every report"""
        return {
            'version': self.SCHEMA_VERSION,
            'timestamp': datetime.now().isoformat(),
            'window': list(self.WINDOW),
            'grid_points': self.GRID_POINTS,
            'gamma_min': self.GAMMA_MIN,
            'integrator': self.get_integrator_config(),
            'transport_segment': self.TRANSPORT_SEGMENT,
            'terminal_extension': self.TERMINAL_EXTENSION,
            'sector_half_angle': self.SECTOR_HALF_ANGLE,
            'tolerances': self.get_tolerances(),
            'scan': {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.SCAN.items()},
            'estimates': dict(self.ESTIMATES),
        }


# Create global config instance
config = HsolvConfig()
