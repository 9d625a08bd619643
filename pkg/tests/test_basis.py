import math

import numpy as np
import pytest
from scipy.special import pbdv

from algebra.parser import parse_operator
from kernel.basis import canonical_basis, jet_residuals, transport_to_origin
from utils.errors import ValidationError
from tests.conftest import HERMITE, ROOTS_ONE_TWO

# ψ'(0)/ψ(0) for the solution of ψ'' = t²ψ decaying at +∞: -2Γ(3/4)/Γ(1/4)
DECAYING_LOG_DERIVATIVE_AT_ZERO = -2 * math.gamma(0.75) / math.gamma(0.25)


def decaying_log_derivative(t):
    """ψ'/ψ for ψ(t) = D_{-1/2}(√2 t)"""
    value, derivative = pbdv(-0.5, math.sqrt(2) * t)
    return math.sqrt(2) * derivative / value


@pytest.fixture
def hermite_basis(small_cfg):
    return canonical_basis(parse_operator(HERMITE), 1, 2.0, cfg=small_cfg)


def test_basis_shapes(hermite_basis, small_cfg):
    basis = hermite_basis
    assert basis.is_complete()
    assert basis.jets.shape == (2, small_cfg.GRID_POINTS, 2)
    assert basis.log_scale.shape == (2, small_cfg.GRID_POINTS)
    assert basis.t_grid[0] == pytest.approx(2.0)
    assert len(basis.to_records()) == 2 * small_cfg.GRID_POINTS * 2


def test_jets_follow_their_roots(hermite_basis):
    basis = hermite_basis
    t = basis.t_grid[-1]
    for k, root in enumerate(basis.frame.roots):
        ratio = basis.jets[k, -1, 1] / (t * basis.jets[k, -1, 0])
        assert ratio == pytest.approx(root, abs=0.05)


def test_recessive_solution_matches_parabolic_cylinder(hermite_basis):
    basis = hermite_basis
    for p in (0, len(basis.t_grid) // 2, len(basis.t_grid) - 1):
        t = float(basis.t_grid[p])
        ratio = basis.jets[1, p, 1] / basis.jets[1, p, 0]
        assert ratio == pytest.approx(decaying_log_derivative(t), rel=1e-6)


def test_negative_side_is_the_mirror_image(small_cfg):
    basis = canonical_basis(parse_operator(HERMITE), 1, 2.0, cfg=small_cfg, side=-1)
    assert np.all(basis.t_grid < 0)
    p = len(basis.t_grid) // 2
    t = float(basis.t_grid[p])
    ratio = basis.jets[1, p, 1] / basis.jets[1, p, 0]
    assert ratio == pytest.approx(-decaying_log_derivative(-t), rel=1e-6)


def test_jets_solve_the_companion_system(hermite_basis, small_cfg):
    report = jet_residuals(hermite_basis, small_cfg)
    assert report.passed, report.max_defect
    assert report.defects.shape == (2, small_cfg.GRID_POINTS - 1)


def test_jets_solve_the_companion_system_with_drift(small_cfg):
    basis = canonical_basis(parse_operator(ROOTS_ONE_TWO + " + X + 2*Y"), 1, 2.0, cfg=small_cfg)
    report = jet_residuals(basis, small_cfg)
    assert report.passed, report.max_defect


def test_transport_to_origin(small_cfg):
    basis = canonical_basis(parse_operator(HERMITE), 1, None, cfg=small_cfg, indices=(1,))
    transport = transport_to_origin(basis, small_cfg)
    assert transport.Q.shape == (2, 1)
    assert np.linalg.norm(transport.Q) == pytest.approx(1.0)
    ratio = transport.jets[1, 0] / transport.jets[0, 0]
    assert ratio == pytest.approx(DECAYING_LOG_DERIVATIVE_AT_ZERO, rel=1e-6)


def test_transport_keeps_orthonormal_columns(hermite_basis, small_cfg):
    transport = transport_to_origin(hermite_basis, small_cfg)
    Q = transport.Q
    assert Q.conj().T @ Q == pytest.approx(np.eye(2), abs=1e-10)


def test_ray_basis(small_cfg):
    basis = canonical_basis(parse_operator(HERMITE), 1, 2.0, cfg=small_cfg, ray_angle=math.pi / 16)
    assert np.iscomplexobj(basis.t_grid)
    assert np.all(np.isfinite(basis.jets))
    report = jet_residuals(basis, small_cfg)
    assert report.passed, report.max_defect
    with pytest.raises(ValidationError):
        transport_to_origin(basis, small_cfg)


@pytest.mark.parametrize("kwargs", [
    {'window': (6.0, 2.0)},
    {'indices': (0, 0)},
    {'indices': (2,)},
    {'side': 0},
])
def test_invalid_requests(kwargs, small_cfg):
    with pytest.raises(ValidationError):
        canonical_basis(parse_operator(HERMITE), 1, 2.0, cfg=small_cfg, **kwargs)


def test_gamma_below_validated_region(small_cfg):
    with pytest.raises(ValidationError):
        canonical_basis(parse_operator(HERMITE), 1, 0.1, cfg=small_cfg)
