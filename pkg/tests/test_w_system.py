import numpy as np
import pytest

from algebra.parser import parse_operator
from asymptotics.frame import build_frame
from asymptotics.gauge import exponents, reduced_system
from kernel.w_system import WSystem, build_chain, integrate_w, reduction_of_order
from realization.coefficients import coefficient_table
from realization.ode_realization import realize
from utils.errors import BoundViolationError, ValidationError, VanishingComponentError
from tests.conftest import HERMITE


def diagonal_system(rates=(2.0, -2.0)):
    """B = diag(λ) exactly, so 𝓡 ≡ 0"""
    rates = np.asarray(rates, dtype=complex)

    def lambdas(t):
        return rates * t

    return WSystem(n=len(rates), leading=len(rates) - 1, lambdas=lambdas,
                   matrix=lambda t: np.diag(lambdas(t)))


def test_tracked_slot_stays_put_without_residual(small_cfg):
    system = diagonal_system()
    trajectory = integrate_w(system, 6.0, 2.0, [0.0, 1.0], small_cfg)
    assert trajectory.bound_ratio == pytest.approx(1.0, abs=1e-8)
    assert trajectory(2.0) == pytest.approx([0.0, 1.0], abs=1e-10)
    assert trajectory.s[0] == pytest.approx(2.0)


def test_residual_of_diagonal_system_vanishes():
    system = diagonal_system()
    assert np.allclose(system.residual(3.0), 0.0)
    assert system.lambda_tilde(3.0) == pytest.approx([12.0, 0.0])


def test_backward_integration_needs_decreasing_positive_span(small_cfg):
    system = diagonal_system()
    with pytest.raises(ValidationError):
        integrate_w(system, 2.0, 6.0, [0.0, 1.0], small_cfg)
    with pytest.raises(ValidationError):
        integrate_w(system, 6.0, 0.0, [0.0, 1.0], small_cfg)


def test_growth_beyond_gronwall_bound_is_reported(small_cfg):
    # B = 0, λ = (0, -5): 𝓡 = diag(0, 5) and w decays backward, so the bound is attained at T
    system = WSystem(n=2, leading=1, lambdas=lambda t: np.array([0.0, -5.0], dtype=complex),
                     matrix=lambda t: np.zeros((2, 2), dtype=complex))
    trajectory = integrate_w(system, 3.0, 2.0, [0.0, 1.0], small_cfg)
    assert trajectory.bound_ratio <= 1.0 + 1e-8

    tight = small_cfg.with_overrides(W_BOUND_SLACK=1e-3)
    with pytest.raises(BoundViolationError):
        integrate_w(system, 3.0, 2.0, [0.0, 1.0], tight)


def test_vanishing_tracked_component(small_cfg):
    system = diagonal_system()
    trajectory = integrate_w(system, 6.0, 2.0, [1.0, 0.0], small_cfg, check_bound=False)
    with pytest.raises(VanishingComponentError):
        reduction_of_order(system, trajectory, np.linspace(2.0, 6.0, 10))


def test_one_dimensional_level_has_no_reduction(small_cfg):
    system = diagonal_system(rates=(1.0,))
    trajectory = integrate_w(system, 6.0, 2.0, [1.0], small_cfg)
    with pytest.raises(ValidationError):
        reduction_of_order(system, trajectory, np.linspace(2.0, 6.0, 10))


def test_chain_recovers_unit_vectors_for_diagonal_system(small_cfg):
    chain = build_chain(diagonal_system((3.0, 1.0, -2.0)), (2.0, 6.0), small_cfg)
    for index in range(3):
        x = chain.solution(index)
        expected = np.eye(3)[index]
        for s in (2.0, 4.0, 6.0):
            assert x(s) == pytest.approx(expected, abs=1e-9)
    assert len(chain.levels) == 3
    assert chain.level_of(0) == 2
    with pytest.raises(ValidationError):
        chain.level_of(3)
    assert all(ratio == pytest.approx(0.0, abs=1e-9) for ratio in chain.g_bound_ratio.values())


def test_coupled_system_lifts_dominant_solution(small_cfg):
    """Upper-triangular coupling: the dominant solution picks up a bounded correction"""
    rates = np.array([1.0, -1.0], dtype=complex)

    def lambdas(t):
        return rates * t

    def matrix(t):
        return np.diag(lambdas(t)) + np.array([[0.0, 1.0 / t ** 2], [0.0, 0.0]])

    system = WSystem(n=2, leading=1, lambdas=lambdas, matrix=matrix)
    chain = build_chain(system, (2.0, 6.0), small_cfg)
    x0 = chain.solution(0)
    # B[-1, :-1] = 0, so the lift adds nothing to the dominant solution
    assert x0(4.0) == pytest.approx([1.0, 0.0], abs=1e-9)
    x1 = chain.solution(1)
    # recessive: w₀' = (2t) w₀ + 1/t² backward from w₀(6) = 0 stays small
    assert abs(x1(6.0)[1]) == pytest.approx(1.0)
    assert abs(x1(2.0)[0]) < 0.1


@pytest.fixture(scope='module')
def hermite_system():
    """w-system of ∂² - t² tracking the recessive index"""
    table = coefficient_table(realize(parse_operator(HERMITE), 1))
    return reduced_system(exponents(table, build_frame(table.roots), None))


def test_terminal_point_refinement(hermite_system):
    near = integrate_w(hermite_system, 20.0, 5.0, [0.0, 1.0])
    far = integrate_w(hermite_system, 40.0, 5.0, [0.0, 1.0])
    ts = np.linspace(5.0, 20.0, 31)
    gap = max(np.linalg.norm(near(t) - far(t)) for t in ts)
    assert gap <= 1.0 / 20.0


def test_off_slot_component_decays_like_inverse_t(hermite_system):
    trajectory = integrate_w(hermite_system, 40.0, 10.0, [0.0, 1.0])
    ts = np.linspace(10.0, 40.0, 61)
    assert max(t * abs(trajectory(t)[0]) for t in ts) <= 1.0
    assert trajectory.bound_ratio <= 1.0 + 1e-6


def test_chain_starts_past_the_window(hermite_system, small_cfg):
    chain = build_chain(hermite_system, (2.0, 6.0), small_cfg)
    tracked = chain.tracked(0)
    assert chain.terminal == pytest.approx(6.0 * small_cfg.TERMINAL_EXTENSION)
    assert tracked.s[-1] == pytest.approx(chain.terminal)
    assert tracked.s[0] == pytest.approx(2.0)
