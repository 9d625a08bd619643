import numpy as np
import pytest
import sympy
from hypothesis import given, settings

from algebra.parser import parse_operator
from realization.coefficients import (CompanionMatrix, coefficient_table, companion, decompose_Q,
                                      eval_Q)
from realization.ode_realization import OdeRealization, realize
from utils.errors import CoefficientMatchError, NonGenericError, ValidationError
from tests.conftest import CUBIC, HERMITE, ROOTS_ONE_TWO, operator_with_roots, root_sets


@pytest.fixture
def one_two_table():
    return coefficient_table(realize(parse_operator(ROOTS_ONE_TWO), 1))


def test_hermite_table():
    table = coefficient_table(realize(parse_operator(HERMITE), 1))
    assert table.d == {(2, 2): 1, (2, 0): -1}
    assert table.e == {}
    assert table.roots == pytest.approx((1, -1))


def test_roots_one_two_table(one_two_table):
    table = one_two_table
    assert table.d == {(2, 2): 1, (2, 1): -3, (2, 0): 2}
    assert table.e == {(2, 0, 1): -3}
    assert table.roots == pytest.approx((2, 1))
    assert abs(table.vieta_defect()) < 1e-12


def test_vieta_for_cubic():
    table = coefficient_table(realize(parse_operator(CUBIC), 1))
    assert table.d_value(3, 2) == pytest.approx(-sum(table.roots))
    assert abs(table.vieta_defect()) < 1e-12


def test_q_values_and_decomposition(one_two_table):
    assert eval_Q(one_two_table, 0, 2.0, 5.0) == pytest.approx(2 - 3 / 4)
    pieces = decompose_Q(one_two_table, 0, 2.0, 5.0)
    assert pieces['principal'] == pytest.approx(2)
    assert pieces['second'] == pytest.approx(-3 / 4)
    assert pieces['first'] == 0 and pieces['eps'] == 0
    with pytest.raises(ValidationError):
        eval_Q(one_two_table, 0, 0.0, 5.0)


def test_error_coefficients_from_lower_grades():
    table = coefficient_table(realize(parse_operator("-X^2 - Y^2 + X"), 1))
    gamma = 2.0
    # d_{1,1} = i
    assert table.a_coefficients(gamma) == pytest.approx([0, -1j / gamma])
    assert table.a_coefficients(None) == pytest.approx([0, 0])


def test_b_coefficients_pick_up_e_entries(one_two_table):
    assert one_two_table.b_coefficients(3.0) == pytest.approx([3, 0])


def test_companion_matrix(one_two_table):
    comp = CompanionMatrix(one_two_table)
    t = 1.5
    # f'' = (3 - 2t²) f + 3t f'
    assert comp.A(t, 2.0) == pytest.approx(np.array([[0, 1], [3 - 2 * t ** 2, 3 * t]]))
    assert comp.A_builder(2.0)(t) == pytest.approx(comp.A(t, 2.0))
    assert comp.trace(t, 2.0) == pytest.approx(3 * t)
    assert comp.A0(t) == pytest.approx(np.array([[0, 1], [-2 * t ** 2, 3 * t]]))


def test_error_rows_sum_to_a_minus_a0():
    table = coefficient_table(realize(parse_operator("-X^2 + 3i*X*Y + 2*Y^2 + X + 2 + 5*Y"), 1))
    comp = CompanionMatrix(table)
    t, gamma = 2.5, 3.0
    rows = comp.error_rows(t, gamma)
    total = rows['E1'] + rows['E2'] + rows['E3']
    assert total == pytest.approx((comp.A(t, gamma) - comp.A0(t))[-1])


def test_scaled_matrix_is_a_conjugate(one_two_table):
    comp = CompanionMatrix(one_two_table)
    t = 2.0
    D = np.diag(t ** np.arange(2))
    assert comp.scaled(t, 1.0) == pytest.approx(np.linalg.inv(D) @ comp.A(t, 1.0) @ D)


def test_table_is_exact():
    table = coefficient_table(realize(parse_operator("-X^2 - Y^2 + 0.25*X"), 1))
    assert table.d[(1, 1)] == sympy.I / 4


def test_unmatched_monomial_is_rejected():
    R = OdeRealization(n=2, sign=1, terms=((2, 0, 2, sympy.Integer(1)), (2, 1, 0, sympy.Integer(1))),
                       lead=sympy.Integer(1))
    with pytest.raises(CoefficientMatchError):
        coefficient_table(R)


def test_missing_top_derivative_is_not_generic():
    with pytest.raises(NonGenericError):
        coefficient_table(realize(parse_operator("X*Y - Y*X"), 1))


def test_companion_shortcut():
    comp = companion(realize(parse_operator(HERMITE), 1))
    assert comp.n == 2


@settings(max_examples=100, deadline=None)
@given(root_sets)
def test_subleading_coefficient_is_minus_root_sum(roots):
    table = coefficient_table(realize(operator_with_roots(roots), 1))
    n = len(roots)
    assert table.d_value(n, n) == pytest.approx(1.0)
    assert table.d_value(n, n - 1) == pytest.approx(-sum(roots), abs=1e-12)
    assert abs(table.vieta_defect()) <= 1e-9 * (1 + max(abs(z) for z in roots))
