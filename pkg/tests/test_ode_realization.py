import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from algebra.parser import parse_operator
from realization.ode_realization import (adjoint_parameter, compose, formal_adjoint, realize,
                                         word_operator)
from utils.errors import ValidationError
from tests.conftest import HERMITE, ROOTS_ONE_TWO


def test_commutator_of_derivative_and_t():
    # ∂∘t - t∘∂ = 1
    D, T = {(0, 1): sympy.Integer(1)}, {(1, 0): sympy.Integer(1)}
    left, right = compose(D, T), compose(T, D)
    difference = {k: left.get(k, 0) - right.get(k, 0) for k in set(left) | set(right)}
    assert {k: v for k, v in difference.items() if v != 0} == {(0, 0): 1}


def test_word_operator_applies_letters_in_order():
    # X Y = i∂∘(±t) = ±(i t∂ + i)
    assert word_operator('XY', 1) == {(1, 1): sympy.I, (0, 0): sympy.I}
    assert word_operator('XY', -1) == {(1, 1): -sympy.I, (0, 0): -sympy.I}


def test_hermite_realization():
    R = realize(parse_operator(HERMITE), 1)
    assert R.n == 2
    assert R.lead == 1
    assert R.evaluate(2.0) == {(0, 2): 1, (2, 0): -1}


def test_roots_one_two_realization():
    R = realize(parse_operator(ROOTS_ONE_TWO), 1)
    values = R.evaluate(None)
    assert values == pytest.approx({(0, 2): 1, (1, 1): -3, (2, 0): 2, (0, 0): -3})


def test_lower_grades_carry_gamma_weights():
    R = realize(parse_operator("-X^2 - Y^2 + X + 1"), 1)
    gamma = 4.0
    values = R.evaluate(gamma)
    assert values[(0, 1)] == pytest.approx(1j / gamma)
    assert values[(0, 0)] == pytest.approx(1 / gamma ** 2)
    assert (0, 1) not in R.evaluate(None)


def test_apply_matches_coefficient_polynomials():
    R = realize(parse_operator(HERMITE), 1)
    t = 1.5
    # f = e^{t²/2}: f'' - t² f = f
    f = np.exp(t ** 2 / 2)
    jets = [f, t * f, (1 + t ** 2) * f]
    assert R.apply(1.0, t, jets) == pytest.approx(f)


def test_formal_adjoint_of_xy():
    # (i∂∘t)* = t∘(i∂) = i t∂
    R = realize(parse_operator("X*Y + Y*X"), 1)
    adj = formal_adjoint(R)
    assert adj.adjoint
    assert adj.evaluate(None) == pytest.approx(R.evaluate(None))

    single = formal_adjoint(realize(parse_operator("X^2 + X*Y"), 1))
    assert single.evaluate(None) == pytest.approx({(0, 2): -1, (1, 1): 1j})


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_adjoint_is_an_involution(a, b, c):
    P = parse_operator(f"-X^2 + ({a}{b:+d}i)*X*Y {c:+d}*Y^2 + X")
    R = realize(P, 1)
    twice = formal_adjoint(formal_adjoint(R))
    assert twice.terms == R.terms


def test_adjoint_parameter_conjugates():
    assert adjoint_parameter(2 + 1j) == 2 - 1j


def test_realize_validates_sign_and_degree():
    with pytest.raises(ValidationError):
        realize(parse_operator(HERMITE), 2)
    with pytest.raises(ValidationError):
        realize(parse_operator("3"), 1)
