import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algebra.parser import parse_operator
from algebra.roots import (aberth_roots, characteristic_roots, check_generic, companion_roots,
                           min_gap, order_roots, root_mismatch, rotate_roots)
from utils.errors import NonGenericError, ValidationError
from tests.conftest import CUBIC, HERMITE, ROOTS_ONE_TWO

gaussian_ints = st.builds(complex, st.integers(-4, 4), st.integers(-4, 4))
root_sets = st.lists(gaussian_ints, min_size=2, max_size=4, unique=True)


def low_first(roots):
    return np.poly(roots)[::-1]


@settings(max_examples=40, deadline=None)
@given(root_sets)
def test_aberth_agrees_with_companion(roots):
    coeffs = low_first(roots)
    assert root_mismatch(aberth_roots(coeffs), companion_roots(coeffs)) < 1e-8
    assert root_mismatch(aberth_roots(coeffs), np.array(roots)) < 1e-8


@given(root_sets)
def test_order_is_descending_real_part(roots):
    ordered, perm = order_roots(roots)
    assert [roots[i] for i in perm] == list(ordered)
    for a, b in zip(ordered, ordered[1:]):
        assert a.real > b.real or (a.real == b.real and a.imag > b.imag)


def test_duplicate_roots_cannot_be_ordered():
    with pytest.raises(ValidationError):
        order_roots([1.0, 1.0, 2.0])


def test_characteristic_roots_of_examples():
    assert characteristic_roots(parse_operator(CUBIC)) == pytest.approx((2, 1, -1))
    assert characteristic_roots(parse_operator(HERMITE)) == pytest.approx((1, -1))
    assert characteristic_roots(parse_operator(ROOTS_ONE_TWO)) == pytest.approx((2, 1))


def test_imaginary_roots_are_ordered_by_imaginary_part():
    roots = characteristic_roots(parse_operator("-X^2 + Y^2"))
    assert roots == pytest.approx((1j, -1j))


def test_vanishing_top_symbol_is_not_generic():
    with pytest.raises(NonGenericError):
        characteristic_roots(parse_operator("X*Y - Y*X"))


def test_genericity_report():
    report = check_generic(parse_operator(CUBIC))
    assert report.is_generic
    assert abs(report.monic_defect) < 1e-12
    assert report.min_root_gap == pytest.approx(1.0)

    commutator = check_generic(parse_operator("X*Y - Y*X"))
    assert not commutator.is_generic
    assert commutator.reasons


def test_non_monic_operator_is_not_generic():
    report = check_generic(parse_operator("-2*X^2 - Y^2"))
    assert not report.is_generic
    assert report.monic_defect == pytest.approx(1.0)


def test_genericity_needs_degree_two():
    with pytest.raises(ValidationError):
        check_generic(parse_operator("X + Y"))


def test_rotation_turns_roots():
    rotated = rotate_roots((1.0, -1.0), np.pi / 4)
    assert rotated == pytest.approx((1j, -1j))


def test_min_gap():
    assert min_gap([0, 3, 1]) == 1
    assert min_gap([5]) == float('inf')
