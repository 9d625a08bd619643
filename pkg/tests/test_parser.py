import pytest
import sympy

from algebra.parser import parse_operator, tokenize
from utils.errors import OperatorSyntaxError
from tests.conftest import CUBIC


def test_cubic_example():
    P = parse_operator(CUBIC)
    assert P.degree == 3
    assert P.terms == {'XXX': sympy.I, 'XXY': 2, 'XYY': sympy.I, 'YYY': 2}


def test_adjacent_factors_multiply_in_written_order():
    assert parse_operator("XY - YX").terms == {'XY': 1, 'YX': -1}
    assert parse_operator("X*Y^2*X").terms == {'XYYX': 1}


def test_complex_and_decimal_coefficients():
    P = parse_operator("(1-2i)*X^2 + 0.5*Y + 2i")
    assert P.coefficient('XX') == 1 - 2 * sympy.I
    assert P.coefficient('Y') == sympy.Rational(1, 2)
    assert P.coefficient('') == 2 * sympy.I


def test_leading_sign_and_constant_term():
    P = parse_operator("-X^2 - Y^2 + 3")
    assert P.terms == {'': 3, 'XX': -1, 'YY': -1}


def test_repeated_terms_combine():
    assert parse_operator("X^2 + X*X - 2*X^2").is_zero


@pytest.mark.parametrize("text, position", [
    ("X^2 +", 5),
    ("X^2 + Z", 6),
    ("", 0),
    ("2*", 2),
    ("X^", 2),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(OperatorSyntaxError) as info:
        parse_operator(text)
    assert info.value.position == position
    assert info.value.exit_code == 2


def test_pointer_marks_failure():
    with pytest.raises(OperatorSyntaxError) as info:
        parse_operator("X^2 + Z")
    assert info.value.pointer() == "X^2 + Z\n      ^"


def test_tokens_record_positions():
    kinds = [(tok.kind, tok.position) for tok in tokenize("2*X")]
    assert kinds == [('num', 0), ('*', 1), ('X', 2), ('end', 3)]
