"""
Noncommutative polynomials in the two Heisenberg generators X and Y
Coefficients are kept as exact sympy numbers (Gaussian rationals when possible)
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple, Union, Any

import sympy

from utils.errors import ValidationError

logger = logging.getLogger(__name__)

NCWord = str  # letters over 'XY'; '' is the identity
ALPHABET = ('X', 'Y')

Scalar = Union[int, float, complex, sympy.Expr, str]


def to_exact(value: Scalar) -> sympy.Expr:
    """Exact sympy number for a Python/sympy scalar; floats keep their decimal repr"""
    if isinstance(value, sympy.Basic):
        return sympy.nsimplify(value) if value.has(sympy.Float) else sympy.expand(value)
    if isinstance(value, bool):
        return sympy.Integer(int(value))
    if isinstance(value, int):
        return sympy.Integer(value)
    if isinstance(value, float):
        return sympy.Rational(repr(value))
    if isinstance(value, complex):
        return sympy.Rational(repr(value.real)) + sympy.I * sympy.Rational(repr(value.imag))
    if isinstance(value, str):
        return sympy.Rational(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


def to_complex(value: sympy.Expr) -> complex:
    return complex(sympy.N(value, 17))


def encode_coeff(value: sympy.Expr) -> List[float]:
    z = to_complex(value)
    return [z.real, z.imag]


def validate_word(word: NCWord) -> NCWord:
    if any(letter not in ALPHABET for letter in word):
        raise ValidationError(f"word {word!r} uses letters outside {''.join(ALPHABET)}")
    return word


def _word_key(item: Tuple[NCWord, Any]):
    return (len(item[0]), item[0])


@dataclass(frozen=True)
class NCPolynomial:
    """Graded polynomial Σ c_w w over words w in X, Y; zero coefficients are never stored"""

    items: Tuple[Tuple[NCWord, sympy.Expr], ...] = ()

    @classmethod
    def from_terms(cls, terms: Union[Dict[NCWord, Scalar], Iterable[Tuple[NCWord, Scalar]]]) -> 'NCPolynomial':
        pairs = terms.items() if isinstance(terms, dict) else terms
        acc: Dict[NCWord, sympy.Expr] = {}
        for word, coeff in pairs:
            validate_word(word)
            acc[word] = acc.get(word, sympy.Integer(0)) + to_exact(coeff)
        kept = []
        for word, coeff in acc.items():
            coeff = sympy.expand(coeff)
            if coeff != 0:
                kept.append((word, coeff))
        return cls(tuple(sorted(kept, key=_word_key)))

    @classmethod
    def zero(cls) -> 'NCPolynomial':
        return cls(())

    @property
    def terms(self) -> Dict[NCWord, sympy.Expr]:
        return dict(self.items)

    @property
    def degree(self) -> int:
        """Max word length with a nonzero coefficient; -1 for the zero polynomial"""
        return max((len(w) for w, _ in self.items), default=-1)

    @property
    def is_zero(self) -> bool:
        return not self.items

    def coefficient(self, word: NCWord) -> sympy.Expr:
        return self.terms.get(word, sympy.Integer(0))

    def grades(self) -> Dict[int, 'NCPolynomial']:
        parts: Dict[int, List[Tuple[NCWord, sympy.Expr]]] = {}
        for word, coeff in self.items:
            parts.setdefault(len(word), []).append((word, coeff))
        return {l: NCPolynomial(tuple(items)) for l, items in parts.items()}

    def __add__(self, other: 'NCPolynomial') -> 'NCPolynomial':
        return NCPolynomial.from_terms(list(self.items) + list(other.items))

    def __neg__(self) -> 'NCPolynomial':
        return NCPolynomial(tuple((w, -c) for w, c in self.items))

    def __sub__(self, other: 'NCPolynomial') -> 'NCPolynomial':
        return self + (-other)

    def __mul__(self, other: Union['NCPolynomial', Scalar]) -> 'NCPolynomial':
        if isinstance(other, NCPolynomial):
            return NCPolynomial.from_terms(
                (u + v, a * b) for u, a in self.items for v, b in other.items
            )
        factor = to_exact(other)
        return NCPolynomial.from_terms((w, c * factor) for w, c in self.items)

    __rmul__ = __mul__

    def flip_y(self) -> 'NCPolynomial':
        """Image under Y -> -Y"""
        return NCPolynomial(tuple((w, c * (-1) ** w.count('Y')) for w, c in self.items))

    def to_records(self) -> List[Dict[str, Any]]:
        return [{'coeff': encode_coeff(c), 'word': w} for w, c in self.items]

    @classmethod
    def from_records(cls, records: Iterable[Dict[str, Any]]) -> 'NCPolynomial':
        return cls.from_terms((r['word'], complex(r['coeff'][0], r['coeff'][1])) for r in records)

    def __str__(self) -> str:
        if not self.items:
            return '0'
        chunks = []
        for word, coeff in self.items:
            text = _format_coeff(coeff)
            body = _format_word(word)
            if not body:
                chunks.append(text)
            elif text == '1':
                chunks.append(body)
            elif text == '-1':
                chunks.append('-' + body)
            else:
                chunks.append(f"{text}*{body}")
        return ' + '.join(chunks).replace('+ -', '- ')


def _format_coeff(coeff: sympy.Expr) -> str:
    re_part, im_part = sympy.re(coeff), sympy.im(coeff)
    if im_part == 0:
        return sympy.sstr(re_part)
    if re_part == 0:
        return 'i' if im_part == 1 else f"{sympy.sstr(im_part)}i"
    sign = '+' if im_part > 0 else '-'
    return f"({sympy.sstr(re_part)}{sign}{sympy.sstr(abs(im_part))}i)"


def _format_word(word: NCWord) -> str:
    factors = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        run = j - i
        factors.append(word[i] if run == 1 else f"{word[i]}^{run}")
        i = j
    return '*'.join(factors)


def homogeneous_part(P: NCPolynomial, l: int) -> NCPolynomial:
    """Restriction of P to words of length l"""
    if l < 0 or l > P.degree:
        raise ValidationError(f"grade {l} outside 0..{P.degree}")
    return NCPolynomial(tuple((w, c) for w, c in P.items if len(w) == l))


def commutative_symbol(P: NCPolynomial, z: complex, y: complex) -> complex:
    """Σ c_w (iz)^{#X} y^{#Y}; word order does not matter"""
    iz = 1j * complex(z)
    y = complex(y)
    total = 0j
    for word, coeff in P.items:
        total += to_complex(coeff) * iz ** word.count('X') * y ** word.count('Y')
    return total


def symbol_coefficients(P: NCPolynomial, y: int) -> List[sympy.Expr]:
    """Exact coefficients c_k of z^k in P(iz, y), low degree first, for integer y"""
    n = max(P.degree, 0)
    coeffs = [sympy.Integer(0)] * (n + 1)
    for word, coeff in P.items:
        k = word.count('X')
        coeffs[k] += coeff * sympy.I ** k * sympy.Integer(y) ** word.count('Y')
    return [sympy.expand(c) for c in coeffs]
