"""
Normal-ordered ODE realization of the representation X -> i d/dt, Y -> ±t

An operator is a dict {(a, b): c} standing for Σ c t^a ∂^b with every ∂ to the
right of every t.  Grade l of the source polynomial carries weight γ^{-(n-l)}.
"""
import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Any

import numpy as np
import sympy

from algebra.ncpoly import NCPolynomial, to_complex, encode_coeff
from utils.errors import ValidationError

logger = logging.getLogger(__name__)

NormalOrdered = Dict[Tuple[int, int], sympy.Expr]


def compose(left: NormalOrdered, right: NormalOrdered) -> NormalOrdered:
    """Normal-ordered product left ∘ right, using ∂^b t^c = Σ_k C(b,k) c!/(c-k)! t^{c-k} ∂^{b-k}"""
    out: NormalOrdered = {}
    for (a, b), c1 in left.items():
        for (c, d), c2 in right.items():
            for k in range(min(b, c) + 1):
                weight = math.comb(b, k) * math.perm(c, k)
                key = (a + c - k, b - k + d)
                out[key] = out.get(key, sympy.Integer(0)) + c1 * c2 * weight
    return {key: value for key, value in ((k, sympy.expand(v)) for k, v in out.items()) if value != 0}


def word_operator(word: str, sign: int) -> NormalOrdered:
    """Realize a single word, letters applied in written order"""
    letters = {
        'X': {(0, 1): sympy.I},
        'Y': {(1, 0): sympy.Integer(sign)},
    }
    op: NormalOrdered = {(0, 0): sympy.Integer(1)}
    for letter in word:
        op = compose(op, letters[letter])
    return op


@dataclass(frozen=True)
class OdeRealization:
    """Σ_l γ^{-(n-l)} R_l with R_l = P_l(i∂_t, ±t) normal-ordered"""

    n: int
    sign: int
    terms: Tuple[Tuple[int, int, int, sympy.Expr], ...]   # (grade, t-power, d-order, coeff)
    lead: sympy.Expr                                       # coefficient of ∂^n
    adjoint: bool = False

    @property
    def monomials(self) -> Dict[Tuple[int, int, int], sympy.Expr]:
        """(t-power, d-order, grade) -> coefficient of γ^{-(n-grade)}"""
        return {(a, b, l): c for l, a, b, c in self.terms}

    def grade(self, l: int) -> NormalOrdered:
        return {(a, b): c for g, a, b, c in self.terms if g == l}

    @property
    def grades(self) -> Dict[int, NormalOrdered]:
        return {l: self.grade(l) for l in sorted({g for g, _, _, _ in self.terms})}

    def prefactor(self, gamma: complex) -> complex:
        """Scalar (-iγ)^n dropped when passing to the weighted normalization"""
        return (-1j * complex(gamma)) ** self.n

    def weight(self, l: int, gamma: Optional[complex]) -> complex:
        if self.n == l:
            return 1.0
        if gamma is None:      # γ = ∞ keeps only the top grade
            return 0.0
        return complex(gamma) ** (-(self.n - l))

    def evaluate(self, gamma: Optional[complex]) -> Dict[Tuple[int, int], complex]:
        out: Dict[Tuple[int, int], complex] = {}
        for l, a, b, c in self.terms:
            w = self.weight(l, gamma)
            if w != 0:
                out[(a, b)] = out.get((a, b), 0j) + w * to_complex(c)
        return out

    def coefficient_polynomials(self, gamma: Optional[complex]) -> List[np.polynomial.Polynomial]:
        """p_b(t) with the operator equal to Σ_b p_b(t) ∂^b, b = 0..n"""
        max_power = max((a for _, a, _, _ in self.terms), default=0)
        table = np.zeros((self.n + 1, max_power + 1), dtype=complex)
        for (a, b), value in self.evaluate(gamma).items():
            table[b, a] += value
        return [np.polynomial.Polynomial(row) for row in table]

    def apply(self, gamma: Optional[complex], t: complex, jets: Sequence[complex]) -> complex:
        """Σ_b p_b(t) f^{(b)}(t) for a jet (f, f', ..., f^{(n)})"""
        polys = self.coefficient_polynomials(gamma)
        return sum(p(t) * jets[b] for b, p in enumerate(polys))

    def to_records(self) -> List[Dict[str, Any]]:
        return [{'t_power': a, 'd_order': b, 'coeff': encode_coeff(c), 'grade': l}
                for l, a, b, c in self.terms]


def _pack(n: int, sign: int, grades: Dict[int, NormalOrdered], adjoint: bool) -> OdeRealization:
    terms = []
    for l in sorted(grades):
        for (a, b), c in sorted(grades[l].items()):
            terms.append((l, a, b, c))
    lead = grades.get(n, {}).get((0, n), sympy.Integer(0))
    return OdeRealization(n=n, sign=sign, terms=tuple(terms), lead=lead, adjoint=adjoint)


def realize(P: NCPolynomial, sign: int = 1) -> OdeRealization:
    """Realize P as Σ_l γ^{-(n-l)} P_l(i∂_t, ±t)"""
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    n = P.degree
    if n < 1:
        raise ValidationError(f"realization needs degree >= 1, got {n}")
    grades: Dict[int, NormalOrdered] = {}
    for word, coeff in P.items:
        part = grades.setdefault(len(word), {})
        for key, value in word_operator(word, sign).items():
            part[key] = part.get(key, sympy.Integer(0)) + coeff * value
    cleaned = {l: {k: sympy.expand(v) for k, v in part.items() if sympy.expand(v) != 0}
               for l, part in grades.items()}
    R = _pack(n, sign, cleaned, adjoint=False)
    logger.debug(f"🔧 Realized degree-{n} operator (sign {sign:+d}) with {len(R.terms)} monomials")
    return R


def formal_adjoint(R: OdeRealization) -> OdeRealization:
    """Σ (-1)^b ∂^b ∘ (conj(c) t^a ·), grade by grade.

    The adjoint of the operator at parameter γ is this realization at conj(γ).
    """
    grades: Dict[int, NormalOrdered] = {}
    for l, part in R.grades.items():
        acc: NormalOrdered = {}
        for (a, b), c in part.items():
            piece = compose({(0, b): sympy.Integer((-1) ** b)}, {(a, 0): sympy.conjugate(c)})
            for key, value in piece.items():
                acc[key] = acc.get(key, sympy.Integer(0)) + value
        grades[l] = {k: sympy.expand(v) for k, v in acc.items() if sympy.expand(v) != 0}
    return _pack(R.n, R.sign, grades, adjoint=not R.adjoint)


def adjoint_parameter(gamma: complex) -> complex:
    return complex(gamma).conjugate()
