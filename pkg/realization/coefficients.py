"""
Coefficient tables d_{l,j}, e_{l,j,m}, ε_j and companion matrices of a realization

A grade-l monomial c t^a ∂^j is matched against t^{l-j}(d_{l,j} + Σ_m e_{l,j,m} t^{-2m}),
so a = l - j - 2m.  Tables are normalized by the ∂^n coefficient, which makes the
top symbol Σ_j d_{n,j} z^j monic.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple, Any

import numpy as np
import sympy

from algebra.roots import roots_of_symbol
from realization.ode_realization import OdeRealization
from utils.errors import CoefficientMatchError, NonGenericError, ValidationError

logger = logging.getLogger(__name__)

Number = Any  # exact sympy value or Python complex


def _c(value: Number) -> complex:
    return complex(value) if not isinstance(value, sympy.Basic) else complex(sympy.N(value, 17))


@dataclass(frozen=True)
class CoeffTable:
    """Normalized coefficient table of one realization"""

    n: int
    d: Dict[Tuple[int, int], Number]
    e: Dict[Tuple[int, int, int], Number]
    roots: Tuple[complex, ...]
    sign: int = 1
    adjoint: bool = False
    angle: float = 0.0

    # ---- numeric views -------------------------------------------------

    @cached_property
    def dc(self) -> Dict[Tuple[int, int], complex]:
        return {k: _c(v) for k, v in self.d.items()}

    @cached_property
    def ec(self) -> Dict[Tuple[int, int, int], complex]:
        return {k: _c(v) for k, v in self.e.items()}

    def d_value(self, l: int, j: int) -> complex:
        return self.dc.get((l, j), 0j)

    def e_value(self, l: int, j: int, m: int) -> complex:
        return self.ec.get((l, j, m), 0j)

    @cached_property
    def q_terms(self) -> Dict[int, List[Tuple[int, int, complex]]]:
        """Q_j as monomials (a, b, c) meaning c / (γ^a t^b)"""
        out: Dict[int, List[Tuple[int, int, complex]]] = {j: [] for j in range(self.n + 1)}
        for (l, j), value in self.dc.items():
            shift = self.n - l
            out[j].append((shift, shift, value))
        for (l, j, m), value in self.ec.items():
            shift = self.n - l
            out[j].append((shift, shift + 2 * m, value))
        return out

    @cached_property
    def eps(self) -> Dict[int, Tuple[Tuple[int, int, complex], ...]]:
        """ε_j: the part of Q_j beyond d_{n,j} + d_{n-1,j}/(γt) + (e_{n,j,1} + d_{n-2,j}/γ²)/t²"""
        principal = {(0, 0), (1, 1), (0, 2), (2, 2)}
        return {j: tuple((a, b, c) for a, b, c in terms if (a, b) not in principal)
                for j, terms in self.q_terms.items()}

    def symbol_coefficients(self) -> List[complex]:
        return [self.d_value(self.n, j) for j in range(self.n + 1)]

    def vieta_defect(self) -> complex:
        """d_{n,n-1} + Σγ_j, zero for a consistent table"""
        return self.d_value(self.n, self.n - 1) + sum(self.roots)

    def a_coefficients(self, gamma: Optional[complex]) -> np.ndarray:
        """a_k = -d_{n-1,k-1}/γ (k = 1..n, stored 0-based)"""
        if gamma is None:
            return np.zeros(self.n, dtype=complex)
        return np.array([-self.d_value(self.n - 1, k) / gamma for k in range(self.n)])

    def b_coefficients(self, gamma: Optional[complex]) -> np.ndarray:
        """b_k = -(e_{n,k-1,1} + d_{n-2,k-1}/γ²) (stored 0-based)"""
        inv2 = 0.0 if gamma is None else 1.0 / complex(gamma) ** 2
        return np.array([-(self.e_value(self.n, k, 1) + self.d_value(self.n - 2, k) * inv2)
                         for k in range(self.n)])

    def to_records(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'd': [{'l': l, 'j': j, 'value': [_c(v).real, _c(v).imag]} for (l, j), v in sorted(self.d.items())],
            'e': [{'l': l, 'j': j, 'm': m, 'value': [_c(v).real, _c(v).imag]}
                  for (l, j, m), v in sorted(self.e.items())],
            'roots': [[z.real, z.imag] for z in self.roots],
        }


def coefficient_table(R: OdeRealization, cfg=None) -> CoeffTable:
    """Exact table extraction; every monomial must land in a d or e slot"""
    if R.lead == 0:
        raise NonGenericError("realized operator has no ∂^n term; the top symbol is not monic")
    d: Dict[Tuple[int, int], sympy.Expr] = {}
    e: Dict[Tuple[int, int, int], sympy.Expr] = {}
    for l, a, j, coeff in R.terms:
        excess = l - j - a
        if excess < 0 or excess % 2:
            raise CoefficientMatchError(
                f"monomial t^{a} ∂^{j} in grade {l} fits no slot of t^{{l-j}}(d + Σ e t^-2m)")
        value = sympy.expand(coeff / R.lead)
        m = excess // 2
        if m == 0:
            d[(l, j)] = value
        else:
            e[(l, j, m)] = value
    if d.get((R.n, R.n)) != 1:
        raise CoefficientMatchError("normalized ∂^n coefficient is not 1")
    top = [_c(d.get((R.n, j), 0)) for j in range(R.n + 1)]
    roots = roots_of_symbol(top, cfg)
    table = CoeffTable(n=R.n, d=d, e=e, roots=roots, sign=R.sign, adjoint=R.adjoint)
    logger.debug(f"📋 Coefficient table: {len(d)} d-entries, {len(e)} e-entries, "
                 f"Vieta defect {abs(table.vieta_defect()):.2e}")
    return table


def eval_Q(table: CoeffTable, j: int, t: complex, gamma: Optional[complex]) -> complex:
    """Q_j(t, γ) = Σ c/(γ^a t^b); γ = None means γ = ∞"""
    if t == 0:
        raise ValidationError("Q_j is only defined away from t = 0")
    total = 0j
    for a, b, c in table.q_terms[j]:
        if a and gamma is None:
            continue
        total += c / ((1.0 if a == 0 else complex(gamma) ** a) * complex(t) ** b)
    return total


def decompose_Q(table: CoeffTable, j: int, t: complex, gamma: complex) -> Dict[str, complex]:
    """The four pieces d_{n,j}, d_{n-1,j}/(γt), (e_{n,j,1} + d_{n-2,j}/γ²)/t², ε_j"""
    n = table.n
    t = complex(t)
    gamma = complex(gamma)
    eps = sum(c / (gamma ** a * t ** b) for a, b, c in table.eps[j])
    return {
        'principal': table.d_value(n, j),
        'first': table.d_value(n - 1, j) / (gamma * t),
        'second': (table.e_value(n, j, 1) + table.d_value(n - 2, j) / gamma ** 2) / t ** 2,
        'eps': complex(eps),
    }


@dataclass(frozen=True)
class CompanionMatrix:
    """u' = A u for u = (f, f', ..., f^{(n-1)}); A is polynomial in t"""

    table: CoeffTable

    @property
    def n(self) -> int:
        return self.table.n

    def last_row_polynomials(self, gamma: Optional[complex]) -> List[np.polynomial.Polynomial]:
        """-t^{n-j} Q_j(t, γ) as polynomials in t, j = 0..n-1"""
        n = self.n
        rows = []
        for j in range(n):
            coeffs = np.zeros(n + 1, dtype=complex)
            for a, b, c in self.table.q_terms[j]:
                if a and gamma is None:
                    continue
                power = n - j - b
                if power < 0:
                    raise CoefficientMatchError(f"negative t-power in t^{n - j} Q_{j}")
                coeffs[power] -= c / (1.0 if a == 0 else complex(gamma) ** a)
            rows.append(np.polynomial.Polynomial(coeffs))
        return rows

    def polynomial_matrix(self, gamma: Optional[complex]) -> List[List[np.polynomial.Polynomial]]:
        n = self.n
        zero = np.polynomial.Polynomial([0j])
        one = np.polynomial.Polynomial([1 + 0j])
        rows = [[one if k == i + 1 else zero for k in range(n)] for i in range(n - 1)]
        rows.append(self.last_row_polynomials(gamma))
        return rows

    def A(self, t: complex, gamma: Optional[complex]) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n), dtype=complex)
        out[np.arange(n - 1), np.arange(1, n)] = 1.0
        out[-1, :] = [p(t) for p in self.last_row_polynomials(gamma)]
        return out

    def A_builder(self, gamma: Optional[complex]):
        """Fast evaluator t -> A(t, γ) with the polynomial rows precomputed"""
        n = self.n
        coeffs = np.array([p.coef for p in self.last_row_polynomials(gamma)])   # (n, n+1)
        powers = np.arange(coeffs.shape[1])
        base = np.zeros((n, n), dtype=complex)
        base[np.arange(n - 1), np.arange(1, n)] = 1.0

        def evaluate(t: complex) -> np.ndarray:
            out = base.copy()
            out[-1, :] = coeffs @ (complex(t) ** powers)
            return out

        return evaluate

    def A0(self, t: complex) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n), dtype=complex)
        out[np.arange(n - 1), np.arange(1, n)] = 1.0
        out[-1, :] = [-complex(t) ** (n - j) * self.table.d_value(n, j) for j in range(n)]
        return out

    def Q(self, j: int, t: complex, gamma: Optional[complex]) -> complex:
        return eval_Q(self.table, j, t, gamma)

    def scaled(self, t: complex, gamma: Optional[complex]) -> np.ndarray:
        """D_t^{-1} A D_t with D_t = diag(t^k): super-diagonal t, last row -t Q_j"""
        n = self.n
        out = np.zeros((n, n), dtype=complex)
        out[np.arange(n - 1), np.arange(1, n)] = t
        out[-1, :] = [-complex(t) * eval_Q(self.table, j, t, gamma) for j in range(n)]
        return out

    def trace(self, t: complex, gamma: Optional[complex]) -> complex:
        return -complex(t) * eval_Q(self.table, self.n - 1, t, gamma)

    def error_rows(self, t: complex, gamma: complex) -> Dict[str, np.ndarray]:
        """Last rows of the three error blocks; their sum is the last row of A - A₀"""
        n = self.n
        t = complex(t)
        a = self.table.a_coefficients(gamma)
        b = self.table.b_coefficients(gamma)
        e1 = np.array([a[k] * t ** (n - 1 - k) for k in range(n)])
        e2 = np.array([b[k] * t ** (n - 2 - k) for k in range(n)])
        e3 = np.array([-t ** (n - k) * sum(c / (complex(gamma) ** p * t ** q)
                                            for p, q, c in self.table.eps[k])
                       for k in range(n)])
        return {'E1': e1, 'E2': e2, 'E3': e3}


def companion(R: OdeRealization, cfg=None) -> CompanionMatrix:
    return CompanionMatrix(coefficient_table(R, cfg))

