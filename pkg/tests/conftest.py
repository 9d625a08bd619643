import os
import sys

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from algebra.ncpoly import NCPolynomial  # noqa: E402
from config import config  # noqa: E402

# ∂² - t², roots (1, -1)
HERMITE = "-X^2 - Y^2"
# ∂² - 3t∂ + 2t² - 3, roots (2, 1)
ROOTS_ONE_TWO = "-X^2 + 3i*X*Y + 2*Y^2"
# z³ - 2z² - z + 2, roots (2, 1, -1)
CUBIC = "i*X^3 + 2*X^2*Y + i*X*Y^2 + 2*Y^3"


@pytest.fixture
def small_cfg():
    """Reduced grid, window and scan so the numerical tests stay quick"""
    return config.with_overrides(
        GRID_POINTS=120,
        WINDOW=(2.0, 6.0),
        SCAN={'grid_size': 4, 'interval': (1.0, 3.0), 'refine_factor': 2,
              'refine_rounds': 1, 'workers': 1},
        ESTIMATES={'alpha0': 2.0, 't_max': 6.0, 'grid_step': 1.0, 'sweep_points': 3,
                   'extension_factor': 2.0, 'extra_orders': 1},
    )


def operator_with_roots(roots, lower=None):
    """Homogeneous P_n with P_n(iz, 1) = Π(z - γ_j), plus optional lower-grade words"""
    coeffs = np.poly(roots)[::-1]
    n = len(roots)
    terms = {'X' * j + 'Y' * (n - j): complex(np.round(coeffs[j], 12)) / 1j ** j for j in range(n + 1)}
    terms.update(lower or {})
    return NCPolynomial.from_terms(terms)


# distinct roots on the half-integer Gaussian lattice, gap ≥ 0.5
half_gaussian = st.builds(lambda a, b: complex(a / 2, b / 2), st.integers(-4, 4), st.integers(-4, 4))
root_sets = st.lists(half_gaussian, min_size=2, max_size=6, unique=True)
