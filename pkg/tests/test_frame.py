import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymptotics.frame import build_frame
from utils.errors import RootCollisionError
from tests.conftest import root_sets

SAMPLE_TIMES = st.sampled_from([0.5, 1.0, 2.0, 10.0])


def principal_companion(roots, t):
    """A₀(t) for the monic symbol with the given roots"""
    coeffs = np.poly(roots)[::-1]
    n = len(roots)
    A0 = np.zeros((n, n), dtype=complex)
    A0[np.arange(n - 1), np.arange(1, n)] = 1.0
    A0[-1, :] = [-t ** (n - j) * coeffs[j] for j in range(n)]
    return A0


def relative(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1.0)


@settings(max_examples=100, deadline=None)
@given(root_sets, SAMPLE_TIMES)
def test_frame_diagonalizes_principal_part(roots, t):
    frame = build_frame(roots)
    S0 = frame.S0(t)
    assert relative(principal_companion(roots, t) @ S0, S0 @ frame.Lambda0(t)) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(root_sets, SAMPLE_TIMES)
def test_determinant_scales_with_t(roots, t):
    frame = build_frame(roots)
    n = len(roots)
    vandermonde = np.prod([roots[j] - roots[i] for i, j in itertools.combinations(range(n), 2)])
    assert frame.det_S0(t) == pytest.approx(t ** (n * (n - 1) // 2) * vandermonde, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(root_sets, SAMPLE_TIMES)
def test_inverse_scales_by_columns(roots, t):
    frame = build_frame(roots)
    n = len(roots)
    scaled = np.linalg.inv(frame.S0(1.0)) * (t ** (-np.arange(n)))[None, :]
    assert relative(frame.S0_inv(t), scaled) <= 1e-10
    defect = np.linalg.norm(frame.S0_inv(t) @ frame.S0(t) - np.eye(n))
    assert defect <= 1e-13 * np.linalg.cond(frame.S0_1) + 1e-12




def test_k_is_t_times_log_derivative():
    frame = build_frame((1.0, -1.0))
    assert frame.K == pytest.approx(np.array([[0.5, -0.5], [-0.5, 0.5]]))
    t, h = 2.0, 1e-6
    derivative = (frame.S0(t + h) - frame.S0(t - h)) / (2 * h)
    assert t * frame.S0_inv(t) @ derivative == pytest.approx(frame.K, abs=1e-6)


def test_colliding_roots_are_rejected():
    with pytest.raises(RootCollisionError):
        build_frame((1.0, 1.0 + 1e-12))
