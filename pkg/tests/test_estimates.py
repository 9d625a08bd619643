import math

import numpy as np
import pytest
from scipy.special import dawsn, erfcx

from algebra.parser import parse_operator
from config import config
from kernel.basis import canonical_basis
from utils.errors import ValidationError
from verdicts.estimates import (decay_ratio, estimate_report, growth_ratio, integral_bound_harness,
                                ray_estimate_report)
from tests.conftest import HERMITE


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0, 8.0])
def test_growth_ratio_is_dawson_integral(t):
    # e^{-t²} ∫₀^t e^{s²} ds = F(t)
    assert growth_ratio(1.0, 0.0, 0.0, t) == pytest.approx(dawsn(t) / (1 + t), rel=1e-7)


@pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 8.0])
def test_decay_ratio_is_scaled_erfc(t):
    # e^{t²} ∫_t^∞ e^{-s²} ds = √π/2 erfcx(t)
    assert decay_ratio(1.0, 0.0, 0.0, t) == pytest.approx(math.sqrt(math.pi) / 2 * erfcx(t), rel=1e-7)


def test_growth_ratio_at_origin():
    assert growth_ratio(2.0, 1.0, 1.0, 0.0) == 0.0


def test_harness_is_finite_and_converged(small_cfg):
    for gamma in (0.5, 1.0, 2.0):
        for a in (0.0, 1.0, 2.0):
            report = integral_bound_harness(gamma, 0.0, a, cfg=small_cfg)
            assert report.finite
            assert report.cauchy_defect <= 0.01
            assert report.sweep_factor >= 1.0
            assert len(report.sweep) == small_cfg.ESTIMATES['sweep_points']


def test_harness_with_drift(small_cfg):
    report = integral_bound_harness(0.5, 2.0, 1.0, cfg=small_cfg)
    assert report.finite
    assert set(report.to_record()) >= {'growth_sup', 'decay_sup', 'cauchy_defect', 'sweep_factor'}


@pytest.mark.parametrize("gamma, alpha, a", [(0.0, 0.0, 1.0), (1.0, 0.0, -1.0), (1.0, 5.0, 0.0)])
def test_harness_validates_inputs(gamma, alpha, a, small_cfg):
    with pytest.raises(ValidationError):
        integral_bound_harness(gamma, alpha, a, cfg=small_cfg)


def test_envelope_of_hermite_basis(small_cfg):
    basis = canonical_basis(parse_operator(HERMITE), 1, 2.0, cfg=small_cfg)
    report = estimate_report(basis, small_cfg)
    assert report.passed
    orders = {(e['k'], e['j']) for e in report.entries}
    assert orders == {(k, j) for k in range(2) for j in range(3)}
    assert all(np.isfinite(e['sup']) for e in report.entries)


def test_ray_estimates(small_cfg):
    reports = ray_estimate_report(parse_operator(HERMITE), 1, 2.0, math.pi / 8, cfg=small_cfg)
    assert len(reports) == 3
    h = small_cfg.SECTOR_HALF_ANGLE
    assert [r.ray_angle for r in reports] == pytest.approx([math.pi / 8 - h, math.pi / 8, math.pi / 8 + h])
    assert all(np.isfinite(e['sup']) for r in reports for e in r.entries)


def test_normalized_hermite_solutions_stay_of_unit_size():
    cfg = config.with_overrides(WINDOW=(5.0, 15.0), GRID_POINTS=200)
    basis = canonical_basis(parse_operator(HERMITE), 1, 2.0, cfg=cfg)
    for a in range(len(basis.indices)):
        envelope = np.abs(basis.jets[a, :, 0])
        assert 0.5 <= envelope.max() <= 2.0
        assert envelope.min() >= 0.5
    report = estimate_report(basis, cfg)
    assert report.passed
    assert all(0.5 <= e['sup'] <= 2.0 for e in report.entries if e['j'] == 0)
