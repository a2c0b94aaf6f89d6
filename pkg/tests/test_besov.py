import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixent.besov import (BlockModel, SmoothnessParams, besov_upper_pipeline,
                          block_operator_norm, fit_rate_slope, fit_slope, geometric_grid,
                          minimal_m0, route, tail_sum)
from mixent.core import INF
from mixent.rates import HypothesisError

HEADLINE = SmoothnessParams.from_gap(0.4, 2, 2, 1, INF)


def test_block_norm_examples():
    assert block_operator_norm(HEADLINE, 0) == 1
    assert block_operator_norm(HEADLINE, 10) == pytest.approx(0.0625)
    p = SmoothnessParams.from_gap(0.6, 1, 2, 1, INF)
    assert p.decay == pytest.approx(0.1)


def test_tail_is_geometric():
    delta = HEADLINE.decay
    rho = HEADLINE.rho
    direct = sum(2 ** (-rho * mu * delta) for mu in range(21, 4000))
    assert tail_sum(HEADLINE, 20) == pytest.approx(direct, rel=1e-9)


def test_block_model():
    model = BlockModel(3)
    assert model.dims([0, 1, 4]) == [(1, 1), (4, 2), (25, 16)]
    assert model.dominance_level() >= 0


def test_power_law_fit():
    ms = geometric_grid(64, 16384)
    assert fit_rate_slope(lambda m: m ** -0.4, ms) == pytest.approx(-0.4, abs=1e-12)
    with pytest.raises(ValueError):
        fit_slope([1, 2, 3], [1, 2, 3])


def test_pipeline_value_and_m0():
    res = besov_upper_pipeline(HEADLINE, 1024)
    assert res.index == 2048
    assert 0 < res.value < math.inf
    assert res.tail < res.low + res.middle
    m0 = minimal_m0(HEADLINE)
    besov_upper_pipeline(HEADLINE, m0)
    with pytest.raises(HypothesisError):
        besov_upper_pipeline(HEADLINE, m0 - 1)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_headline_slope(n):
    params = SmoothnessParams.from_gap(0.4, 2, 2, 1, INF, n=n)
    slope = fit_rate_slope(params, geometric_grid(64, 16384))
    assert slope == pytest.approx(-0.4, abs=0.15)


def test_monotone_in_m():
    vals = [besov_upper_pipeline(HEADLINE, m).value for m in geometric_grid(64, 16384, 2)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_flavors():
    base = besov_upper_pipeline(HEADLINE, 1024).value
    for flavor in ("b->f", "f->b"):
        assert besov_upper_pipeline(HEADLINE, 1024, flavor).value > 0
        assert route(HEADLINE, flavor).flavor == flavor
    assert base > 0
    with pytest.raises(HypothesisError):
        route(HEADLINE, "f->f")


def test_noncompact_rejected():
    params = SmoothnessParams.from_gap(0.5, 1, 2, 0.5, 2)
    assert not params.is_small_smoothness
    with pytest.raises(HypothesisError):
        besov_upper_pipeline(params, 1024)


@given(st.floats(0.05, 0.9), st.integers(2, 5))
def test_gap_tracks_slope(gap, n):
    params = SmoothnessParams.from_gap(gap, 2, 2, 1, INF, n=n)
    slope = fit_rate_slope(params, geometric_grid(256, 16384))
    assert slope < 0
