import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixent.core import INF, ExponentTuple
from mixent.rates import (HypothesisError, InnerEntropyProfile, edne_A, edne_D, lp_ball_volume,
                          matching_case, matching_rate, mixed_ball_volume_root, proof_scan_rate,
                          schuett_rate, volumetric_entropy_bound, weighted_block_rate)


def test_schuett_examples():
    res = schuett_rate(1, INF, 8, 8)
    assert res.value == pytest.approx(math.log(2) / 8)
    assert "2" in res.regime
    res = schuett_rate(1, 2, 9, 4)
    assert res.value == pytest.approx(0.125)
    assert res.regime == "3"
    assert schuett_rate(2, 2, 3, 8).value == 1
    with pytest.raises((HypothesisError, ValueError)):
        schuett_rate(2, 1, 3, 8)


@given(st.integers(2, 50), st.integers(2, 6))
def test_schuett_scale_free(b, c):
    k = max(1, b // 2)
    if not math.log(b) <= k <= b:
        return
    a = schuett_rate(1, INF, k, b)
    big = schuett_rate(1, INF, c * k, c * b)
    if a.regime == big.regime == "2":
        assert big.value == pytest.approx(a.value / c, rel=1e-9)


def test_matching_examples():
    res = matching_rate(ExponentTuple(1, 2, INF, INF), 4, 16, 32)
    assert res.value == pytest.approx(0.125)
    assert res.regime.startswith("i.b")
    res = matching_rate(ExponentTuple(2, 1, 2, INF), 4, 16, 32)
    assert res.value == pytest.approx(4 * math.log(2 * math.e) / 32, rel=1e-9)
    assert res.regime.startswith("ii")
    flat = ExponentTuple(2, 2, 2, 2)
    assert matching_rate(flat, 4, 4, 3).value == 1
    assert matching_rate(flat, 4, 4, 20).value == pytest.approx(2 ** (-19 / 16))
    with pytest.raises(HypothesisError):
        matching_case(ExponentTuple(2, 1, 1, 2), 4, 4)


def test_scan_close_to_formula():
    params = ExponentTuple(1, 2, INF, INF)
    for k in (4, 16, 32, 64):
        ratio = matching_rate(params, 4, 16, k).value / proof_scan_rate(params, 4, 16, k)
        assert 1 / 16 <= ratio <= 16


def test_edne_examples():
    one = InnerEntropyProfile.constant(1.0)
    assert edne_D(1, 8, 1, INF, one) == 1
    assert edne_A(8, 8, 2, 2, 1.0, one) == 1
    dec = InnerEntropyProfile.from_table([1, 0.5, 0.25, 0.125])
    assert edne_D(2, 4, 2, 2, dec) == 0.5
    assert edne_A(16, 16, 1, 2, 1.0, InnerEntropyProfile.constant(0.0)) == pytest.approx(16 ** -0.5)


def test_volumes():
    assert mixed_ball_volume_root(2, 2, 1, 2) == pytest.approx(math.sqrt(math.pi))
    assert mixed_ball_volume_root(1, 2, 1, 2) == pytest.approx(math.sqrt(2))
    assert mixed_ball_volume_root(INF, 3, 2, 1.7) == 1.7
    for n in range(1, 7):
        for p in (1, 2, INF):
            assert mixed_ball_volume_root(p, n, 1, 2.0) ** n == pytest.approx(lp_ball_volume(p, n), rel=1e-9)


def test_volumetric():
    v = [volumetric_entropy_bound(1, 2, 2, 3, k) for k in range(6, 10)]
    for a, b in zip(v, v[1:]):
        assert b / a == pytest.approx(2 ** (-1 / 6))
    with pytest.raises(HypothesisError):
        volumetric_entropy_bound(1, 2, 2, 3, 5)


def test_weighted_block():
    params = ExponentTuple(0.5, 1, INF, INF)
    assert weighted_block_rate(0.4, 0.0, params, [(2, 8)], 256, "large_k") == pytest.approx(256 ** -1.4)
    with pytest.raises(HypothesisError) as err:
        weighted_block_rate(0.4, 0.0, params, [(2, 8)] * 2, 8, "large_k")
    assert "k>=8b" in str(err.value)
    flat = ExponentTuple(1, 2, INF, 2)
    assert weighted_block_rate(0.3, 0.3, flat, [(1, 4)], 8, "large_k") == 1
