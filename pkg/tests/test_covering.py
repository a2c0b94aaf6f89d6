import math

import numpy as np
import pytest

from mixent.core import INF, ExponentTuple
from mixent.covering import (CoveringCertificate, CoveringError, IntervalProvider,
                             LatticeProvider, check_covering, covering_upper_curve,
                             cuboid_covering, et_sparse_covering, et_subset_size, klss_bound,
                             klss_budgets, sample_mixed_ball, verify_covering, zero_covering)
from mixent.core import mixed_norm


def test_interval_provider():
    prov = IntervalProvider(1.0)
    for m in range(1, 6):
        cov = prov.covering(m)
        assert cov.count <= 2 ** (m - 1)
        assert prov.radius(m) == pytest.approx(2.0 ** -(m - 1))


def test_cuboid_example():
    cert = cuboid_covering(IntervalProvider(1.0), 1, INF, 2, 16)
    assert cert.count <= 2**16
    rep = check_covering(cert, samples=20_000, seed=3)
    assert rep["ok"]
    with pytest.raises(CoveringError):
        cuboid_covering(IntervalProvider(1.0), 1, INF, 2, 15)
    with pytest.raises(CoveringError):
        cuboid_covering(IntervalProvider(1.0), 2, 1, 2, 16)


def test_cuboid_single_row():
    cert = cuboid_covering(IntervalProvider(1.0), 1, 2, 1, 16)
    assert cert.count == IntervalProvider(1.0).covering((16 - 2) // 2).count


def test_et_subset_size_example():
    assert et_subset_size(16, 8, 2) == 6
    assert et_subset_size(2, 8, 2) == 1


def test_et_covering_samples():
    prov = LatticeProvider(1, INF, 2)
    cert = et_sparse_covering(prov, 1, INF, 8, 16, 2)
    assert cert.count <= 2**15
    assert verify_covering(cert, samples=20_000, seed=1).misses == 0


def test_json_roundtrip():
    cert = cuboid_covering(IntervalProvider(1.0), 1, INF, 2, 16)
    back = CoveringCertificate.from_json(cert.to_json())
    assert back.count == cert.count
    assert back.claimed_radius == cert.claimed_radius


def test_zero_covering():
    cert = zero_covering(ExponentTuple(1, 2, INF, INF), 3, 4)
    assert cert.count == 1
    assert check_covering(cert, samples=5_000)["ok"]


def test_klss_examples():
    idx, val = klss_bound([lambda n: 1.0] * 2, [1, 1], 1, 2)
    assert idx == 4
    assert val == pytest.approx(math.sqrt(1.25))
    assert klss_bound([lambda n: 0.5], [3], 1, 2) == (3, 0.5)
    n = klss_budgets(64, 8, 0.5)
    assert sum(n) + 24 <= 64 and min(n) >= 1


def test_samples_in_ball():
    rng = np.random.default_rng(0)
    pts = sample_mixed_ball(rng, 3, 2, 1, 2, 500)
    norms = [mixed_norm(x, 1, 2) for x in pts]
    assert max(norms) <= 1 + 1e-9


def test_upper_curve_nonincreasing():
    curve = covering_upper_curve(ExponentTuple(1, INF, INF, INF), 2, 2, 8)
    assert curve.is_nonincreasing()
    assert curve.value_at(1) == 1.0
