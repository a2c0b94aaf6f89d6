import numpy as np
import pytest

from mixent.core import INF, ExponentTuple, mixed_norm
from mixent.oracle import (MeshTooCoarse, covering_radius, discretize_ball,
                           empirical_entropy_curve, greedy_covering, greedy_packing,
                           packing_separation)


def interval(n=256):
    return discretize_ball((INF, INF), 1, 1, n=n)


def test_mesh_points_in_ball():
    ball = discretize_ball(ExponentTuple(1, 2, INF, INF), 2, 2, n=4)
    assert all(mixed_norm(x, 1, 2) <= 1 + 1e-12 for x in ball.points)
    assert ball.delta == 0.25


def test_interval_packing_examples():
    ball = interval()
    assert len(greedy_packing(ball, 0.5, INF, INF)) == 4
    assert len(greedy_packing(ball, 1.0, INF, INF)) == 2
    assert len(greedy_covering(ball, 0.5, INF, INF)) == 2
    assert len(greedy_covering(ball, 1.0, INF, INF)) == 1


def test_packing_and_covering_are_valid():
    ball = discretize_ball((1, 1), 2, 1, n=24)
    idx = greedy_packing(ball, 0.4, 2, 2, max_step_ratio=None)
    assert packing_separation(ball, idx, 2, 2) >= 0.4 - 1e-12
    centers = greedy_covering(ball, 0.4, 2, 2, max_step_ratio=None)
    assert covering_radius(ball, centers, 2, 2) <= 0.4 + 1e-12
    # sandwich on this mesh
    assert len(greedy_packing(ball, 0.8, 2, 2, max_step_ratio=None)) <= len(centers) <= len(idx)


def test_mesh_guard():
    ball = discretize_ball((INF, INF), 1, 1, n=2)
    with pytest.raises(MeshTooCoarse):
        greedy_packing(ball, 0.5, INF, INF)


def test_interval_entropy_exact():
    res = empirical_entropy_curve(ExponentTuple(INF, INF, INF, INF), 1, 1, 5, n=256)
    for k in range(1, 6):
        lo, hi = res.bracket(k)
        assert lo == pytest.approx(2.0 ** -(k - 1))
        # the trivial bound ||id|| = 1 caps the first index
        assert hi == pytest.approx(min(1.0, 2.0 ** -(k - 1) + 1 / 256))


def test_curves_monotone_and_ordered():
    res = empirical_entropy_curve(ExponentTuple(1, 2, INF, INF), 2, 2, 8, max_points=600)
    assert res.lower.is_nonincreasing() and res.upper.is_nonincreasing()
    assert np.all(np.array(res.lower.values) <= np.array(res.upper.values) + 1e-12)
