from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixent.core import INF
from mixent.grid import (enumerate_grid, grid_size, max_l1_mass, random_simplex_points,
                         simplex_mesh_image, transform_grid, upsilon, upsilon0)


def test_upsilon0_examples():
    assert upsilon0(0.3) == 1
    assert upsilon0(4) == 4
    assert upsilon0(5) == 8
    assert upsilon0(0) == 1


def test_upsilon_examples():
    assert upsilon([0.3, 0.3]).values == (Fraction(1, 2), Fraction(1, 2))
    assert upsilon([0.8, 0.1]).values == (Fraction(1), Fraction(1, 2))
    assert upsilon([0.9, 0, 0, 0]).values == (Fraction(1), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4))


def test_small_grids():
    assert [v.values for v in enumerate_grid(1)] == [(Fraction(1),)]
    got = {v.values for v in enumerate_grid(2)}
    half, one = Fraction(1, 2), Fraction(1)
    assert got == {(half, half), (one, half), (half, one)}
    assert [grid_size(b) for b in range(1, 6)] == [1, 3, 10, 31, 101]


@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_grid_equals_mesh_image(b):
    image = simplex_mesh_image(b, 24)
    levels = {tuple(v.levels) for v in enumerate_grid(b)}
    assert image <= levels


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_domination_and_membership(b, seed):
    rng = np.random.default_rng(seed)
    pts = random_simplex_points(b, 20, rng)
    grid = {v.levels for v in enumerate_grid(b)}
    for x in pts:
        v = upsilon(x)
        assert v.dominates(x)
        assert v.is_admissible
        assert v.levels in grid


def test_mass_bounds():
    for b in range(1, 13):
        assert grid_size(b) <= 2 ** (3 * b)
        assert max_l1_mass(b) < 3
    assert max_l1_mass(4) <= 2
    assert max_l1_mass(5) == Fraction(12, 5)
    assert max(float(v.l1_mass) for v in enumerate_grid(5)) == pytest.approx(2.4)


def test_transform():
    grid = enumerate_grid(2)
    assert transform_grid(grid, 1) == [tuple(float(x) for x in v.values) for v in grid]
    assert transform_grid(grid, INF) == [(1.0, 1.0)]
    out = transform_grid(grid, 2)
    assert any(a == 1.0 and b == pytest.approx(2 ** -0.5) for a, b in out)
