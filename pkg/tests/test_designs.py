import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixent.designs import (build_gv_code, build_subset_family, gv_fraction,
                            pairwise_hamming_min, pairwise_intersection_max)


def test_gv_examples():
    code = build_gv_code(2, 1)
    assert len(code) == 4
    code = build_gv_code(3, 2)
    assert len(code) >= 9
    assert gv_fraction(3, 2) == 9
    assert pairwise_hamming_min(code.words) >= 2
    assert len(build_gv_code(1, 3)) == 1


@given(st.integers(1, 4), st.integers(1, 3))
def test_gv_meets_bound(m, s):
    code = build_gv_code(m, s)
    assert len(code) >= code.lower_bound - 1e-9
    assert code.verified_distance >= s
    assert not code.words.flags.writeable


def test_subset_examples():
    fam = build_subset_family(3, 1)
    assert len(fam) >= 1
    fam = build_subset_family(16, 1)
    assert len(fam) >= 2
    # s = 1 means disjoint pairs, so at most 8 of them
    assert len(fam) <= 8 and pairwise_intersection_max(fam.incidence()) == 0
    fam = build_subset_family(64, 2)
    assert len(fam) >= 16
    assert all(len(s) == 4 for s in fam.sets)
    assert pairwise_intersection_max(fam.incidence()) <= 1


@given(st.integers(3, 40), st.integers(1, 3))
def test_subset_family_property(n, s):
    if 2 * s >= n:
        with pytest.raises(ValueError):
            build_subset_family(n, s)
        return
    fam = build_subset_family(n, s)
    assert len(fam) >= max(1, math.ceil((n / (8 * s)) ** s - 1e-12))
    inc = fam.incidence()
    assert inc.sum(axis=1).tolist() == [2 * s] * len(fam)
    assert fam.verified_max_intersection < s


def test_random_path_is_seeded():
    a = build_subset_family(200, 3, seed=1)
    b = build_subset_family(200, 3, seed=1)
    assert a.method == "random" and a.sets == b.sets
    assert len(a) >= math.ceil((200 / 24) ** 3)


def test_hamming_helper():
    words = np.array([[0, 0], [0, 1], [1, 1]])
    assert pairwise_hamming_min(words) == 1
