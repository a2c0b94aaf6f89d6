import dataclasses
import itertools

import numpy as np
import pytest

from mixent.core import INF, ExponentTuple, embedding_norm
from mixent.packing import (BasePacking, PackingCertificate, PackingError, antipodal_packing,
                            block_sparse_packing, certified_index, cube_vertex_packing,
                            packing_lower_curve, packing_to_entropy_lower,
                            row_replication_packing, two_level_sparse_packing, verify_packing)


def test_certified_index():
    assert certified_index(1) == 0
    assert certified_index(4) == 2
    assert certified_index(5) == 3
    assert certified_index(2**10 + 1) == 11


def test_two_level_small():
    params = ExponentTuple(1, 1, 2, 2)
    cert = two_level_sparse_packing(params, 8, 8, 1, 1)
    rep = verify_packing(cert)
    assert rep.ok
    assert len(cert) >= cert.required_count
    assert rep.min_distance >= cert.claimed_separation * (1 - 1e-9)
    with pytest.raises(PackingError):
        two_level_sparse_packing(params, 8, 8, 2, 1)
    with pytest.raises(PackingError):
        two_level_sparse_packing(params, 4, 8, 1, 1)


def test_json_roundtrip_and_tamper(tmp_path):
    params = ExponentTuple(1, 2, INF, INF)
    cert = row_replication_packing(np.ones(3) / np.sqrt(3), 9, 1, 1, INF, 2, INF)
    back = PackingCertificate.from_json(cert.to_json())
    assert np.array_equal(back.points, cert.points)
    assert verify_packing(back).ok
    pts = back.points.copy()
    pts[1] = pts[0]
    bad = dataclasses.replace(back, points=pts)
    rep = verify_packing(bad)
    assert not rep.ok
    assert rep.offending_pairs[0][:2] == [0, 1] or tuple(rep.offending_pairs[0][:2]) == (0, 1)
    del params


def test_row_replication_rejects_zero_witness():
    with pytest.raises(PackingError):
        row_replication_packing(np.zeros(3), 9, 1, 1, INF)


def test_block_sparse_signs():
    cert = block_sparse_packing(BasePacking.signs(), 1, INF, 16, 1)
    assert verify_packing(cert).ok
    assert len(cert) >= 2


@pytest.mark.parametrize("e", list(itertools.product([1, 2, INF], repeat=4))[::7])
def test_elementary_packings(e):
    params = ExponentTuple(*e)
    ant = antipodal_packing(params, 2, 3)
    assert verify_packing(ant).ok
    assert ant.claimed_separation == pytest.approx(2 * embedding_norm(2, 3, params), rel=1e-6)
    cube = cube_vertex_packing(params, 2, 2)
    assert len(cube) == 16 and verify_packing(cube).ok
    lower = packing_to_entropy_lower(cube)
    assert lower.ks == [4]


def test_lower_curve_nonincreasing():
    curve = packing_lower_curve(ExponentTuple(1, INF, INF, INF), 2, 2, 8)
    assert curve.is_nonincreasing()
    assert curve.value_at(1) > 0
