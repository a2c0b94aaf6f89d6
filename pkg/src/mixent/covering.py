"""Explicit coverings of mixed-norm balls and the entropy upper bounds they certify.

Coverings built here are unions of Cartesian products: each *block* picks one
*rowset* (a set of candidate rows) per row, and contributes the product of
those rowsets.  Storing rowsets once and blocks as tuples of rowset ids keeps
certificates small even when they describe 2^30 centers, and nearest-center
search is separable across rows.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (INF, BoundCurve, ExponentTuple, as_exponent, lp_norm, recip)
from .grid import enumerate_levels
from .rates import InnerEntropyProfile

DEFAULT_SAMPLES = 100_000
LATTICE_CAP = 4096


class CoveringError(ValueError):
    """Invalid input to a covering construction."""


def certified_index(count: int) -> int:
    """Smallest k with count <= 2^(k-1)."""
    if count < 1:
        raise ValueError("count must be positive")
    return (count - 1).bit_length() + 1


def _combine(parts: Sequence, r: float):
    """l_r combination of per-row quantities (arrays or floats)."""
    if r == INF:
        return np.maximum.reduce([np.asarray(x, dtype=float) for x in parts])
    return np.power(sum(np.power(np.asarray(x, dtype=float), r) for x in parts), 1.0 / r)


# ---------------------------------------------------------------- row coverings


@dataclass(frozen=True, eq=False)
class RowCovering:
    """Centers for one row: explicit points or a uniform grid on [-h, h]."""

    radius: float
    centers: np.ndarray | None = field(default=None, repr=False)
    half_width: float | None = None
    grid_count: int | None = None

    def __post_init__(self):
        if self.centers is not None:
            c = np.asarray(self.centers, dtype=float)
            if c.ndim == 1:
                c = c[:, None]
            object.__setattr__(self, "centers", c)
        elif self.half_width is None or not self.grid_count:
            raise CoveringError("row covering needs centers or a grid descriptor")

    @property
    def kind(self) -> str:
        return "explicit" if self.centers is not None else "uniform_grid"

    @property
    def count(self) -> int:
        return len(self.centers) if self.centers is not None else int(self.grid_count)

    @property
    def dim(self) -> int:
        return self.centers.shape[1] if self.centers is not None else 1

    def scaled(self, factor: float) -> "RowCovering":
        if self.centers is not None:
            return RowCovering(self.radius * factor, self.centers * factor)
        return RowCovering(self.radius * factor, None, self.half_width * factor, self.grid_count)

    def min_distance(self, rows: np.ndarray, u: float, chunk: int = 8192) -> np.ndarray:
        """Distance from each row (N, dim) to its nearest center."""
        rows = np.asarray(rows, dtype=float)
        if self.centers is None:
            h, n = self.half_width, self.grid_count
            x = rows[:, 0]
            j = np.clip(np.rint((x + h) * n / (2 * h) - 0.5), 0, n - 1)
            return np.abs(x - (-h + h * (2 * j + 1) / n))
        out = np.empty(len(rows))
        per = max(1, chunk * 64 // max(1, len(self.centers)))
        for i0 in range(0, len(rows), per):
            diff = rows[i0:i0 + per, None, :] - self.centers[None, :, :]
            out[i0:i0 + per] = lp_norm(diff, u, axis=-1).min(axis=1)
        return out

    def as_dict(self) -> dict:
        if self.centers is not None:
            return {"kind": "explicit", "radius": self.radius, "centers": self.centers.tolist()}
        return {"kind": "uniform_grid", "radius": self.radius,
                "half_width": self.half_width, "count": int(self.grid_count)}

    @classmethod
    def from_dict(cls, data: dict) -> "RowCovering":
        if data["kind"] == "explicit":
            return cls(float(data["radius"]), np.asarray(data["centers"], dtype=float))
        return cls(float(data["radius"]), None, float(data["half_width"]), int(data["count"]))

    @classmethod
    def zero(cls, dim: int, radius: float) -> "RowCovering":
        return cls(radius, np.zeros((1, dim)))


class IntervalProvider:
    """[-c, c] in |.|: 2^(m-1) midpoints, radius c 2^(-(m-1)); exact entropy numbers."""

    def __init__(self, half_width: float = 1.0):
        self.half_width = float(half_width)
        self.dim = 1
        self.x_exponent = INF
        self.y_exponent = INF
        self.op_norm = self.half_width

    def radius(self, m: int) -> float:
        return self.half_width * 2.0 ** (-(m - 1))

    def covering(self, m: int) -> RowCovering:
        if m < 1:
            raise CoveringError("budget must be >= 1")
        return RowCovering(self.radius(m), None, self.half_width, 2 ** (m - 1))

    def profile(self) -> InnerEntropyProfile:
        return InnerEntropyProfile(self.radius, 1, 10**9, "interval", self.half_width)


class LatticeProvider:
    """Unit ball of l_q^d covered in l_u^d by cell midpoints of an n^d grid on the cube.

    Cells missing the ball are dropped.  Every point of a kept cell is within
    n^(-1) d^(1/u) of its midpoint in l_u, so that is the radius; a single
    center at 0 (radius ||id||) is used whenever it is better.
    """

    def __init__(self, q, u, d: int, cap: int = LATTICE_CAP):
        self.q, self.u = as_exponent(q), as_exponent(u)
        self.x_exponent, self.y_exponent = self.q, self.u
        self.dim = int(d)
        self.cap = cap
        self.op_norm = float(d ** max(0.0, recip(self.u) - recip(self.q)))
        self._grids: dict[int, np.ndarray] = {}

    def _grid(self, n: int) -> np.ndarray:
        if n not in self._grids:
            axis = -1 + (2 * np.arange(n) + 1) / n
            pts = np.array(np.meshgrid(*[axis] * self.dim, indexing="ij")).reshape(self.dim, -1).T
            inner = np.maximum(np.abs(pts) - 1.0 / n, 0.0)
            keep = lp_norm(inner, self.q, axis=1) <= 1 + 1e-12
            self._grids[n] = pts[keep]
        return self._grids[n]

    def _lattice_radius(self, n: int) -> float:
        return self.dim ** recip(self.u) / n

    def covering(self, m: int) -> RowCovering:
        if m < 1:
            raise CoveringError("budget must be >= 1")
        budget = min(2 ** min(m - 1, 62), self.cap)
        best = RowCovering.zero(self.dim, self.op_norm)
        n = 1
        while n ** self.dim <= 64 * self.cap:
            pts = self._grid(n)
            if len(pts) > budget:
                break
            rad = self._lattice_radius(n)
            if rad < best.radius:
                best = RowCovering(rad, pts)
            n += 1
        return best

    def radius(self, m: int) -> float:
        return self.covering(m).radius

    def profile(self) -> InnerEntropyProfile:
        cache: dict[int, float] = {}

        def value(ell):
            if ell not in cache:
                cache[ell] = self.radius(ell)
            return cache[ell]

        return InnerEntropyProfile(value, 1, 10**9, f"lattice({self.q},{self.u},{self.dim})",
                                   self.op_norm)


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class CoverageEvidence:
    samples: int
    max_distance: float
    misses: int
    seed: int
    claimed_radius: float

    def as_dict(self) -> dict:
        return {"samples": self.samples, "max_distance": self.max_distance,
                "misses": self.misses, "seed": self.seed, "claimed_radius": self.claimed_radius}


@dataclass(frozen=True, eq=False)
class CoveringCertificate:
    params: ExponentTuple
    shape: tuple[int, int]
    rowsets: tuple[RowCovering, ...]
    blocks: tuple[tuple[int, ...], ...]
    claimed_radius: float
    budget: int
    construction: str
    exact_radius: float | None = None
    tail_radius: float = 0.0
    seed: int | None = None
    metadata: dict = field(default_factory=dict)
    coverage: CoverageEvidence | None = None

    def __post_init__(self):
        b, d = self.shape
        for blk in self.blocks:
            if len(blk) != b:
                raise CoveringError("every block must name one rowset per row")
            for rid in blk:
                if self.rowsets[rid].dim != d:
                    raise CoveringError("rowset dimension does not match the inner dimension")

    @property
    def count(self) -> int:
        """Exact number of centers (sum over blocks of products of rowset sizes)."""
        sizes = [rs.count for rs in self.rowsets]
        return sum(math.prod(sizes[i] for i in blk) for blk in self.blocks)

    @property
    def index(self) -> int:
        return certified_index(self.count)

    def distances(self, samples: np.ndarray) -> np.ndarray:
        """Distance of each sample (N, b, d) to the nearest center, in l_r(l_u)."""
        x = np.asarray(samples, dtype=float)
        r, u = self.params.r, self.params.u
        cache: dict[tuple[int, int], np.ndarray] = {}
        best = np.full(len(x), INF)
        for blk in self.blocks:
            parts = []
            for i, rid in enumerate(blk):
                key = (i, rid)
                if key not in cache:
                    cache[key] = self.rowsets[rid].min_distance(x[:, i, :], u)
                parts.append(cache[key])
            best = np.minimum(best, _combine(parts, r))
        return best

    def materialize(self, limit: int = 200_000) -> np.ndarray:
        """All centers as an (N, b, d) array (small certificates only)."""
        if self.count > limit:
            raise CoveringError(f"{self.count} centers exceed the materialization limit")
        b, d = self.shape
        out = []
        for blk in self.blocks:
            sets = [self._explicit(rid) for rid in blk]
            idx = np.array(np.meshgrid(*[np.arange(len(s)) for s in sets], indexing="ij"))
            idx = idx.reshape(b, -1).T
            block = np.stack([sets[i][idx[:, i]] for i in range(b)], axis=1)
            out.append(block)
        return np.concatenate(out, axis=0)

    def _explicit(self, rid: int) -> np.ndarray:
        rs = self.rowsets[rid]
        if rs.centers is not None:
            return rs.centers
        h, n = rs.half_width, rs.grid_count
        return (-h + h * (2 * np.arange(n) + 1) / n)[:, None]

    def with_coverage(self, evidence: CoverageEvidence) -> "CoveringCertificate":
        return CoveringCertificate(self.params, self.shape, self.rowsets, self.blocks,
                                   self.claimed_radius, self.budget, self.construction,
                                   self.exact_radius, self.tail_radius, self.seed,
                                   self.metadata, evidence)

    def to_json_dict(self) -> dict:
        return {
            "construction": self.construction,
            "params": self.params.as_dict(),
            "shape": {"b": self.shape[0], "d": self.shape[1]},
            "budget": self.budget,
            "index": self.index,
            "count": str(self.count),
            "radius": self.claimed_radius,
            "exact_radius": self.exact_radius,
            "tail_radius": self.tail_radius,
            "seed": self.seed,
            "metadata": self.metadata,
            "rowsets": [rs.as_dict() for rs in self.rowsets],
            "blocks": [list(b) for b in self.blocks],
            "coverage_evidence": self.coverage.as_dict() if self.coverage else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "CoveringCertificate":
        ev = data.get("coverage_evidence")
        return cls(
            params=ExponentTuple.from_dict(data["params"]),
            shape=(int(data["shape"]["b"]), int(data["shape"]["d"])),
            rowsets=tuple(RowCovering.from_dict(r) for r in data["rowsets"]),
            blocks=tuple(tuple(int(i) for i in b) for b in data["blocks"]),
            claimed_radius=float(data["radius"]),
            budget=int(data["budget"]),
            construction=str(data.get("construction", "external")),
            exact_radius=data.get("exact_radius"),
            tail_radius=float(data.get("tail_radius", 0.0)),
            seed=data.get("seed"),
            metadata=dict(data.get("metadata", {})),
            coverage=CoverageEvidence(**ev) if ev else None,
        )

    @classmethod
    def from_json(cls, text: str) -> "CoveringCertificate":
        return cls.from_json_dict(json.loads(text))


# ---------------------------------------------------------------- sampling


def _generalized_gaussian(rng: np.random.Generator, p: float, size) -> np.ndarray:
    """Density proportional to exp(-|t|^p); uniform on [-1, 1] for p = inf."""
    if p == INF:
        return rng.uniform(-1.0, 1.0, size)
    mag = rng.gamma(1.0 / p, 1.0, size) ** (1.0 / p)
    return mag * rng.choice([-1.0, 1.0], size)


def sample_lp_ball(rng: np.random.Generator, p: float, n: int, count: int,
                   boundary: bool = False) -> np.ndarray:
    """Uniform points of the l_p^n ball (or its sphere when ``boundary``)."""
    g = _generalized_gaussian(rng, p, (count, n))
    if p == INF:
        if boundary:
            hit = rng.integers(0, n, count)
            g[np.arange(count), hit] = np.sign(g[np.arange(count), hit]) + (g[np.arange(count), hit] == 0)
        return g
    denom = np.sum(np.abs(g) ** p, axis=1)
    if not boundary:
        denom = denom + rng.exponential(1.0, count)
    return g / denom[:, None] ** (1.0 / p)


def sample_mixed_ball(rng: np.random.Generator, b: int, d: int, p, q, count: int,
                      boundary_share: float = 0.25, sparse_share: float = 0.15) -> np.ndarray:
    """Points of the unit ball of l_p^b(l_q^d): row radii from the l_p^b ball,
    row directions on the l_q^d sphere, plus boundary and sparse draws."""
    p, q = as_exponent(p), as_exponent(q)
    n_bd = int(count * boundary_share)
    n_sp = int(count * sparse_share)
    n_in = count - n_bd - n_sp
    radii = np.abs(np.concatenate([
        sample_lp_ball(rng, p, b, n_in),
        sample_lp_ball(rng, p, b, n_bd, boundary=True),
        sample_lp_ball(rng, p, b, n_sp, boundary=True),
    ]))
    dirs = sample_lp_ball(rng, q, d, count * b, boundary=True).reshape(count, b, d)
    # sparse draws: few active rows, few active entries per row
    if n_sp:
        sl = slice(n_in + n_bd, count)
        keep_rows = rng.random((n_sp, b)) < 0.35
        keep_rows[np.arange(n_sp), rng.integers(0, b, n_sp)] = True
        keep_cols = rng.random((n_sp, b, d)) < 0.5
        keep_cols[np.arange(n_sp)[:, None], np.arange(b)[None, :], rng.integers(0, d, (n_sp, b))] = True
        sub = dirs[sl] * keep_cols
        norms = lp_norm(sub, q, axis=-1)
        dirs[sl] = sub / np.where(norms > 0, norms, 1.0)[..., None]
        r = radii[sl] * keep_rows
        rn = lp_norm(r, p, axis=-1)
        radii[sl] = r / np.where(rn > 0, rn, 1.0)[:, None]
    x = radii[:, :, None] * dirs
    # guard against rounding just outside the ball
    norms = np.atleast_1d(lp_norm(lp_norm(x, q, axis=-1), p, axis=-1))
    return x / np.maximum(norms, 1.0)[:, None, None]


def verify_covering(cert: CoveringCertificate, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                    batch: int = 20_000) -> CoverageEvidence:
    """Sample the unit ball of l_p^b(l_q^d) and record the worst nearest-center distance."""
    rng = np.random.default_rng(seed)
    b, d = cert.shape
    worst, misses = 0.0, 0
    tol = cert.claimed_radius * (1 + 1e-9) + 1e-12
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        x = sample_mixed_ball(rng, b, d, cert.params.p, cert.params.q, n)
        dist = cert.distances(x)
        worst = max(worst, float(dist.max()))
        misses += int(np.sum(dist > tol))
        done += n
    return CoverageEvidence(samples, worst, misses, seed, cert.claimed_radius)


def check_covering(cert: CoveringCertificate, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> dict:
    """Cardinality and sampled coverage in one report."""
    ev = verify_covering(cert, samples, seed)
    count = cert.count
    report = {
        "count": str(count),
        "index": certified_index(count),
        "count_ok": count <= 2 ** (cert.index - 1),
        "coverage": ev.as_dict(),
        "coverage_ok": ev.misses == 0,
    }
    report["ok"] = report["count_ok"] and report["coverage_ok"]
    return report


# ---------------------------------------------------------------- constructions


def _providers_for(provider, b: int):
    provs = list(provider) if isinstance(provider, (list, tuple)) else [provider] * b
    if len(provs) != b:
        raise CoveringError("need one provider per row")
    return provs


def cuboid_covering(provider, p, r, b: int, k: int, params: ExponentTuple | None = None,
                    seed: int | None = None) -> CoveringCertificate:
    """Union over the dyadic grid of products of scaled row coverings.

    For a grid vector v the row budgets are m_i = floor((k/b - 2)/2) * b * v_i
    and row i is covered at radius v_i^(1/p) rho_{m_i}.
    """
    p, r = as_exponent(p), as_exponent(r)
    if p > r:
        raise CoveringError("need p <= r")
    if k < 8 * b:
        raise CoveringError(f"cuboid covering needs k >= 8b = {8 * b}, got {k}")
    provs = _providers_for(provider, b)
    dim = provs[0].dim
    if params is None:
        params = ExponentTuple(p, provs[0].x_exponent, r, provs[0].y_exponent)
    unit = (k - 2 * b) // (2 * b)
    # p = inf: every row lies in the unit ball, one grid vector is enough
    levels = np.zeros((1, b), dtype=int) if p == INF else enumerate_levels(b)
    rowsets: list[RowCovering] = []
    keys: dict[tuple[int, int], int] = {}
    blocks = []
    exact = 0.0
    for lev in levels.tolist():
        blk = []
        parts = []
        for i, level in enumerate(lev):
            m_i = unit * 2**level
            key = (i if isinstance(provider, (list, tuple)) else -1, level)
            if key not in keys:
                scale = (2.0**level / b) ** recip(p)
                keys[key] = len(rowsets)
                rowsets.append(provs[i].covering(m_i).scaled(scale))
            rid = keys[key]
            blk.append(rid)
            parts.append(rowsets[rid].radius)
        blocks.append(tuple(blk))
        exact = max(exact, float(_combine(parts, r)))
    gap = recip(p) - recip(r)
    lo = max(1, (3 * k) // (8 * b))
    claimed = 0.0
    for prov in provs:
        for m in range(lo, k + 1):
            claimed = max(claimed, (m / k) ** gap * prov.radius(m))
    claimed *= 3.0 ** recip(r) * 8.0**gap
    if exact > claimed * (1 + 1e-12):
        raise CoveringError(f"cuboid radius {exact} exceeds the closed-form bound {claimed}")
    meta = {"grid_vectors": len(levels), "unit_budget": unit,
            "index_claim": k + 1, "closed_form_radius": claimed}
    return CoveringCertificate(params, (b, dim), tuple(rowsets), tuple(blocks), claimed, k,
                               "cuboid", exact, 0.0, seed, meta)


def et_subset_size(k: int, b: int, d: int) -> int:
    """s = max(1, floor(k / (log(eb/k) + d))), capped at b."""
    return min(b, max(1, math.floor(k / (math.log(math.e * b / k) + d))))


def _log2_comb(b: int, s: int) -> float:
    return math.log2(math.comb(b, s))


def et_sparse_covering(provider, p, r, b: int, k: int, d: int | None = None,
                       mode: str = "et", params: ExponentTuple | None = None,
                       seed: int | None = None) -> CoveringCertificate:
    """Cover by matrices supported on s rows: the s largest rows are covered, the rest dropped.

    Dropping all but the s largest rows costs at most s^(1/r-1/p) ||id|| in
    l_r(Y) (best s-term approximation), so the radius is the l_r combination
    of that tail and the covering radius on the kept rows.  ``mode="edne"``
    takes s near k/log(eb/k) and covers the kept rows with a cuboid covering.
    """
    p, r = as_exponent(p), as_exponent(r)
    if p > r:
        raise CoveringError("need p <= r")
    dim = provider.dim
    d = dim if d is None else d
    if d != dim:
        raise CoveringError("inner dimension does not match the provider")
    if params is None:
        params = ExponentTuple(p, provider.x_exponent, r, provider.y_exponent)
    if k < 1:
        raise CoveringError("budget must be >= 1")
    if mode == "et":
        s = et_subset_size(k, b, d)
        while True:
            room = (k - 1) - math.ceil(_log2_comb(b, s) - 1e-12)
            m_row = room // s + 1
            if m_row >= 1 and room >= 0:
                break
            if s == 1:
                raise CoveringError(f"budget k={k} too small for any subset size")
            s -= 1
        row = provider.covering(m_row)
        inner_radius = float(_combine([row.radius] * s, r))
        inner_rowsets = [row]
        inner_blocks = [tuple([0] * s)]
        inner_meta = {"row_budget": m_row}
    elif mode == "edne":
        s_target = max(1, math.floor(k / max(1.0, math.log(math.e * b / k))))
        chosen = None
        for s in range(min(b, s_target), 0, -1):
            k_in = (k - 1) - math.ceil(_log2_comb(b, s) - 1e-12)
            if k_in >= 8 * s:
                chosen = (s, k_in)
                break
        if chosen is None:
            raise CoveringError(f"budget k={k} too small for an inner cuboid covering")
        s, k_in = chosen
        inner = cuboid_covering(provider, p, r, s, k_in)
        while inner.count > 2**k_in:
            k_in -= 1
            if k_in < 8 * s:
                raise CoveringError("inner cuboid covering exceeds its budget")
            inner = cuboid_covering(provider, p, r, s, k_in)
        inner_radius = inner.exact_radius
        inner_rowsets = list(inner.rowsets)
        inner_blocks = list(inner.blocks)
        inner_meta = {"inner_budget": k_in, "inner_count": str(inner.count)}
    else:
        raise CoveringError(f"unknown mode {mode!r}")
    tail = s ** (recip(r) - recip(p)) * provider.op_norm if s < b else 0.0
    radius = float(_combine([inner_radius, tail], r)) if tail > 0 else inner_radius
    zero_id = len(inner_rowsets)
    rowsets = tuple(inner_rowsets) + (RowCovering.zero(dim, 0.0),)
    blocks = []
    for subset in itertools.combinations(range(b), s):
        for iblk in inner_blocks:
            blk = [zero_id] * b
            for pos, row in enumerate(subset):
                blk[row] = iblk[pos]
            blocks.append(tuple(blk))
    meta = {"s": s, "mode": mode, "inner_radius": inner_radius, **inner_meta}
    cert = CoveringCertificate(params, (b, dim), rowsets, tuple(blocks), radius, k,
                               f"et_sparse:{mode}", radius, tail, seed, meta)
    if cert.count > 2 ** (k - 1):
        raise CoveringError(f"covering has {cert.count} centers, budget 2^{k - 1}")
    return cert


def zero_covering(params: ExponentTuple, b: int, d: int) -> CoveringCertificate:
    """The single center 0 at radius ||id||."""
    radius = (b ** max(0.0, recip(params.r) - recip(params.p))
              * d ** max(0.0, recip(params.u) - recip(params.q)))
    return CoveringCertificate(params, (b, d), (RowCovering.zero(d, 0.0),), (tuple([0] * b),),
                               float(radius), 1, "zero", float(radius))


# ---------------------------------------------------------------- KLSS


def klss_bound(profiles: Sequence, budgets: Sequence[int], p, r) -> tuple[int, float]:
    """Index sum(n_j) + ceil(b log2 b) and value (sum_j j^(-r/p) e_{n_j}^r)^(1/r)."""
    p, r = as_exponent(p), as_exponent(r)
    b = len(budgets)
    if b == 0 or len(profiles) != b:
        raise ValueError("need one profile per budget")
    if any(n < 1 for n in budgets):
        raise ValueError("budgets must be >= 1")
    index = int(sum(budgets)) + (math.ceil(b * math.log2(b)) if b > 1 else 0)
    terms = []
    for j, (prof, n) in enumerate(zip(profiles, budgets), start=1):
        e = prof.value_at(n) if isinstance(prof, BoundCurve) else prof(n)
        terms.append((j, float(e)))
    if r == INF:
        value = max(j ** (-recip(p)) * e for j, e in terms)
    else:
        value = sum(j ** (-r * recip(p)) * e**r for j, e in terms) ** (1.0 / r)
    return index, float(value)


def klss_budgets(k: int, b: int, alpha: float) -> list[int]:
    """n_j = max(1, round(c j^-alpha)), with c the largest scalar keeping the index <= k."""
    overhead = math.ceil(b * math.log2(b)) if b > 1 else 0
    room = k - overhead
    if room < b:
        raise ValueError(f"k={k} leaves no room for b={b} budgets of at least 1")
    j = np.arange(1, b + 1, dtype=float)

    def budgets(c):
        return np.maximum(1, np.rint(c * j ** (-alpha))).astype(int)

    lo, hi = 0.0, float(room)
    while budgets(hi).sum() <= room:
        hi *= 2
    for _ in range(100):
        mid = (lo + hi) / 2
        if budgets(mid).sum() <= room:
            lo = mid
        else:
            hi = mid
    return budgets(lo).tolist()


def klss_curve(params: ExponentTuple, b: int, d: int, ks: Sequence[int],
               alpha: float | None = None) -> BoundCurve:
    """KLSS values with the rate profile of l_q^d -> l_u^d, at the index each budget certifies."""
    prof = InnerEntropyProfile.schuett(params.q, params.u, d)
    gp, gq = params.outer_gap, params.inner_gap
    if alpha is None:
        alpha = min(0.99, (gp / gq + 1) / 2) if gq > 0 else 0.5
    best: dict[int, float] = {}
    for k in ks:
        try:
            n = klss_budgets(k, b, alpha)
        except ValueError:
            continue
        idx, val = klss_bound([prof] * b, n, params.p, params.r)
        if idx not in best or val < best[idx]:
            best[idx] = val
    keys = sorted(best)
    return BoundCurve.from_values(keys, [best[x] for x in keys], "klss").upper_envelope()


# ---------------------------------------------------------------- best-of curves


def default_provider(params: ExponentTuple, d: int):
    """Interval covering for scalar rows, lattice quantization otherwise."""
    if d == 1:
        return IntervalProvider(1.0)
    return LatticeProvider(params.q, params.u, d)


def covering_certificates(params: ExponentTuple, b: int, d: int, kmax: int,
                          provider=None) -> list[CoveringCertificate]:
    """Every applicable construction with budget at most kmax (unverified)."""
    provider = provider or default_provider(params, d)
    certs = [zero_covering(params, b, d)]
    if params.p > params.r:
        return certs
    for k in range(1, kmax + 1):
        for mode in ("et", "edne"):
            try:
                certs.append(et_sparse_covering(provider, params.p, params.r, b, k, d,
                                                mode=mode, params=params))
            except CoveringError:
                pass
        if k >= 8 * b:
            try:
                cert = cuboid_covering(provider, params.p, params.r, b, k, params=params)
            except CoveringError:
                continue
            if cert.index <= kmax:
                certs.append(cert)
    return certs


def covering_upper_curve(params: ExponentTuple, b: int, d: int, kmax: int,
                         certs: Sequence[CoveringCertificate] | None = None) -> BoundCurve:
    """Smallest certified radius at each k <= kmax, from certificates whose index is <= k."""
    certs = covering_certificates(params, b, d, kmax) if certs is None else certs
    vals, tags = [], []
    for k in range(1, kmax + 1):
        usable = [c for c in certs if c.index <= k]
        best = min(usable, key=lambda c: c.claimed_radius)
        vals.append(best.claimed_radius)
        tags.append(best.construction)
    return BoundCurve.from_values(range(1, kmax + 1), vals, tags)
