"""Brute-force two-sided entropy estimates on tiny instances.

The unit ball of l_p^b(l_q^d) is replaced by the lattice points delta*z with
||delta*z|| <= 1.  Packings of mesh points are packings of the ball, so they
give honest lower bounds.  Coverings of the mesh cover the ball up to the
truncation slack: truncating each coordinate of x toward zero lands on a mesh
point and moves x by less than delta per entry, hence by less than
delta * b^(1/r) d^(1/u) in the target norm.
"""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (INF, BoundCurve, ExponentTuple, as_exponent, embedding_norm, gamma_exponent,
                   mixed_norm, quasi_norm_constant, recip)

log = logging.getLogger(__name__)

MAX_POINTS = 4000
MAX_CELLS = 6


class MeshTooCoarse(ValueError):
    """The mesh step is too large relative to the requested radius."""


class OracleCapExceeded(ValueError):
    """The instance is too large for exhaustive treatment."""


@dataclass(frozen=True, eq=False)
class DiscretizedBall:
    """Lattice points of the unit ball of l_p^b(l_q^d), stored in lattice units."""

    p: float
    q: float
    b: int
    d: int
    n: int
    lattice: np.ndarray = field(repr=False)

    @property
    def delta(self) -> float:
        return 1.0 / self.n

    @property
    def points(self) -> np.ndarray:
        return self.lattice.reshape(-1, self.b, self.d) * self.delta

    def __len__(self):
        return len(self.lattice)

    def slack(self, r: float, u: float) -> float:
        """Target-norm distance from any ball point to its truncated mesh point (upper bound)."""
        return self.delta * self.b ** recip(r) * self.d ** recip(u)

    def distance_matrix(self, r: float, u: float) -> np.ndarray:
        return _distances(self, r, u)


_DIST_CACHE: dict = {}
_CACHE_BYTES = 400 * 2**20


def _distances(ball: DiscretizedBall, r: float, u: float) -> np.ndarray:
    key = (id(ball), r, u)
    hit = _DIST_CACHE.get(key)
    if hit is not None and hit[0] is ball:
        return hit[1]
    z = ball.lattice.reshape(-1, ball.b, ball.d).astype(np.float64)
    n = len(z)
    out = np.empty((n, n), dtype=np.float32)
    step = max(1, 2_000_000 // max(1, n * ball.b * ball.d))
    for i0 in range(0, n, step):
        out[i0:i0 + step] = mixed_norm(z[i0:i0 + step, None] - z[None], r, u)
    held = sum(v[1].nbytes for v in _DIST_CACHE.values())
    if len(_DIST_CACHE) >= 8 or held + out.nbytes > _CACHE_BYTES:
        _DIST_CACHE.clear()
    _DIST_CACHE[key] = (ball, out)
    return out


def lattice_count(p, q, b: int, d: int, n: int) -> int:
    return len(_lattice_points(p, q, b, d, n))


def _lattice_points(p, q, b: int, d: int, n: int) -> np.ndarray:
    cells = b * d
    axis = np.arange(-n, n + 1)
    z = np.array(list(itertools.product(axis, repeat=cells)), dtype=np.int64) if cells else np.zeros((1, 0))
    norms = np.atleast_1d(mixed_norm(z.reshape(-1, b, d).astype(float), p, q))
    return z[norms <= n * (1 + 1e-12)]


def discretize_ball(params: ExponentTuple | tuple, b: int, d: int, n: int | None = None,
                    max_points: int = MAX_POINTS) -> DiscretizedBall:
    """Mesh with step 1/n; n defaults to the largest value keeping at most ``max_points`` points."""
    p, q = (params.p, params.q) if isinstance(params, ExponentTuple) else params
    return _discretize(as_exponent(p), as_exponent(q), b, d, n, max_points)


@functools.lru_cache(maxsize=64)
def _discretize(p, q, b, d, n, max_points) -> DiscretizedBall:
    if b * d > MAX_CELLS:
        raise OracleCapExceeded(f"bd = {b * d} exceeds the exhaustive cap {MAX_CELLS}")
    if n is None:
        n = 1
        while (2 * n + 3) ** (b * d) <= 4_000_000 and lattice_count(p, q, b, d, n + 1) <= max_points:
            n += 1
    pts = _lattice_points(p, q, b, d, n)
    if len(pts) > max_points:
        raise OracleCapExceeded(f"{len(pts)} mesh points exceed the cap {max_points}")
    return DiscretizedBall(p, q, b, d, n, pts)


def _check_mesh(ball: DiscretizedBall, eps: float, max_step_ratio: float | None):
    if max_step_ratio is not None and ball.delta > max_step_ratio * eps:
        raise MeshTooCoarse(f"mesh step {ball.delta} exceeds {max_step_ratio} * eps = {max_step_ratio * eps}")
    if max_step_ratio is None and ball.delta > 0.1 * eps:
        log.info("mesh step %.4g is coarser than eps/10 = %.4g", ball.delta, eps / 10)


# ---------------------------------------------------------------- greedy packing


def _first_fit(dist: np.ndarray, thr: float, strict: bool) -> list[int]:
    chosen: list[int] = []
    n = len(dist)
    alive = np.ones(n, dtype=bool)
    for i in range(n):
        if not alive[i]:
            continue
        chosen.append(i)
        row = dist[i]
        alive &= (row > thr) if strict else (row >= thr)
    return chosen


def _farthest_first(dist: np.ndarray, thr: float | None, strict: bool,
                    limit: int | None = None) -> tuple[list[int], list[float]]:
    """Gonzalez traversal from index 0; stops when the next gap fails the threshold."""
    n = len(dist)
    chosen = [0]
    radii = [INF]
    gap = dist[0].astype(np.float64).copy()
    gap[0] = -1.0
    while len(chosen) < (limit or n):
        j = int(np.argmax(gap))
        g = gap[j]
        if g < 0:
            break
        if thr is not None and not (g > thr if strict else g >= thr):
            break
        chosen.append(j)
        radii.append(float(g))
        np.minimum(gap, dist[j], out=gap)
        gap[chosen] = -1.0
    return chosen, radii


def greedy_packing(ball: DiscretizedBall, eps: float, r: float, u: float,
                   strict: bool = True, strategy: str = "best",
                   max_step_ratio: float | None = 0.1) -> np.ndarray:
    """Maximal eps-packing of the mesh in l_r(l_u); returns mesh indices.

    ``strict`` uses the '>' separation of the packing-number definition;
    ``strict=False`` accepts distance exactly eps.
    """
    _check_mesh(ball, eps, max_step_ratio)
    dist = ball.distance_matrix(r, u)
    thr = np.float32(eps * ball.n)
    # keep float32 rounding on the safe side
    thr = float(np.nextafter(thr, np.float32(INF))) if not strict else float(thr)
    cands = []
    if strategy in ("first_fit", "best"):
        cands.append(_first_fit(dist, thr, strict))
    if strategy in ("farthest", "best"):
        cands.append(_farthest_first(dist, thr, strict)[0])
    if not cands:
        raise ValueError(f"unknown strategy {strategy!r}")
    best = max(cands, key=len)
    return np.array(sorted(best), dtype=int)


def packing_separation(ball: DiscretizedBall, idx, r: float, u: float) -> float:
    idx = np.asarray(idx, dtype=int)
    if len(idx) < 2:
        return INF
    sub = mixed_norm(ball.points[idx][:, None] - ball.points[idx][None], r, u)
    sub = np.asarray(sub)
    np.fill_diagonal(sub, INF)
    return float(sub.min())


# ---------------------------------------------------------------- greedy covering


def _set_cover(dist: np.ndarray, thr: float) -> list[int]:
    cover = dist <= thr
    counts = cover.sum(axis=1).astype(np.int64)
    uncovered = np.ones(len(dist), dtype=bool)
    chosen = []
    while uncovered.any():
        j = int(np.argmax(counts))
        chosen.append(j)
        newly = cover[j] & uncovered
        uncovered &= ~newly
        counts -= cover[:, newly].sum(axis=1)
    return chosen


def greedy_covering(ball: DiscretizedBall, eps: float, r: float, u: float,
                    max_step_ratio: float | None = 0.1) -> np.ndarray:
    """Greedy set cover of the mesh by eps-balls centered at mesh points; returns indices."""
    _check_mesh(ball, eps, max_step_ratio)
    dist = ball.distance_matrix(r, u)
    thr = float(np.nextafter(np.float32(eps * ball.n), np.float32(INF)))
    return np.array(_set_cover(dist, thr), dtype=int)


def covering_radius(ball: DiscretizedBall, centers, r: float, u: float) -> float:
    dist = ball.distance_matrix(r, u)
    return float(dist[:, np.asarray(centers, dtype=int)].min(axis=1).max()) / ball.n


# ---------------------------------------------------------------- curves


@dataclass
class OracleResult:
    lower: BoundCurve
    upper: BoundCurve
    mesh_step: float
    mesh_points: int
    slack: float
    notes: list[str] = field(default_factory=list)

    def bracket(self, k: int) -> tuple[float, float]:
        return self.lower.value_at(k), self.upper.value_at(k)


class _CountCache:
    def __init__(self, fn):
        self.fn = fn
        self.cache: dict[int, int] = {}

    def __call__(self, i: int) -> int:
        if i not in self.cache:
            self.cache[i] = self.fn(i)
        return self.cache[i]


def empirical_entropy_curve(params: ExponentTuple, b: int, d: int, kmax: int,
                            n: int | None = None, max_points: int = MAX_POINTS,
                            kmin: int = 1) -> OracleResult:
    """Lower and upper e_k estimates for k in [kmin, kmax] from the mesh.

    Lower: a packing of more than 2^(k-1) mesh points at separation eps gives
    e_k >= eps / (2 alpha).  Upper: a covering of the mesh with at most 2^(k-1)
    centers at radius eps gives e_k <= (eps^g + slack^g)^(1/g).
    """
    if b * d > MAX_CELLS:
        raise OracleCapExceeded(f"bd = {b * d} exceeds the exhaustive cap {MAX_CELLS}")
    ball = discretize_ball(params, b, d, n, max_points)
    r, u = params.r, params.u
    dist = ball.distance_matrix(r, u)
    scale = 1.0 / ball.n
    gam = gamma_exponent(r, u)
    alpha = quasi_norm_constant(gam)
    slack = ball.slack(r, u)
    opnorm = embedding_norm(b, d, params)
    levels = np.unique(dist[np.triu_indices(len(dist), 1)])
    npts = len(ball)

    # farthest-first traversal: prefix j is a packing at its j-th insertion gap
    # and covers every mesh point within the (j+1)-th gap
    _, radii = _farthest_first(dist, None, True)
    radii = np.array(radii[1:] + [0.0])          # radii[j-1] = gap at insertion of point j+1

    def pack_count(i: int) -> int:               # packing size at separation levels[i] (>=)
        thr = float(np.nextafter(levels[i], np.float32(-INF)))
        return len(_first_fit(dist, thr, True))

    def cover_count(i: int) -> int:
        return len(_set_cover(dist, float(levels[i])))

    pack = _CountCache(pack_count)
    cover = _CountCache(cover_count)

    ks = list(range(kmin, kmax + 1))
    low_vals, up_vals = [], []
    for k in ks:
        need = 2 ** (k - 1)
        # lower
        lo_val = 0.0
        if need < npts:
            lo_val = float(radii[need - 1]) * scale if need >= 1 else 0.0
            lo_i, hi_i = 0, len(levels) - 1        # largest level with pack > need
            if pack(lo_i) > need:
                while lo_i < hi_i:
                    mid = (lo_i + hi_i + 1) // 2
                    if pack(mid) > need:
                        lo_i = mid
                    else:
                        hi_i = mid - 1
                lo_val = max(lo_val, float(levels[lo_i]) * scale)
        low_vals.append(lo_val / (2 * alpha))
        # upper
        if need >= npts:
            eps = 0.0
        else:
            eps = float(radii[need - 1]) * scale
            lo_i, hi_i = 0, len(levels) - 1        # smallest level with cover <= need
            if cover(hi_i) <= need:
                while lo_i < hi_i:
                    mid = (lo_i + hi_i) // 2
                    if cover(mid) <= need:
                        hi_i = mid
                    else:
                        lo_i = mid + 1
                eps = min(eps, float(levels[lo_i]) * scale)
        up = (eps**gam + slack**gam) ** (1.0 / gam) if eps > 0 else slack
        up_vals.append(min(up, opnorm))
    if kmin == 1:
        up_vals[0] = opnorm
    lower = BoundCurve.from_values(ks, low_vals, "oracle-lower").lower_envelope()
    upper = BoundCurve.from_values(ks, up_vals, "oracle-upper").upper_envelope()
    return OracleResult(lower, upper, ball.delta, npts, slack)
