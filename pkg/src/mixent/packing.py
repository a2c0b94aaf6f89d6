"""Explicit packings of mixed-norm balls and the entropy lower bounds they certify.

A packing certificate stores raw points; ``verify_packing`` re-derives unit-ball
membership, the minimal pairwise distance and the cardinality from those
points alone, so certificates loaded from JSON are checked the same way as
freshly built ones.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (INF, BoundCurve, ExponentTuple, as_exponent, embedding_norm,
                   gamma_exponent, lp_norm, mixed_norm, quasi_norm_constant, recip)
from .designs import build_gv_code, build_subset_family

REL_TOL = 1e-9


class PackingError(ValueError):
    """Invalid input to a packing construction."""


def _dist_tol(value: float) -> float:
    return value * (1 - REL_TOL) - 1e-300


def _distance_blocks(points: np.ndarray, r: float, u: float, chunk_elems: int = 4_000_000):
    """Yield (i0, D) where D[a, j] is the distance between points i0 + a and i0 + 1 + j.

    Entries with i0 + 1 + j <= i0 + a are set to inf so each pair is seen once.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    chunk = max(1, chunk_elems // max(1, pts[0].size * n))
    for i0 in range(0, n - 1, chunk):
        i1 = min(n - 1, i0 + chunk)
        dist = np.atleast_2d(mixed_norm(pts[i0:i1, None] - pts[None, i0 + 1:], r, u))
        rows = np.arange(i0, i1)[:, None]
        cols = np.arange(i0 + 1, n)[None, :]
        yield i0, np.where(cols > rows, dist, INF)


def pairwise_min_distance(points: np.ndarray, r: float, u: float):
    """Minimum ``l_r(l_u)`` distance over distinct pairs and the pair attaining it."""
    best, pair = INF, None
    for i0, dist in _distance_blocks(points, r, u):
        a, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
        if dist[a, j] < best:
            best, pair = float(dist[a, j]), (i0 + int(a), i0 + 1 + int(j))
    return best, pair


def pairs_below(points: np.ndarray, r: float, u: float, threshold: float, limit: int = 20):
    out = []
    for i0, dist in _distance_blocks(points, r, u):
        for a, j in zip(*np.nonzero(dist < threshold)):
            out.append((i0 + int(a), i0 + 1 + int(j), float(dist[a, j])))
            if len(out) >= limit:
                return out
    return out


@dataclass(frozen=True, eq=False)
class BasePacking:
    """Points of the unit ball of l_x^n, separated by eps in l_y^n."""

    points: np.ndarray = field(repr=False)
    eps: float
    min_norm: float
    x_exponent: float = INF
    y_exponent: float = INF

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) == 0:
            raise PackingError("base points must form a non-empty (m, n) array")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "x_exponent", as_exponent(self.x_exponent))
        object.__setattr__(self, "y_exponent", as_exponent(self.y_exponent))
        if not self.eps > 0:
            raise PackingError("separation must be positive")
        if not self.min_norm > 0:
            raise PackingError("min_norm must be positive")
        xn = lp_norm(pts, self.x_exponent, axis=1)
        if np.any(xn > 1 + REL_TOL):
            raise PackingError("base point outside the unit ball")
        yn = lp_norm(pts, self.y_exponent, axis=1)
        if np.any(yn < _dist_tol(self.min_norm)):
            raise PackingError("base point below the declared min_norm")
        if len(pts) > 1:
            sep, _ = pairwise_min_distance(pts[:, None, :], 1.0, self.y_exponent)
            if sep < _dist_tol(self.eps):
                raise PackingError(f"base separation {sep} below eps {self.eps}")

    def __len__(self):
        return len(self.points)

    @classmethod
    def signs(cls) -> "BasePacking":
        """{-1, +1} in [-1, 1]: separation 2, norms 1."""
        return cls(np.array([[-1.0], [1.0]]), 2.0, 1.0, INF, INF)


@dataclass(frozen=True, eq=False)
class PackingCertificate:
    params: ExponentTuple
    shape: tuple[int, int]
    points: np.ndarray = field(repr=False)
    claimed_separation: float
    sparsity: tuple[int, int]
    construction: str
    advertised_count: float = 1.0
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        b, d = self.shape
        if pts.ndim != 3 or pts.shape[1:] != (b, d):
            raise PackingError(f"points must have shape (N, {b}, {d})")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "shape", (int(b), int(d)))

    def __len__(self):
        return len(self.points)

    @property
    def required_count(self) -> int:
        return max(1, math.ceil(self.advertised_count - 1e-9))

    def to_json_dict(self) -> dict:
        return {
            "construction": self.construction,
            "params": self.params.as_dict(),
            "shape": {"b": self.shape[0], "d": self.shape[1]},
            "sparsity": {"s": self.sparsity[0], "t": self.sparsity[1]},
            "separation": self.claimed_separation,
            "advertised_count": self.advertised_count,
            "seed": self.seed,
            "metadata": self.metadata,
            "points": self.points.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "PackingCertificate":
        b, d = int(data["shape"]["b"]), int(data["shape"]["d"])
        pts = np.asarray(data["points"], dtype=float).reshape(-1, b, d)
        return cls(
            params=ExponentTuple.from_dict(data["params"]),
            shape=(b, d),
            points=pts,
            claimed_separation=float(data["separation"]),
            sparsity=(int(data["sparsity"]["s"]), int(data["sparsity"]["t"])),
            construction=str(data.get("construction", "external")),
            advertised_count=float(data.get("advertised_count", 1.0)),
            seed=data.get("seed"),
            metadata=dict(data.get("metadata", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "PackingCertificate":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class PackingVerification:
    ok: bool
    count: int
    required_count: int
    min_distance: float
    closest_pair: tuple[int, int] | None
    max_norm: float
    offending_pairs: tuple = ()
    messages: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "count": self.count,
            "required_count": self.required_count,
            "min_distance": self.min_distance,
            "closest_pair": list(self.closest_pair) if self.closest_pair else None,
            "max_norm": self.max_norm,
            "offending_pairs": [list(p) for p in self.offending_pairs],
            "messages": list(self.messages),
        }


def verify_packing(cert: PackingCertificate) -> PackingVerification:
    """Recompute norms, all pairwise distances and the count from the raw points."""
    prm = cert.params
    messages = []
    norms = np.atleast_1d(mixed_norm(cert.points, prm.p, prm.q))
    max_norm = float(norms.max()) if len(norms) else 0.0
    if max_norm > 1 + 1e-12:
        messages.append(f"point {int(norms.argmax())} has norm {max_norm} > 1")
    if len(cert) > 1:
        min_dist, pair = pairwise_min_distance(cert.points, prm.r, prm.u)
    else:
        min_dist, pair = INF, None
    offending = ()
    if min_dist < _dist_tol(cert.claimed_separation):
        offending = tuple(pairs_below(cert.points, prm.r, prm.u,
                                      _dist_tol(cert.claimed_separation)))
        messages.append(f"minimum distance {min_dist} below claimed {cert.claimed_separation}")
    if len(cert) < cert.required_count:
        messages.append(f"count {len(cert)} below advertised {cert.required_count}")
    return PackingVerification(not messages, len(cert), cert.required_count, min_dist,
                               pair, max_norm, offending, tuple(messages))


def _round_robin(n_words: int, n_supports: int, limit: int | None):
    """(word, support) index pairs cycling over supports first."""
    total = n_words * n_supports
    count = total if limit is None else min(limit, total)
    idx = np.arange(count)
    return idx // n_supports, idx % n_supports


def block_sparse_packing(base: BasePacking, p, r, b: int, s: int, alpha_y: float | None = None,
                         mode: str = "gv", max_points: int | None = None,
                         seed: int = 0, verify: bool = True) -> PackingCertificate:
    """2s-block sparse packing of the unit ball of l_p^b(X) in l_r^b(Y).

    Rows on a support I (one of the 2s-subsets) carry a codeword over the base
    packing, scaled by (2s)^(-1/p).  ``mode="product"`` uses all 2s-tuples of
    base points instead of a code; it is only valid for r = inf.
    """
    p, r = as_exponent(p), as_exponent(r)
    if b < 8:
        raise PackingError("block sparse packing needs b >= 8")
    if not 1 <= s <= b // 8:
        raise PackingError(f"s must lie in [1, {b // 8}]")
    if alpha_y is None:
        alpha_y = quasi_norm_constant(base.y_exponent)
    if base.min_norm < _dist_tol(base.eps / (2 * alpha_y)):
        raise PackingError("base min_norm below eps/(2 alpha_Y)")
    m = len(base)
    family = build_subset_family(b, s, seed=seed)
    if mode == "gv":
        words = build_gv_code(m, s).words
        advertised = (b * m / (32 * s)) ** s
    elif mode == "product":
        if r != INF:
            raise PackingError("product mode requires r = inf")
        if m ** (2 * s) > 10**6:
            raise PackingError("product of base points is too large")
        words = np.array(np.meshgrid(*[np.arange(m)] * (2 * s), indexing="ij")).reshape(2 * s, -1).T
        advertised = (b * m / (8 * s)) ** s
    else:
        raise PackingError(f"unknown mode {mode!r}")
    if max_points is not None and max_points < math.ceil(advertised - 1e-9):
        raise PackingError("max_points below the advertised cardinality")
    widx, sidx = _round_robin(len(words), len(family), max_points)
    n = base.points.shape[1]
    scale = (2 * s) ** (-recip(p))
    pts = np.zeros((len(widx), b, n))
    supports = np.array(family.sets)
    rows = supports[sidx]                      # (N, 2s)
    vals = base.points[words[widx]] * scale    # (N, 2s, n)
    np.put_along_axis(pts, rows[:, :, None].repeat(n, axis=2), vals, axis=1)
    separation = s ** (recip(r) - recip(p)) * base.eps / (2 ** (1 + recip(p)) * alpha_y)
    params = ExponentTuple(p, base.x_exponent, r, base.y_exponent)
    meta = {
        "base_size": m,
        "base_eps": base.eps,
        "base_min_norm": base.min_norm,
        "alpha_Y": alpha_y,
        "mode": mode,
        "words": int(len(words)),
        "supports": int(len(family)),
        "support_method": family.method,
        "truncated": bool(max_points is not None and len(widx) < len(words) * len(family)),
    }
    cert = PackingCertificate(params, (b, n), pts, separation, (s, 0), "block_sparse",
                              advertised, seed, meta)
    return _checked(cert) if verify else cert


def _checked(cert: PackingCertificate) -> PackingCertificate:
    report = verify_packing(cert)
    if not report.ok:
        raise PackingError("construction failed verification: " + "; ".join(report.messages))
    return cert


def two_level_sparse_packing(params: ExponentTuple, b: int, d: int, s: int, t: int,
                             max_points: int | None = 256, seed: int = 0,
                             outer_mode: str = "gv") -> PackingCertificate:
    """(2s, 2t)-sparse packing of the unit ball of l_p^b(l_q^d) in l_r^b(l_u^d).

    The inner level packs l_q^d in l_u^d with 2t-sparse sign vectors, the outer
    level treats those vectors as the base packing.
    """
    if b < 8 or d < 8:
        raise PackingError("two-level packing needs b, d >= 8")
    if not 1 <= t <= d // 8:
        raise PackingError(f"t must lie in [1, {d // 8}]")
    inner = block_sparse_packing(BasePacking.signs(), params.q, params.u, d, t, alpha_y=1.0,
                                 seed=seed)
    inner_pts = inner.points[:, :, 0]
    inner_norm = float(np.min(lp_norm(inner_pts, params.u, axis=1)))
    base = BasePacking(inner_pts, inner.claimed_separation, inner_norm, params.q, params.u)
    outer = block_sparse_packing(base, params.p, params.r, b, s, mode=outer_mode,
                                 max_points=max_points, seed=seed, verify=False)
    bound = (b / (32 * s)) ** s * (d / (8 * t)) ** (s * t)
    meta = dict(outer.metadata)
    meta.update({
        "inner_separation": inner.claimed_separation,
        "inner_count": len(inner),
        "inner_min_norm": inner_norm,
        "outer_advertised_count": outer.advertised_count,
        "rate_separation": s ** (recip(params.r) - recip(params.p))
        * t ** (recip(params.u) - recip(params.q)),
    })
    cert = PackingCertificate(params, (b, d), outer.points, outer.claimed_separation,
                              (s, t), "two_level_sparse", max(bound, 1.0), seed, meta)
    return _checked(cert)


def default_witness(d: int, q, u) -> np.ndarray:
    """x in the unit ball of l_q^d with ||x||_u = ||id: l_q^d -> l_u^d||."""
    q, u = as_exponent(q), as_exponent(u)
    if recip(u) - recip(q) > 0:
        return np.full(d, d ** (-recip(q)))
    x = np.zeros(d)
    x[0] = 1.0
    return x


def row_replication_packing(witness, b: int, s: int, p, r, q=INF, u=INF,
                            seed: int = 0) -> PackingCertificate:
    """Matrices whose rows on a 2s-subset equal (2s)^(-1/p) x, zero elsewhere."""
    p, r, q, u = (as_exponent(e) for e in (p, r, q, u))
    x = np.asarray(witness, dtype=float).ravel()
    d = x.size
    if lp_norm(x, q) > 1 + REL_TOL:
        raise PackingError("witness outside the unit ball of X")
    opnorm = d ** max(0.0, recip(u) - recip(q))
    y_norm = float(lp_norm(x, u))
    if y_norm <= 0 or y_norm < _dist_tol(opnorm / 2):
        raise PackingError("witness Y-norm below ||id||/2")
    if not 0 < 2 * s < b:
        raise PackingError("need 0 < s < b/2")
    family = build_subset_family(b, s, seed=seed)
    scale = (2 * s) ** (-recip(p))
    pts = np.zeros((len(family), b, d))
    for i, members in enumerate(family.sets):
        pts[i, list(members)] = scale * x
    separation = scale * s ** recip(r) * y_norm
    meta = {"witness_y_norm": y_norm, "operator_norm": opnorm, "support_method": family.method}
    cert = PackingCertificate(ExponentTuple(p, q, r, u), (b, d), pts, separation, (s, d),
                              "row_replication", (b / (8 * s)) ** s, seed, meta)
    return _checked(cert)


def certified_index(count: int) -> int:
    """Largest k with 2^(k-1) < count (0 if none)."""
    if count < 1:
        raise ValueError("count must be positive")
    return (count - 1).bit_length()


def packing_to_entropy_lower(cert: PackingCertificate) -> BoundCurve:
    """M points at separation eps give e_k >= eps / (2 alpha) whenever 2^(k-1) < M.

    alpha is the quasi-triangle constant of the target (1 for norms).
    """
    k = certified_index(len(cert))
    if k == 0:
        return BoundCurve(())
    alpha = quasi_norm_constant(gamma_exponent(cert.params.r, cert.params.u))
    return BoundCurve(((k, cert.claimed_separation / (2 * alpha), cert.construction),))


def _extremal_point(params: ExponentTuple, b: int, d: int) -> np.ndarray:
    outer = default_witness(b, params.p, params.r)
    inner = default_witness(d, params.q, params.u)
    return outer[:, None] * inner[None, :]


def antipodal_packing(params: ExponentTuple, b: int, d: int) -> PackingCertificate:
    """{x, -x} for a unit vector x attaining ||id||; separation 2 ||id||."""
    x = _extremal_point(params, b, d)
    sep = 2 * float(mixed_norm(x, params.r, params.u))
    cert = PackingCertificate(params, (b, d), np.stack([x, -x]), sep * (1 - REL_TOL),
                              (b, d), "antipodal", 2, None, {"operator_norm": sep / 2})
    return _checked(cert)


def cube_vertex_packing(params: ExponentTuple, b: int, d: int, max_cells: int = 16) -> PackingCertificate:
    """All sign matrices scaled into the unit ball: 2^(bd) points at separation 2c in l_r(l_u).

    c = b^(-1/p) d^(-1/q); two vertices differ in at least one entry by 2c.
    """
    if b * d > max_cells:
        raise PackingError(f"bd = {b * d} exceeds the vertex cap {max_cells}")
    c = b ** (-recip(params.p)) * d ** (-recip(params.q))
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=b * d))).reshape(-1, b, d)
    cert = PackingCertificate(params, (b, d), c * signs, 2 * c * (1 - REL_TOL), (b, d),
                              "cube_vertices", 2 ** (b * d), None, {"scale": c})
    return _checked(cert)


def packing_certificates(params: ExponentTuple, b: int, d: int, seed: int = 0,
                         max_points: int = 256) -> list[PackingCertificate]:
    """Every applicable construction for this shape, verified."""
    certs = [antipodal_packing(params, b, d)]
    if b * d <= 12:
        certs.append(cube_vertex_packing(params, b, d))
    opnorm = embedding_norm(b, d, params)
    witness = default_witness(d, params.q, params.u)
    if lp_norm(witness, params.u) >= opnorm / 2:
        for s in range(1, (b - 1) // 2 + 1):
            try:
                certs.append(row_replication_packing(witness, b, s, params.p, params.r,
                                                     params.q, params.u, seed=seed))
            except (PackingError, ValueError):
                pass
    if b >= 8 and d >= 8:
        for s in range(1, min(b // 8, 2) + 1):
            for t in range(1, min(d // 8, 2) + 1):
                try:
                    certs.append(two_level_sparse_packing(params, b, d, s, t,
                                                          max_points=max_points, seed=seed))
                except (PackingError, ValueError):
                    pass
    return certs


def packing_lower_curve(params: ExponentTuple, b: int, d: int, kmax: int,
                        seed: int = 0) -> BoundCurve:
    """Best certified lower bound at each k <= kmax (0 where nothing applies)."""
    best = {k: (0.0, "none") for k in range(1, kmax + 1)}
    for cert in packing_certificates(params, b, d, seed=seed):
        for k, v, tag in packing_to_entropy_lower(cert).points:
            for kk in range(1, min(k, kmax) + 1):
                if v > best[kk][0]:
                    best[kk] = (v, tag)
    ks = sorted(best)
    return BoundCurve(tuple((k, *best[k]) for k in ks))
