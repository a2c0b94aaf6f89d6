"""Closed-form entropy rates with implied constants set to 1.

Every calculator reports the regime that produced its value.  Where the index
sits on the boundary of two regimes, all formulas whose interval contains it
are evaluated and the largest wins; ``boundary`` is then set and ``branches``
lists every candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import INF, BoundCurve, ExponentTuple, as_exponent, recip

CONVENTION = "implied-constant=1"


class HypothesisError(ValueError):
    """A calculator was asked for a value outside the hypotheses of its statement."""

    def __init__(self, hypothesis: str, message: str):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis


@dataclass(frozen=True)
class RegimeResult:
    value: float
    regime: str
    boundary: bool = False
    branches: tuple[tuple[str, float], ...] = ()
    constants_convention: str = CONVENTION

    def __float__(self):
        return float(self.value)

    @property
    def boundary_ratio(self) -> float:
        """Largest over smallest candidate value (1 off boundaries)."""
        vals = [v for _, v in self.branches] or [self.value]
        return max(vals) / min(vals)


def _pick(candidates: Sequence[tuple[str, float]]) -> RegimeResult:
    if not candidates:
        raise HypothesisError("unclassified", "no regime contains this index")
    label, value = max(candidates, key=lambda c: c[1])
    return RegimeResult(float(value), label, len(candidates) > 1, tuple(candidates))


def _pow(base: float, exponent: float) -> float:
    if exponent == 0:
        return 1.0
    return float(base) ** exponent


# ---------------------------------------------------------------- Schuett


def schuett_rate(p, q, k: float, b: int) -> RegimeResult:
    """e_k(id: l_p^b -> l_q^b) for p <= q."""
    p, q = as_exponent(p), as_exponent(q)
    if p > q:
        raise HypothesisError("p<=q", f"need p <= q, got p={p}, q={q}")
    if k < 1 or b < 1:
        raise ValueError("k and b must be >= 1")
    gap = recip(p) - recip(q)
    lb = math.log(b)
    cands = []
    if k <= lb:
        cands.append(("1", 1.0))
    if lb <= k <= b:
        cands.append(("2", _pow(math.log1p(b / k) / k, gap)))
    if k >= b:
        cands.append(("3", 2.0 ** (-(k - 1) / b) * _pow(b, -gap)))
    return _pick(cands)


def schuett_curve(p, q, b: int, kmax: int, kmin: int = 1) -> BoundCurve:
    ks = range(kmin, kmax + 1)
    res = [schuett_rate(p, q, k, b) for k in ks]
    return BoundCurve.from_values(ks, [r.value for r in res], [r.regime for r in res])


# ---------------------------------------------------------------- profiles


@dataclass(frozen=True, eq=False)
class InnerEntropyProfile:
    """l -> e_l(id: X -> Y) on the index range [lo, hi]."""

    func: Callable[[int], float] = field(repr=False)
    lo: int = 1
    hi: int = 10**9
    label: str = "profile"
    op_norm: float = 1.0

    def covers(self, m: int, k: int) -> bool:
        return self.lo <= m and k <= self.hi

    def __call__(self, ell: int) -> float:
        if not self.lo <= ell <= self.hi:
            raise ValueError(f"index {ell} outside the profile range [{self.lo}, {self.hi}]")
        return float(self.func(int(ell)))

    def values(self, lo: int, hi: int) -> np.ndarray:
        if not self.covers(lo, hi):
            raise ValueError(f"profile covers [{self.lo}, {self.hi}], needed [{lo}, {hi}]")
        return np.array([self.func(ell) for ell in range(lo, hi + 1)], dtype=float)

    @classmethod
    def constant(cls, value: float = 1.0, hi: int = 10**9) -> "InnerEntropyProfile":
        return cls(lambda ell: value, 1, hi, f"constant({value})", value)

    @classmethod
    def from_table(cls, values: Sequence[float], start: int = 1,
                   op_norm: float | None = None) -> "InnerEntropyProfile":
        vals = [float(v) for v in values]
        if any(v <= 0 for v in vals):
            raise ValueError("profile values must be positive")
        if any(b > a * (1 + 1e-12) for a, b in zip(vals, vals[1:])):
            raise ValueError("profile must be nonincreasing")
        norm = vals[0] if op_norm is None else op_norm
        return cls(lambda ell: vals[ell - start], start, start + len(vals) - 1, "table", norm)

    @classmethod
    def schuett(cls, q, u, d: int) -> "InnerEntropyProfile":
        """Rate profile of id: l_q^d -> l_u^d (operator norm 1 for q <= u)."""
        q, u = as_exponent(q), as_exponent(u)
        return cls(lambda ell: schuett_rate(q, u, ell, d).value, 1, 10**9,
                   f"schuett({q},{u},{d})", 1.0)


# ---------------------------------------------------------------- abstract bounds


def edne_D(m: int, k: int, p, r, profile: InnerEntropyProfile) -> float:
    """max over m <= l <= k of (l/k)^(1/p-1/r) e_l."""
    p, r = as_exponent(p), as_exponent(r)
    if not 1 <= m <= k:
        raise ValueError("need 1 <= m <= k")
    gap = recip(p) - recip(r)
    ells = np.arange(m, k + 1, dtype=float)
    vals = profile.values(m, k)
    weights = np.ones_like(ells) if gap == 0 else (ells / k) ** gap
    return float(np.max(weights * vals))


def edne_A(k: int, b: int, p, r, op_norm: float, profile: InnerEntropyProfile) -> float:
    """max{||id|| (log(eb/k)/k)^(1/p-1/r), D(1, k)}."""
    p, r = as_exponent(p), as_exponent(r)
    gap = recip(p) - recip(r)
    first = op_norm * _pow(math.log(math.e * b / k) / k, gap)
    return max(first, edne_D(1, k, p, r, profile))


class _RangeMax:
    """Sparse table for O(1) range maxima over a fixed array (1-based indices)."""

    def __init__(self, values: np.ndarray):
        self.levels = [np.asarray(values, dtype=float)]
        width = 1
        while 2 * width <= len(values):
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-width], prev[width:]))
            width *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        lo = np.asarray(lo, dtype=np.int64) - 1
        hi = np.asarray(hi, dtype=np.int64) - 1
        span = hi - lo + 1
        j = np.floor(np.log2(span)).astype(np.int64)
        out = np.empty(len(lo))
        for level in np.unique(j):
            sel = j == level
            tab = self.levels[level]
            out[sel] = np.maximum(tab[lo[sel]], tab[hi[sel] - (1 << level) + 1])
        return out


def proof_scan_curve(params: ExponentTuple, b: int, d: int, ks: Sequence[int]) -> np.ndarray:
    """Vectorized ``proof_scan_rate`` over many k."""
    _check_monotone(params)
    ks = np.asarray(list(ks), dtype=np.int64)
    if len(ks) == 0:
        return np.zeros(0)
    gp = recip(params.p) - recip(params.r)
    kmax = int(ks.max())
    ells = np.arange(1, kmax + 1, dtype=float)
    profile = np.array([schuett_rate(params.q, params.u, ell, d).value for ell in range(1, kmax + 1)])
    if b == 1:
        return profile[ks - 1]
    table = _RangeMax(ells ** gp * profile)
    kf = ks.astype(float)
    out = np.empty(len(ks))
    small = ks <= b
    if small.any():
        dvals = table.query(np.ones(small.sum()), ks[small]) * kf[small] ** (-gp)
        first = (np.log(math.e * b / kf[small]) / kf[small]) ** gp if gp else np.ones(small.sum())
        out[small] = np.maximum(first, dvals)
    large = ~small
    if large.any():
        lo = -(-ks[large] // b)
        out[large] = table.query(lo, ks[large]) * kf[large] ** (-gp)
    out[ks < math.log2(b)] = 1.0
    return out


def proof_scan_rate(params: ExponentTuple, b: int, d: int, k: int) -> float:
    """A(k,b) for k <= b and D(ceil(k/b), k) for k >= b, with the Schuett profile of l_q^d -> l_u^d."""
    return float(proof_scan_curve(params, b, d, [k])[0])


# ---------------------------------------------------------------- matching bounds


def _check_monotone(params: ExponentTuple):
    if not params.is_embedding_monotone:
        raise HypothesisError("p<=r,q<=u", f"embedding exponents not monotone: {params.as_dict()}")


def matching_case(params: ExponentTuple, b: int, d: int) -> str:
    """Which branch of the middle range applies: 'i.a', 'i.b', 'i.c' or 'ii'."""
    _check_monotone(params)
    gp, gq = params.outer_gap, params.inner_gap
    if gq >= gp:
        return "ii"
    if params.q == params.u:
        return "i.a"
    return "i.b" if b <= d else "i.c"


def matching_rate(params: ExponentTuple, b: int, d: int, k: float) -> RegimeResult:
    """Two-sided rate of e_k(id: l_p^b(l_q^d) -> l_r^b(l_u^d)).

    Real k is accepted so that formulas can be compared at non-integer
    regime boundaries.
    """
    case = matching_case(params, b, d)
    if k < 1:
        raise ValueError("k must be >= 1")
    gp, gq = params.outer_gap, params.inner_gap
    n = b * d
    big_l = math.log(n)
    log = math.log
    e = math.e
    cands = []
    if k <= big_l:
        cands.append(("small", 1.0))
    if k >= n:
        cands.append(("large", _pow(b, -gp) * _pow(d, -gq) * 2.0 ** (-(k - 1) / n)))
    if big_l <= k <= n:
        def tail_d():
            return _pow(d / k, gp) * _pow(d, -gq)

        if case == "i.a":
            if k <= d:
                cands.append(("i.a:1", 1.0))
            if k >= d:
                cands.append(("i.a:2", _pow((log(e * b / k) + d) / k, gp)))
        elif case == "i.b":
            if k <= d:
                cands.append(("i.b:1", _pow(log(e * d / k) / k, gq)))
            if k >= d:
                cands.append(("i.b:2", tail_d()))
        elif case == "i.c":
            outer = _pow(log(e * b / k) / k, gp)
            if k <= d:
                cands.append(("i.c:1", max(outer, _pow(log(e * d / k) / k, gq))))
            if d <= k <= b:
                cands.append(("i.c:2", max(outer, tail_d())))
            if k >= b:
                cands.append(("i.c:3", tail_d()))
        else:
            knee = b * log(d)
            if k <= knee:
                cands.append(("ii:1", _pow(log(e * n / k) / k, gp)))
            if k >= knee:
                cands.append(("ii:2", _pow(b, -gp) * _pow(b * log(e * n / k) / k, gq)))
    return _pick(cands)


def matching_curve(params: ExponentTuple, b: int, d: int, kmax: int, kmin: int = 1) -> BoundCurve:
    ks = range(kmin, kmax + 1)
    res = [matching_rate(params, b, d, k) for k in ks]
    return BoundCurve.from_values(ks, [r.value for r in res], [r.regime for r in res])


def regime_boundaries(params: ExponentTuple, b: int, d: int) -> list[float]:
    """Regime boundaries of ``matching_rate`` inside [1, bd]."""
    case = matching_case(params, b, d)
    n = b * d
    pts = {math.log(n), float(n)}
    if case in ("i.a", "i.b", "i.c"):
        pts.add(float(d))
    if case == "i.c":
        pts.add(float(b))
    if case == "ii":
        pts.add(b * math.log(d))
    return sorted(x for x in pts if math.log(n) <= x <= n and x >= 1)


def schuett_boundaries(b: int) -> list[float]:
    return sorted({x for x in (math.log(b), float(b)) if x >= 1})


# ---------------------------------------------------------------- volumes


def lp_ball_volume(p, n: int) -> float:
    """Volume of the unit ball of l_p^n."""
    p = as_exponent(p)
    if p == INF:
        return 2.0 ** n
    return math.exp(n * math.log(2 * math.gamma(1 + 1 / p)) - math.lgamma(1 + n / p))


def mixed_ball_volume_root(p, b: int, d: int, vol_bx_root: float) -> float:
    """vol(B_{l_p^b(X)})^(1/(bd)) for a d-dimensional X with vol(B_X)^(1/d) given."""
    p = as_exponent(p)
    if p == INF:
        return float(vol_bx_root)
    log_ratio = math.lgamma(1 + d / p) / d - math.lgamma(1 + d * b / p) / (d * b)
    return math.exp(log_ratio) * float(vol_bx_root)


def volumetric_entropy_bound(p, r, b: int, d: int, k: int) -> float:
    """b^(-(1/p-1/r)) 2^(-(k-1)/(bd)) for k >= bd."""
    p, r = as_exponent(p), as_exponent(r)
    if k < b * d:
        raise HypothesisError("k>=bd", f"volumetric bound needs k >= bd = {b * d}, got {k}")
    return _pow(b, -(recip(p) - recip(r))) * 2.0 ** (-(k - 1) / (b * d))


# ---------------------------------------------------------------- weighted blocks


def weighted_block_hypotheses(alpha: float, beta: float, params: ExponentTuple,
                              dims: Sequence[tuple[int, int]], k: int,
                              regime: str) -> list[tuple[str, bool]]:
    """Named hypothesis checks for the large-k / small-k weighted block bounds."""
    gp, gq = params.outer_gap, params.inner_gap
    nb = len(dims)
    ds = [dm for _, dm in dims]
    checks = [
        ("p<=r,q<=u", params.is_embedding_monotone),
        ("1/p-1/r>1/q-1/u>=0", gp > gq >= 0),
        ("k>=8b", k >= 8 * nb),
    ]
    if regime == "large_k":
        checks.append(("alpha-beta<=1/p-1/r-(1/q-1/u)", alpha - beta <= gp - gq + 1e-12))
        checks.append(("k>=max d_mu", k >= max(ds)))
    elif regime == "small_k":
        checks.append(("alpha-beta>0", alpha - beta > 0))
        checks.append(("k<=min d_mu", k <= min(ds)))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return checks


def weighted_block_rate(alpha: float, beta: float, params: ExponentTuple,
                        dims: Sequence[tuple[int, int]], k: int, regime: str) -> float:
    """k^(-(alpha-beta+1/q-1/u)) under the hypotheses of the chosen regime."""
    if not dims:
        raise ValueError("need at least one block")
    for name, ok in weighted_block_hypotheses(alpha, beta, params, dims, k, regime):
        if not ok:
            raise HypothesisError(name, f"{name} violated ({regime}, k={k}, blocks={len(dims)})")
    return float(k) ** (-(alpha - beta + params.inner_gap))
