"""Entropy bounds for embeddings of mixed-smoothness sequence spaces via block decomposition.

The identity splits into blocks id_mu, one per level mu = ||j||_1.  Block mu
acts between scaled mixed-norm spaces with outer dimension b_mu = (mu+1)^(n-1)
and inner dimension d_mu = 2^mu.  An upper bound for e_{2m} combines, in the
rho-th power,

  (a) the low levels 0..L_m, L_m = floor(log2 m), bounded in the large-k regime;
  (b) the middle levels L_m+1..L_m+M_m, M_m = floor(m/8), in the small-k regime;
  (c) the remaining levels through their operator norms (a geometric series).

Constants are set to 1 throughout, so values carry rates, not sharp constants.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import INF, ExponentTuple, as_exponent, format_exponent, recip
from .rates import HypothesisError, weighted_block_hypotheses, weighted_block_rate

log = logging.getLogger(__name__)

FLAVORS = ("b->b", "b->f", "f->b")
M0_SEARCH_LIMIT = 1 << 14


@dataclass(frozen=True)
class SmoothnessParams:
    r0: float
    r1: float
    p0: float
    p1: float
    q0: float
    q1: float
    n: int = 2

    def __post_init__(self):
        for name in ("p0", "p1", "q0", "q1"):
            object.__setattr__(self, name, as_exponent(getattr(self, name)))
        object.__setattr__(self, "r0", float(self.r0))
        object.__setattr__(self, "r1", float(self.r1))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("spatial dimension n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_gap(cls, gap: float, p0, p1, q0, q1, n: int = 2) -> "SmoothnessParams":
        """Parameters with r1 = 0 and r0 = gap."""
        return cls(gap, 0.0, p0, p1, q0, q1, n)

    @property
    def gap(self) -> float:
        return self.r0 - self.r1

    @property
    def integrability_gap(self) -> float:
        return recip(self.p0) - recip(self.p1)

    @property
    def fine_gap(self) -> float:
        return recip(self.q0) - recip(self.q1)

    @property
    def decay(self) -> float:
        """Exponent delta with ||id_mu|| = 2^(-mu delta)."""
        return self.gap - self.integrability_gap

    @property
    def is_compact(self) -> bool:
        return self.decay > 0

    @property
    def is_small_smoothness(self) -> bool:
        return self.integrability_gap < self.gap <= self.fine_gap + 1e-12

    @property
    def rho(self) -> float:
        return min(1.0, self.p1, self.q1)

    def as_dict(self) -> dict:
        return {"r0": self.r0, "r1": self.r1, "p0": format_exponent(self.p0),
                "p1": format_exponent(self.p1), "q0": format_exponent(self.q0),
                "q1": format_exponent(self.q1), "n": self.n}


@dataclass(frozen=True)
class BlockModel:
    """Block dimensions of level mu: b_mu = (mu+1)^(n-1) outer, d_mu = 2^mu inner."""

    n: int

    def outer_dim(self, mu: int) -> int:
        return (mu + 1) ** (self.n - 1)

    def inner_dim(self, mu: int) -> int:
        return 2**mu

    def dims(self, mus: Sequence[int]) -> list[tuple[int, int]]:
        return [(self.outer_dim(mu), self.inner_dim(mu)) for mu in mus]

    @staticmethod
    def weight(mu: int, r: float, p: float) -> float:
        return 2.0 ** (mu * (r - recip(p)))

    def dominance_level(self, horizon: int = 4096) -> int:
        """Smallest mu0 with d_mu >= b_mu for every mu in [mu0, horizon]."""
        mu0 = 0
        for mu in range(horizon + 1):
            # compare logs to avoid huge integers
            if mu * math.log(2) < (self.n - 1) * math.log(mu + 1):
                mu0 = mu + 1
        return mu0


@dataclass(frozen=True)
class _Space:
    """s^r_{p,q}b on the sequence side: smoothness r, integrability p, fine index q."""

    r: float
    p: float
    q: float

    def label(self) -> str:
        return f"s^{self.r:g}_{{{format_exponent(self.p)},{format_exponent(self.q)}}}b"


@dataclass(frozen=True)
class Leg:
    """One b->b embedding used for a part of the decomposition."""

    source: _Space
    target: _Space

    @property
    def exponents(self) -> ExponentTuple:
        # outer exponents are the fine indices, inner ones the integrability exponents
        return ExponentTuple(self.source.q, self.source.p, self.target.q, self.target.p)

    @property
    def alpha(self) -> float:
        return self.source.r - recip(self.source.p)

    @property
    def beta(self) -> float:
        return self.target.r - recip(self.target.p)


@dataclass(frozen=True)
class Routing:
    flavor: str
    low: Leg
    middle: Leg
    diagram: str
    requirements: tuple[tuple[str, bool], ...]


@dataclass
class PipelineResult:
    m: int
    index: int
    value: float
    low: float
    middle: float
    tail: float
    rho: float
    L: int
    M: int
    routing: str
    hypotheses: list[tuple[str, str, bool]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"m": self.m, "index": self.index, "value": self.value, "low": self.low,
                "middle": self.middle, "tail": self.tail, "rho": self.rho, "L": self.L,
                "M": self.M, "routing": self.routing,
                "hypotheses": [list(h) for h in self.hypotheses]}


def block_operator_norm(params: SmoothnessParams, mu: int) -> float:
    """||id_mu|| = 2^(-mu (r0 - r1 - 1/p0 + 1/p1)) with constant 1."""
    if not params.is_compact:
        raise HypothesisError("compactness", "r0 - r1 must exceed 1/p0 - 1/p1")
    return 2.0 ** (-mu * params.decay)


def tail_sum(params: SmoothnessParams, last: int) -> float:
    """sum_{mu > last} ||id_mu||^rho in closed form."""
    if not params.is_compact:
        raise HypothesisError("compactness", "r0 - r1 must exceed 1/p0 - 1/p1")
    x = params.rho * params.decay
    return 2.0 ** (-x * (last + 1)) / (1.0 - 2.0**-x)


def route(params: SmoothnessParams, flavor: str) -> Routing:
    """Choose the factorization for a flavor and list its parameter requirements."""
    P = params
    src = _Space(P.r0, P.p0, P.q0)
    tgt = _Space(P.r1, P.p1, P.q1)
    common = [("q0<q1", P.q0 < P.q1), ("p0<=p1", P.p0 <= P.p1),
              ("1/p0-1/p1<r0-r1<=1/q0-1/q1", P.is_small_smoothness)]
    if flavor == "b->b":
        leg = Leg(src, tgt)
        return Routing(flavor, leg, leg, "direct", tuple(common))
    if flavor == "b->f":
        reqs = common + [("p1<inf", P.p1 < INF), ("q0<p0", P.q0 < P.p0)]
        if P.p1 >= P.q1:
            leg = Leg(src, tgt)
            return Routing(flavor, leg, leg, "through s^r1_{p1,q1}b (p1>=q1)", tuple(reqs))
        low = Leg(src, _Space(P.r1, P.q1, P.q1))
        mid = Leg(src, _Space(P.r1, P.p1, P.p1))
        return Routing(flavor, low, mid, "through s^r1_{q1,q1}b and s^r1_{p1,p1}b (p1<q1)",
                       tuple(reqs))
    if flavor == "f->b":
        reqs = common + [("p1<inf", P.p1 < INF), ("q1>p1", P.q1 > P.p1)]
        if P.p0 <= P.q0:
            leg = Leg(src, tgt)
            return Routing(flavor, leg, leg, "through s^r0_{p0,q0}b (p0<=q0)", tuple(reqs))
        low = Leg(_Space(P.r0, P.q0, P.q0), tgt)
        mid = Leg(_Space(P.r0, P.p0, P.p0), tgt)
        return Routing(flavor, low, mid, "through s^r0_{q0,q0}b and s^r0_{p0,p0}b (p0>q0)",
                       tuple(reqs))
    if flavor == "f->f":
        raise HypothesisError("flavor", "the f->f case is not covered")
    raise ValueError(f"unknown flavor {flavor!r}")


def _levels(m: int) -> tuple[int, int]:
    return int(math.floor(math.log2(m))), m // 8


def pipeline_hypotheses(params: SmoothnessParams, m: int, flavor: str = "b->b"):
    """Every check the pipeline performs at m, as (part, name, ok) triples."""
    out = [("params", name, ok) for name, ok in route(params, flavor).requirements]
    out.append(("params", "compactness", params.is_compact))
    if m < 1:
        return out + [("params", "m>=1", False)]
    rt = route(params, flavor)
    L, M = _levels(m)
    model = BlockModel(params.n)
    low_dims = model.dims(range(0, L + 1))
    out += [("low", name, ok) for name, ok in weighted_block_hypotheses(
        rt.low.alpha, rt.low.beta, rt.low.exponents, low_dims, m, "large_k")]
    if M >= 1:
        mid_dims = model.dims(range(L + 1, L + M + 1))
        out += [("middle", name, ok) for name, ok in weighted_block_hypotheses(
            rt.middle.alpha, rt.middle.beta, rt.middle.exponents, mid_dims, m, "small_k")]
    return out


def besov_upper_pipeline(params: SmoothnessParams, m: int, flavor: str = "b->b") -> PipelineResult:
    """Upper bound for e_{2m} of the embedding, assembled from the three parts."""
    if flavor not in FLAVORS:
        route(params, flavor)              # raises with a precise message
    checks = pipeline_hypotheses(params, m, flavor)
    log.debug("besov %s m=%d checks=%s", flavor, m, checks)
    for part, name, ok in checks:
        if not ok:
            raise HypothesisError(name, f"{part} part fails {name} at m={m} ({flavor})")
    rt = route(params, flavor)
    L, M = _levels(m)
    model = BlockModel(params.n)
    rho = params.rho
    low = weighted_block_rate(rt.low.alpha, rt.low.beta, rt.low.exponents,
                              model.dims(range(0, L + 1)), m, "large_k")
    middle = 0.0
    if M >= 1:
        middle = weighted_block_rate(rt.middle.alpha, rt.middle.beta, rt.middle.exponents,
                                     model.dims(range(L + 1, L + M + 1)), m, "small_k")
    tail = tail_sum(params, L + M)
    value = (low**rho + middle**rho + tail) ** (1.0 / rho)
    return PipelineResult(m, 2 * m, float(value), low, middle, tail, rho, L, M,
                          rt.diagram, checks)


def minimal_m0(params: SmoothnessParams, flavor: str = "b->b",
               limit: int = M0_SEARCH_LIMIT) -> int:
    """Smallest m from which every pipeline check passes (checked up to ``limit``)."""
    static = [c for c in pipeline_hypotheses(params, 1, flavor) if c[0] == "params"]
    for part, name, ok in static:
        if not ok:
            raise HypothesisError(name, f"parameters fail {name}")
    ok_from = None
    m = 1
    while m <= limit:
        good = all(ok for _, _, ok in pipeline_hypotheses(params, m, flavor))
        if good and ok_from is None:
            ok_from = m
        elif not good:
            ok_from = None
        m += 1 if m < 1024 else max(1, m // 64)
    if ok_from is None:
        raise HypothesisError("m0", f"no m <= {limit} satisfies every check")
    return ok_from


def geometric_grid(mmin: int, mmax: int, per_octave: int = 1) -> list[int]:
    if mmin < 1 or mmax < mmin:
        raise ValueError("need 1 <= mmin <= mmax")
    count = int(round(per_octave * math.log2(mmax / mmin))) + 1
    return sorted({int(round(x)) for x in np.geomspace(mmin, mmax, count)})


def fit_slope(ms: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(value) against log(m)."""
    if len(ms) < 4:
        raise ValueError("need at least 4 grid points to fit a slope")
    x, y = np.log(np.asarray(ms, float)), np.log(np.asarray(values, float))
    return float(np.polyfit(x, y, 1)[0])


def fit_rate_slope(params: SmoothnessParams | Callable[[int], float], m_range: Sequence[int],
                   flavor: str = "b->b") -> float:
    """Slope of the pipeline (or any positive function of m) on a log-log scale."""
    ms = list(m_range)
    if len(ms) < 4:
        raise ValueError("need at least 4 grid points to fit a slope")
    if callable(params) and not isinstance(params, SmoothnessParams):
        vals = [float(params(m)) for m in ms]
    else:
        vals = [besov_upper_pipeline(params, m, flavor).value for m in ms]
    return fit_slope(ms, vals)
