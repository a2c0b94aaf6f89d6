"""Exponent arithmetic, mixed (quasi-)norms and the entropy-number calculus.

Entropy numbers use the convention that ``e_k`` is the smallest radius for
which ``2**(k-1)`` balls suffice.  Exponents are plain floats with
``math.inf`` standing for the sup-norm.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

INF = math.inf


def as_exponent(value) -> float:
    """Parse an exponent in (0, inf]; accepts the literal ``"inf"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return INF
        if "/" in text:
            num, den = text.split("/", 1)
            value = float(num) / float(den)
        else:
            value = float(text)
    value = float(value)
    if not value > 0 or math.isnan(value):
        raise ValueError(f"exponent must lie in (0, inf], got {value!r}")
    return value


def recip(p: float) -> float:
    """1/p with 1/inf = 0 exactly."""
    return 0.0 if p == INF else 1.0 / p


def format_exponent(p: float) -> str:
    return "inf" if p == INF else repr(float(p))


@dataclass(frozen=True)
class ExponentTuple:
    """Exponents of the embedding l_p^b(l_q^d) -> l_r^b(l_u^d)."""

    p: float
    q: float
    r: float
    u: float

    def __post_init__(self):
        for name in ("p", "q", "r", "u"):
            object.__setattr__(self, name, as_exponent(getattr(self, name)))

    @property
    def outer_gap(self) -> float:
        return recip(self.p) - recip(self.r)

    @property
    def inner_gap(self) -> float:
        return recip(self.q) - recip(self.u)

    @property
    def is_embedding_monotone(self) -> bool:
        return self.p <= self.r and self.q <= self.u

    def as_dict(self) -> dict:
        return {k: format_exponent(getattr(self, k)) for k in ("p", "q", "r", "u")}

    @classmethod
    def from_dict(cls, data: dict) -> "ExponentTuple":
        return cls(*(as_exponent(data[k]) for k in ("p", "q", "r", "u")))


def as_mixed_matrix(x) -> np.ndarray:
    """Validate a b x d real matrix with finite entries."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("a mixed matrix must be a non-empty 2-d array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("mixed matrix entries must be finite")
    return arr


def lp_norm(a, p: float, axis=-1) -> np.ndarray:
    """(Quasi-)norm ``(sum |a|^p)^(1/p)`` along ``axis``; max for p = inf."""
    a = np.abs(np.asarray(a, dtype=float))
    if p == INF:
        return a.max(axis=axis)
    if p == 1:
        return a.sum(axis=axis)
    if p == 2:
        return np.sqrt(np.square(a).sum(axis=axis))
    if p == 0.5:
        return np.square(np.sqrt(a).sum(axis=axis))
    # scale by the max entry to keep powers in range
    top = a.max(axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    out = np.power(np.power(a / safe, p).sum(axis=axis), 1.0 / p)
    return out * np.squeeze(safe, axis=axis)


def mixed_norm(x, p: float, q: float) -> float | np.ndarray:
    """Mixed norm of a matrix (or a stack of matrices on the last two axes).

    Inner l_q-norm over each row, outer l_p-norm over the rows.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    value = lp_norm(lp_norm(arr, q, axis=-1), p, axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def gamma_exponent(*exponents: float) -> float:
    """Largest gamma <= 1 for which a mixed norm with these exponents is a gamma-norm."""
    return min([1.0, *exponents])


def quasi_norm_constant(gamma: float) -> float:
    """Constant alpha with ||x+y|| <= alpha (||x|| + ||y||) for a gamma-norm."""
    gamma = as_exponent(gamma)
    if gamma >= 1:
        return 1.0
    return 2.0 ** (1.0 / gamma - 1.0)


def embedding_norm(b: int, d: int, params: ExponentTuple) -> float:
    """Operator norm of id: l_p^b(l_q^d) -> l_r^b(l_u^d)."""
    outer = b ** max(0.0, recip(params.r) - recip(params.p))
    inner = d ** max(0.0, recip(params.u) - recip(params.q))
    return float(outer * inner)


def sandwich_check(packing_count_at_2eps: int, covering_count_at_eps: int,
                   packing_count_at_eps: int) -> bool:
    """True iff M_{2 eps} <= N_eps <= M_eps."""
    for count in (packing_count_at_2eps, covering_count_at_eps, packing_count_at_eps):
        if count < 0:
            raise ValueError("counts must be nonnegative")
    return packing_count_at_2eps <= covering_count_at_eps <= packing_count_at_eps


@dataclass(frozen=True)
class BoundCurve:
    """Finite curve k -> (value, regime); k strictly increasing."""

    points: tuple[tuple[int, float, str], ...]

    def __post_init__(self):
        pts = tuple((int(k), float(v), str(tag)) for k, v, tag in self.points)
        ks = [k for k, _, _ in pts]
        if any(k < 1 for k in ks):
            raise ValueError("curve indices must be positive")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("curve indices must be strictly increasing")
        if any(not (v >= 0) or math.isnan(v) for _, v, _ in pts):
            raise ValueError("curve values must be nonnegative")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_values(cls, ks: Iterable[int], values: Iterable[float],
                    regime: str | Sequence[str] = "") -> "BoundCurve":
        ks = list(ks)
        values = list(values)
        tags = [regime] * len(ks) if isinstance(regime, str) else list(regime)
        return cls(tuple(zip(ks, values, tags)))

    @classmethod
    def constant(cls, value: float, kmax: int, regime: str = "constant") -> "BoundCurve":
        return cls.from_values(range(1, kmax + 1), [value] * kmax, regime)

    @property
    def ks(self) -> list[int]:
        return [k for k, _, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [v for _, v, _ in self.points]

    def __len__(self):
        return len(self.points)

    def as_dict(self) -> dict[int, float]:
        return {k: v for k, v, _ in self.points}

    def value_at(self, k: int) -> float:
        for kk, v, _ in self.points:
            if kk == k:
                return v
        raise KeyError(k)

    def is_nonincreasing(self, rtol: float = 1e-12) -> bool:
        vals = self.values
        return all(b <= a * (1 + rtol) + 1e-300 for a, b in zip(vals, vals[1:]))

    def upper_envelope(self) -> "BoundCurve":
        """Running minimum: an upper bound at k also bounds every later index."""
        out, best, tag = [], INF, ""
        for k, v, t in self.points:
            if v < best:
                best, tag = v, t
            out.append((k, best, tag))
        return BoundCurve(tuple(out))

    def lower_envelope(self) -> "BoundCurve":
        """Running maximum from the right: a lower bound at k also bounds earlier indices."""
        out, best, tag = [], -INF, ""
        for k, v, t in reversed(self.points):
            if v > best:
                best, tag = v, t
            out.append((k, best, tag))
        return BoundCurve(tuple(reversed(out)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "value", "regime"])
        for k, v, t in self.points:
            writer.writerow([k, repr(v), t])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BoundCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(tuple((int(r["k"]), float(r["value"]), r["regime"]) for r in rows))


def _combine_curves(curve1: BoundCurve, curve2: BoundCurve, combine, tag: str) -> BoundCurve:
    best: dict[int, tuple[float, str]] = {}
    for k1, v1, _ in curve1.points:
        for k2, v2, _ in curve2.points:
            k = k1 + k2 - 1
            value = combine(v1, v2)
            if k not in best or value < best[k][0]:
                best[k] = (value, f"{tag}({k1},{k2})")
    ks = sorted(best)
    raw = BoundCurve(tuple((k, *best[k]) for k in ks))
    return raw.upper_envelope()


def sum_rule(curve1: BoundCurve, curve2: BoundCurve, vartheta: float = 1.0) -> BoundCurve:
    """Upper bound for e_k(T1 + T2) in a vartheta-normed target."""
    if not 0 < vartheta <= 1:
        raise ValueError("vartheta must lie in (0, 1]")

    def combine(a, b):
        return (a ** vartheta + b ** vartheta) ** (1.0 / vartheta)

    return _combine_curves(curve1, curve2, combine, "sum")


def composition_rule(curve_r: BoundCurve, curve_s: BoundCurve) -> BoundCurve:
    """Upper bound e_{k1+k2-1}(R S) <= e_{k1}(R) e_{k2}(S), minimized over splits."""
    return _combine_curves(curve_r, curve_s, lambda a, b: a * b, "comp")


def compose_with_norm(curve_r: BoundCurve, norm_s: float) -> BoundCurve:
    """e_k(R S) <= e_k(R) ||S||."""
    if norm_s < 0:
        raise ValueError("operator norm must be nonnegative")
    return BoundCurve(tuple((k, v * norm_s, t) for k, v, t in curve_r.points))
