"""The dyadic grid obtained by rounding simplex points up to powers of two.

A grid vector is stored through its integer levels ``k_i`` with
``v_i = 2**k_i / b``.  A level vector is the image of some simplex point iff
``sum(2**(k_i - 1) for k_i >= 1) <= b - 1``; ``simplex_mesh_image`` computes
the image directly and is used to check that characterization for small b.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import INF, as_exponent

MAX_ENUM_DIM = 14


@dataclass(frozen=True)
class GridVector:
    b: int
    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(k) for k in self.levels)
        if len(levels) != self.b or any(k < 0 for k in levels):
            raise ValueError("levels must be b nonnegative integers")
        object.__setattr__(self, "levels", levels)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(2**k, self.b) for k in self.levels)

    def as_floats(self) -> np.ndarray:
        return np.ldexp(1.0, np.array(self.levels)) / self.b

    @property
    def l1_mass(self) -> Fraction:
        return Fraction(sum(2**k for k in self.levels), self.b)

    @property
    def cost(self) -> int:
        return level_cost(self.levels)

    @property
    def is_admissible(self) -> bool:
        return self.cost <= self.b - 1

    def dominates(self, x, tol: float = 1e-12) -> bool:
        return bool(np.all(np.asarray(x, dtype=float) <= self.as_floats() + tol))

    def as_strings(self) -> list[str]:
        out = []
        for v in self.values:
            out.append(f"{v.numerator}/{v.denominator}")
        return out


def level_cost(levels) -> int:
    return sum(2 ** (k - 1) for k in levels if k >= 1)


def upsilon0(t: float) -> int:
    """Smallest power of two that is >= max(t, 1)."""
    t = float(t)
    if t < 0 or math.isnan(t):
        raise ValueError("upsilon0 is defined on nonnegative reals")
    if t <= 1:
        return 1
    mant, exp = math.frexp(t)
    # t = mant * 2**exp with 0.5 <= mant < 1
    return 2 ** (exp - 1) if mant == 0.5 else 2**exp


def _level0(t: float) -> int:
    return upsilon0(t).bit_length() - 1


def validate_simplex_point(x, tol: float = 1e-12) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("simplex point must be a non-empty vector")
    if np.any(arr < 0) or arr.sum() > 1 + tol or np.any(arr > 1 + tol):
        raise ValueError("not a point of the simplex")
    return arr


def upsilon(x) -> GridVector:
    """Round a simplex point componentwise up to the dyadic grid."""
    arr = validate_simplex_point(x)
    b = arr.size
    return GridVector(b, tuple(_level0(b * xi) for xi in arr))


def enumerate_levels(b: int) -> np.ndarray:
    """All admissible level vectors as an (N, b) integer array, lexicographically sorted."""
    if b < 1:
        raise ValueError("b must be positive")
    if b > MAX_ENUM_DIM:
        raise ValueError(f"exhaustive enumeration is capped at b <= {MAX_ENUM_DIM}")
    budget = b - 1
    choices = [(0, 0)]
    k, c = 1, 1
    while c <= budget:
        choices.append((k, c))
        k, c = k + 1, c * 2
    levels = np.zeros((1, 0), dtype=np.int8)
    spent = np.zeros(1, dtype=np.int64)
    for _ in range(b):
        new_levels, new_spent = [], []
        for lev, cost in choices:
            keep = spent + cost <= budget
            if not keep.any():
                continue
            block = np.hstack([levels[keep], np.full((keep.sum(), 1), lev, dtype=np.int8)])
            new_levels.append(block)
            new_spent.append(spent[keep] + cost)
        levels = np.vstack(new_levels)
        spent = np.concatenate(new_spent)
    order = np.lexsort(levels.T[::-1])
    return levels[order]


def enumerate_grid(b: int) -> list[GridVector]:
    return [GridVector(b, tuple(row)) for row in enumerate_levels(b).tolist()]


def grid_size(b: int) -> int:
    return len(enumerate_levels(b))


def max_l1_mass(b: int) -> Fraction:
    """Largest l1-mass over the grid, by dynamic programming over the budget.

    Zero levels contribute 1/b each, a level k >= 1 contributes 2**k / b at a
    budget cost of 2**(k-1); so the best vector spends the whole budget on as
    few coordinates as possible.
    """
    if b < 1:
        raise ValueError("b must be positive")
    budget = b - 1
    # best[c] = max over multisets of powers of two with total cost c of (2*c - count)
    neg = -(10**18)
    best = [neg] * (budget + 1)
    best[0] = 0
    power = 1
    while power <= budget:
        for c in range(power, budget + 1):
            if best[c - power] > neg:
                best[c] = max(best[c], best[c - power] + 2 * power - 1)
        power *= 2
    # a coordinate switched from level 0 to level k gains 2**k - 1
    gain = max(v for v in best if v > neg)
    return Fraction(b + gain, b)


def transform_grid(grid, p: float) -> list[tuple[float, ...]]:
    """Componentwise power 1/p of grid vectors, deduplicated, order preserving."""
    p = as_exponent(p)
    seen: dict[tuple[float, ...], None] = {}
    for v in grid:
        vals = v.as_floats() if isinstance(v, GridVector) else np.asarray(v, dtype=float)
        if p == INF:
            key = tuple(1.0 for _ in vals)
        elif p == 1:
            key = tuple(float(t) for t in vals)
        else:
            key = tuple(float(t) ** (1.0 / p) for t in vals)
        seen.setdefault(key, None)
    return list(seen)


def simplex_mesh_image(b: int, n: int) -> set[tuple[int, ...]]:
    """Level vectors of upsilon over all mesh points c/n of the simplex."""
    out = set()
    for c in itertools.product(range(n + 1), repeat=b):
        if sum(c) > n:
            continue
        out.add(tuple(_level0(b * ci / n) for ci in c))
    return out


def random_simplex_points(b: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points of S(b): uniform on the solid simplex, plus faces hit by zeroing coordinates."""
    e = rng.exponential(size=(count, b + 1))
    pts = e[:, :b] / e.sum(axis=1, keepdims=True)
    mask = rng.random((count, b)) < 0.2
    pts[mask] = 0.0
    return pts


def levels_of(points: np.ndarray) -> np.ndarray:
    """Vectorized upsilon on a batch of simplex points, returned as levels."""
    pts = np.asarray(points, dtype=float)
    b = pts.shape[-1]
    t = b * pts
    levels = np.zeros(t.shape, dtype=np.int64)
    big = t > 1
    if big.any():
        mant, exp = np.frexp(t[big])
        levels[big] = np.where(mant == 0.5, exp - 1, exp)
    return levels
