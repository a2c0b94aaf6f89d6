"""Greedy Gilbert-Varshamov codes and 2s-subset families with small pairwise overlaps."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

GV_WORD_CAP = 10**7
LEX_SUBSET_CAP = 60_000


class ConstructionError(RuntimeError):
    """A greedy construction could not reach its advertised size."""


def gv_fraction(m: int, s: int) -> float:
    """m^(2s) / sum_{k<s} C(2s,k) (m-1)^k, the size any maximal code reaches."""
    denom = sum(math.comb(2 * s, k) * (m - 1) ** k for k in range(s))
    return m ** (2 * s) / denom


def subset_family_bound(n: int, s: int) -> float:
    return (n / (8 * s)) ** s


def pairwise_hamming_min(words: np.ndarray) -> int:
    """Exhaustive minimum Hamming distance (length + 1 for fewer than two words)."""
    words = np.asarray(words)
    n, length = words.shape
    best = length + 1
    for i in range(n - 1):
        dist = (words[i + 1:] != words[i]).sum(axis=1)
        best = min(best, int(dist.min()))
    return best


def pairwise_intersection_max(sets: np.ndarray) -> int:
    """Exhaustive maximum intersection size of distinct rows of a 0/1 incidence matrix."""
    inc = np.asarray(sets, dtype=np.int64)
    if len(inc) < 2:
        return 0
    gram = inc @ inc.T
    np.fill_diagonal(gram, -1)
    return int(gram.max())


@dataclass(frozen=True, eq=False)
class GVCode:
    alphabet_size: int
    length: int
    min_distance: int
    words: np.ndarray = field(repr=False)
    verified_distance: int = 0

    def __len__(self):
        return len(self.words)

    @property
    def lower_bound(self) -> float:
        return gv_fraction(self.alphabet_size, self.min_distance)

    def as_dict(self) -> dict:
        return {
            "alphabet_size": self.alphabet_size,
            "length": self.length,
            "min_distance": self.min_distance,
            "size": len(self),
            "verified_min_distance": self.verified_distance,
            "lower_bound": self.lower_bound,
            "words": self.words.tolist(),
        }


@functools.lru_cache(maxsize=64)
def build_gv_code(m: int, s: int) -> GVCode:
    """Greedy code of length 2s and distance s over [m], lexicographic word order.

    Results are cached; the word array is read-only.
    """
    if m < 1 or s < 1:
        raise ValueError("need m >= 1 and s >= 1")
    length = 2 * s
    if m ** length > GV_WORD_CAP:
        raise ValueError(f"m^(2s) = {m ** length} exceeds the enumeration cap {GV_WORD_CAP}")
    # rows of the product in lexicographic order
    all_words = np.array(list(itertools.product(range(m), repeat=length)), dtype=np.int16)
    accepted = np.empty((0, length), dtype=np.int16)
    chunk = []
    for w in all_words:
        if chunk:
            pending = np.array(chunk, dtype=np.int16)
            if ((pending != w).sum(axis=1) < s).any():
                continue
        if len(accepted) and ((accepted != w).sum(axis=1) < s).any():
            continue
        chunk.append(w)
        if len(chunk) >= 256:
            accepted = np.vstack([accepted, np.array(chunk, dtype=np.int16)])
            chunk = []
    if chunk:
        accepted = np.vstack([accepted, np.array(chunk, dtype=np.int16)])
    dist = pairwise_hamming_min(accepted) if len(accepted) > 1 else length
    if dist < s:
        raise ConstructionError(f"code verification failed: distance {dist} < {s}")
    accepted.setflags(write=False)
    code = GVCode(m, length, s, accepted, dist)
    if len(code) < code.lower_bound - 1e-9:
        raise ConstructionError("greedy code is below the Gilbert-Varshamov size")
    return code


@dataclass(frozen=True, eq=False)
class SubsetFamily:
    ground_size: int
    s: int
    sets: tuple[tuple[int, ...], ...]
    verified_max_intersection: int = 0
    seed: int | None = None
    method: str = "lexicographic"

    def __len__(self):
        return len(self.sets)

    @property
    def lower_bound(self) -> float:
        return subset_family_bound(self.ground_size, self.s)

    @property
    def target(self) -> int:
        return max(1, math.ceil(self.lower_bound - 1e-12))

    def incidence(self) -> np.ndarray:
        inc = np.zeros((len(self.sets), self.ground_size), dtype=np.int8)
        for i, members in enumerate(self.sets):
            inc[i, list(members)] = 1
        return inc

    def as_dict(self) -> dict:
        return {
            "ground_size": self.ground_size,
            "s": self.s,
            "size": len(self),
            "verified_max_intersection": self.verified_max_intersection,
            "lower_bound": self.lower_bound,
            "method": self.method,
            "seed": self.seed,
            "sets": [list(x) for x in self.sets],
        }


def _greedy_sets(candidates, n: int, s: int, stop_after: int | None = None):
    capacity = 1024
    accepted = np.zeros((capacity, n), dtype=np.int16)
    chosen = []
    for cand in candidates:
        idx = list(cand)
        count = len(chosen)
        if count and (accepted[:count, idx].sum(axis=1) >= s).any():
            continue
        if count == capacity:
            capacity *= 2
            grown = np.zeros((capacity, n), dtype=np.int16)
            grown[:count] = accepted[:count]
            accepted = grown
        accepted[count, idx] = 1
        chosen.append(tuple(sorted(int(c) for c in idx)))
        if stop_after is not None and len(chosen) >= stop_after:
            break
    return chosen


@functools.lru_cache(maxsize=128)
def build_subset_family(n: int, s: int, seed: int = 0, restarts: int = 8,
                        candidates_per_try: int | None = None) -> SubsetFamily:
    """Family of 2s-subsets of [n] (0-based) with pairwise intersections < s.

    Lexicographic greedy (maximal) when C(n, 2s) is small, otherwise a seeded
    random candidate stream with restarts.
    """
    if not (0 < s and 2 * s < n):
        raise ValueError("need 0 < s < n/2")
    target = max(1, math.ceil(subset_family_bound(n, s) - 1e-12))
    size = 2 * s
    if math.comb(n, size) <= LEX_SUBSET_CAP:
        chosen = _greedy_sets(itertools.combinations(range(n), size), n, s)
        method, used_seed = "lexicographic", None
    else:
        rng = np.random.default_rng(seed)
        budget = candidates_per_try or max(2000, 10 * target)
        chosen, used_seed = [], seed
        for attempt in range(restarts):
            stream = (rng.choice(n, size=size, replace=False) for _ in range(budget))
            chosen = _greedy_sets(stream, n, s)
            if len(chosen) >= target:
                break
        method = "random"
    if len(chosen) < target:
        raise ConstructionError(
            f"subset family for n={n}, s={s} reached {len(chosen)} < {target} sets")
    fam = SubsetFamily(n, s, tuple(chosen), 0, used_seed, method)
    overlap = pairwise_intersection_max(fam.incidence())
    if overlap >= s:
        raise ConstructionError("subset family verification failed")
    return SubsetFamily(n, s, fam.sets, overlap, used_seed, method)
