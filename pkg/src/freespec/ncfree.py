"""Non-crossing partitions and the free cumulant sums for ``S Y_t S Y_t*``.

With ``S`` free from ``Y_t``,

    tau((S Y_t S Y_t*)^n) = sum_{pi in NC(2n)} c_pi(S, ..., S) tau_{K(pi)}(Y_t, Y_t*, ...)

where the dual point after position ``i`` carries ``Y_t`` for odd ``i`` and
``Y_t*`` for even ``i``.  A block ``V`` of the Kreweras complement therefore
contributes ``tau(Y_t^{e(V)})`` with ``e(V) = #odd(V) - #even(V)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .moments import RankParam
from .numeric import laguerre_L1

__all__ = [
    "NCPartition",
    "CombinatorialMoments",
    "catalan",
    "enumerate_nc",
    "kreweras",
    "block_exponents",
    "cumulants_of_S",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "p_n_at_zero",
    "p_n_at_zero_halved",
    "unitary_bm_moment",
    "r_n_combinatorial",
    "MAX_POINTS",
    "MAX_HALF_ORDER",
]

MAX_POINTS = 12
MAX_HALF_ORDER = 5


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


@dataclass(frozen=True)
class NCPartition:
    """Non-crossing partition of ``{1, ..., m}``; blocks sorted by minimum."""

    blocks: Tuple[Tuple[int, ...], ...]
    m: int

    def __post_init__(self):
        seen = sorted(x for b in self.blocks for x in b)
        if seen != list(range(1, self.m + 1)):
            raise ValueError("blocks must partition {1..m}")
        for b in self.blocks:
            if list(b) != sorted(set(b)) or not b:
                raise ValueError(f"block {b} is not strictly increasing")
        if not _is_noncrossing(self.blocks, self.m):
            raise ValueError(f"partition {self.blocks} is crossing")

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], m: int = None) -> "NCPartition":
        bl = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        if m is None:
            m = sum(len(b) for b in bl)
        return cls(bl, m)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> List[int]:
        return [len(b) for b in self.blocks]

    def labels(self) -> List[int]:
        """``labels[i-1]`` is the index of the block containing ``i``."""
        out = [0] * self.m
        for idx, b in enumerate(self.blocks):
            for x in b:
                out[x - 1] = idx
        return out

    def rotate(self, shift: int = 1) -> "NCPartition":
        """Image under ``i -> i + shift (mod m)``."""
        return NCPartition.from_blocks(
            [[(x - 1 + shift) % self.m + 1 for x in b] for b in self.blocks], self.m
        )


def _is_noncrossing(blocks, m: int) -> bool:
    label = [0] * (m + 1)
    for idx, b in enumerate(blocks):
        for x in b:
            label[x] = idx
    # a < b < c < d with a, c in one block and b, d in another
    for a in range(1, m + 1):
        for b in range(a + 1, m + 1):
            if label[b] == label[a]:
                continue
            for c in range(b + 1, m + 1):
                if label[c] != label[a]:
                    continue
                for d in range(c + 1, m + 1):
                    if label[d] == label[b]:
                        return False
    return True


def _nc_interval(lo: int, hi: int) -> Iterator[List[List[int]]]:
    """Non-crossing partitions of ``{lo..hi}``; the first block contains ``lo``."""
    if lo > hi:
        yield []
        return
    for rest in _nc_interval(lo + 1, hi):
        yield [[lo]] + rest
    # otherwise the block of lo continues at j, enclosing an inner interval
    for j in range(lo + 1, hi + 1):
        for inner in _nc_interval(lo + 1, j - 1):
            for rest in _nc_interval(j, hi):
                yield [[lo] + rest[0]] + inner + rest[1:]


def enumerate_nc(m: int) -> Iterator[NCPartition]:
    """Stream every non-crossing partition of ``{1..m}`` once."""
    if not 1 <= m <= MAX_POINTS:
        raise ValueError(f"m must lie in 1..{MAX_POINTS}, got {m}")
    for blocks in _nc_interval(1, m):
        bl = tuple(sorted((tuple(b) for b in blocks), key=lambda b: b[0]))
        # generated partitions are valid by construction
        p = object.__new__(NCPartition)
        object.__setattr__(p, "blocks", bl)
        object.__setattr__(p, "m", m)
        yield p


def kreweras(p: NCPartition) -> NCPartition:
    """Kreweras complement.

    The dual point ``i'`` sits between ``i`` and ``i+1`` (cyclically).  Two dual
    points ``i' < j'`` can be joined without crossing ``p`` iff the interval
    ``{i+1, ..., j}`` is a union of blocks of ``p``.
    """
    m = p.m
    label = p.labels()
    first = {}
    last = {}
    for pos, lab in enumerate(label, start=1):
        first.setdefault(lab, pos)
        last[lab] = pos

    def is_union(i, j):
        # {i+1..j} is a union of blocks iff every block meeting it lies inside it
        for pos in range(i + 1, j + 1):
            lab = label[pos - 1]
            if first[lab] <= i or last[lab] > j:
                return False
        return True

    parent = list(range(m + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if find(i) != find(j) and is_union(i, j):
                parent[find(j)] = find(i)
    groups: Dict[int, List[int]] = defaultdict(list)
    for i in range(1, m + 1):
        groups[find(i)].append(i)
    return NCPartition.from_blocks(list(groups.values()), m)


def block_exponents(p: NCPartition) -> List[int]:
    """``#odd - #even`` positions of every block."""
    return [sum(1 if x % 2 else -1 for x in b) for b in p.blocks]


# cumulants -------------------------------------------------------------


def _compositions_sum(m: Sequence[Fraction], parts: int, total: int) -> Fraction:
    """``sum over i_1 + ... + i_parts = total (i >= 0) of prod m[i]``, m[0] = 1."""
    # dynamic programming over the number of parts
    row = [Fraction(0)] * (total + 1)
    row[0] = Fraction(1)
    for _ in range(parts):
        new = [Fraction(0)] * (total + 1)
        for a, va in enumerate(row):
            if va == 0:
                continue
            for b in range(total - a + 1):
                new[a + b] += va * m[b]
        row = new
    return row[total]


def moments_from_cumulants(c: Sequence[Fraction], n_max: int) -> List[Fraction]:
    """Free moment-cumulant formula; ``c[k-1]`` is the ``k``-th cumulant.

    Uses ``m_n = sum_s c_s sum_{i_1+..+i_s = n-s} m_{i_1} ... m_{i_s}``,
    which is the sum over ``NC(n)`` grouped by the block of 1.
    Returns ``[m_1, ..., m_{n_max}]``.
    """
    m = [Fraction(1)]
    for n in range(1, n_max + 1):
        total = Fraction(0)
        for s in range(1, n + 1):
            if c[s - 1] != 0:
                total += c[s - 1] * _compositions_sum(m, s, n - s)
        m.append(total)
    return m[1:]


def cumulants_from_moments(m: Sequence[Fraction]) -> List[Fraction]:
    """Inverse of :func:`moments_from_cumulants`."""
    c: List[Fraction] = []
    mm = [Fraction(1)] + [Fraction(x) for x in m]
    for n in range(1, len(m) + 1):
        rest = Fraction(0)
        for s in range(1, n):
            if c[s - 1] != 0:
                rest += c[s - 1] * _compositions_sum(mm, s, n - s)
        c.append(mm[n] - rest)
    return c


def cumulants_of_S(rank: RankParam, k_max: int) -> List[Fraction]:
    """Free cumulants ``[c_1, ..., c_{k_max}]`` of ``S = 2P - 1``.

    ``S`` has law ``theta delta_1 + (1 - theta) delta_{-1}``, so its moments
    are ``kappa`` (odd) and ``1`` (even).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    kappa = rank.kappa
    m = [kappa if k % 2 else Fraction(1) for k in range(1, k_max + 1)]
    return cumulants_from_moments(m)


def _check_half_order(n: int) -> None:
    if not 1 <= n <= MAX_HALF_ORDER:
        raise ValueError(f"n must lie in 1..{MAX_HALF_ORDER}, got {n}")


def p_n_at_zero(rank: RankParam, n: int) -> Fraction:
    """Sum of ``c_pi(S, ..., S)`` over partitions of ``NC(2n)`` with even blocks."""
    _check_half_order(n)
    c = cumulants_of_S(rank, 2 * n)
    total = Fraction(0)
    for p in enumerate_nc(2 * n):
        sizes = p.block_sizes()
        if any(s % 2 for s in sizes):
            continue
        total += math.prod((c[s - 1] for s in sizes), start=Fraction(1))
    return total


def p_n_at_zero_halved(rank: RankParam, n: int) -> Fraction:
    """Sum over all of ``NC(2n)`` of ``2^{-|pi|} c_pi(a1 - a2)``.

    ``a1, a2`` are free copies of ``S``, so ``c_k(a1 - a2) = c_k + (-1)^k c_k``.
    """
    _check_half_order(n)
    c = cumulants_of_S(rank, 2 * n)
    d = [c[k - 1] + (-1) ** k * c[k - 1] for k in range(1, 2 * n + 1)]
    total = Fraction(0)
    for p in enumerate_nc(2 * n):
        sizes = p.block_sizes()
        total += math.prod((d[s - 1] for s in sizes), start=Fraction(1)) / 2 ** len(sizes)
    return total


# combinatorial moments of S Y_t S Y_t* ---------------------------------


def unitary_bm_moment(k: int, t: float) -> float:
    """``tau(Y_t^k) = e^{-|k| t/2} L_{|k|-1}^{(1)}(|k| t) / |k|``; 1 for k = 0."""
    k = abs(int(k))
    if k == 0:
        return 1.0
    return math.exp(-k * t / 2) * laguerre_L1(k - 1).evalf(k * t) / k


@lru_cache(maxsize=None)
def _grouped_terms(kappa: Fraction, n: int) -> Tuple[Tuple[Tuple[int, ...], Fraction], ...]:
    """Cumulant weights of ``NC(2n)`` grouped by the multiset of ``|e(V)|``."""
    rank = RankParam.from_kappa(kappa)
    c = cumulants_of_S(rank, 2 * n)
    groups: Dict[Tuple[int, ...], Fraction] = defaultdict(Fraction)
    for p in enumerate_nc(2 * n):
        w = math.prod((c[s - 1] for s in p.block_sizes()), start=Fraction(1))
        if w == 0:
            continue
        key = tuple(sorted(abs(e) for e in block_exponents(kreweras(p)) if e))
        groups[key] += w
    return tuple((k, v) for k, v in sorted(groups.items()) if v != 0)


def r_n_combinatorial(rank: RankParam, n: int, t: float) -> float:
    """``r_n(t)`` from the free cumulant sum over ``NC(2n)``."""
    _check_half_order(n)
    if t < 0:
        raise ValueError("t must be non-negative")
    cache: Dict[int, float] = {}
    total = 0.0
    for key, w in _grouped_terms(rank.kappa, n):
        prod = 1.0
        for e in key:
            if e not in cache:
                cache[e] = unitary_bm_moment(e, t)
            prod *= cache[e]
        total += float(w) * prod
    return total


class CombinatorialMoments:
    """Moment provider backed by :func:`r_n_combinatorial` (``n <= 5``)."""

    def __init__(self, rank: RankParam):
        self.rank = rank
        self.n_max = MAX_HALF_ORDER

    def moments(self, t: float, n: int) -> np.ndarray:
        return np.array([r_n_combinatorial(self.rank, k, t) for k in range(1, n + 1)])
