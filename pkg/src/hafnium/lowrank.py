"""Hafnian of a low-rank factored matrix G . G^T.

The product of the 2n linear forms (row i of G against indeterminates
x_1..x_r) is expanded into a dense coefficient array over integer
r-partitions, indexed by a colexicographic stars-and-bars ranking; the
hafnian is then the sum over even partitions of coefficient times the
product of double factorials (e_i - 1)!!.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import CapacityExceeded, DimensionMismatch, OutOfRange
from .oracle import double_factorial

DEFAULT_COEFFICIENT_BUDGET = 1 << 30


@dataclass(frozen=True)
class LowRankFactor:
    """2n x r complex matrix whose G . G^T reproduces the target above the
    diagonal (lower-triangular slack is free: the hafnian never reads it)."""

    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.complex128)
        if g.ndim != 2:
            raise DimensionMismatch(f"factor must be 2-D, got shape {g.shape}")
        if g.shape[0] % 2:
            raise DimensionMismatch(f"factor needs an even number of rows, got {g.shape[0]}")
        if g.shape[1] < 1:
            raise DimensionMismatch("factor needs at least one column")
        object.__setattr__(self, "g", np.ascontiguousarray(g))
        self.g.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.g.shape[0]

    @property
    def rank(self) -> int:
        return self.g.shape[1]

    def product(self) -> np.ndarray:
        return np.asarray(self.g @ self.g.T)


def num_partitions(total: int, r: int) -> int:
    """|P_(total,r)| = C(total + r - 1, r - 1)."""
    return comb(total + r - 1, r - 1)


def partition_rank(p, total: int, r: int) -> int:
    """Colex stars-and-bars rank of an r-composition of `total`."""
    p = tuple(int(x) for x in p)
    if len(p) != r:
        raise OutOfRange(f"composition has {len(p)} parts, expected {r}")
    if any(x < 0 for x in p) or sum(p) != total:
        raise OutOfRange(f"{p} is not a composition of {total}")
    rank = 0
    bar = -1
    for j in range(1, r):
        bar += p[j - 1] + 1  # bar position p_1+..+p_j + (j-1)
        rank += comb(bar, j)
    return rank


def partition_unrank(rank: int, total: int, r: int) -> tuple:
    """Inverse of partition_rank."""
    count = num_partitions(total, r)
    if not 0 <= rank < count:
        raise OutOfRange(f"rank {rank} outside [0, {count})")
    bars = []
    rem = rank
    for j in range(r - 1, 0, -1):
        b = j - 1  # smallest position with C(b, j) defined as 0/1
        # largest b with C(b, j) <= rem
        while comb(b + 1, j) <= rem:
            b += 1
        bars.append(b)
        rem -= comb(b, j)
    bars.reverse()
    p = []
    prev = -1
    for b in bars:
        p.append(b - prev - 1)
        prev = b
    p.append(total + r - 2 - prev)
    return tuple(p)


def _compositions(total: int, r: int):
    """All r-compositions of `total` via bar positions (deterministic order)."""
    if r == 1:
        yield (total,)
        return
    for bars in combinations(range(total + r - 1), r - 1):
        p = []
        prev = -1
        for b in bars:
            p.append(b - prev - 1)
            prev = b
        p.append(total + r - 2 - prev)
        yield tuple(p)


def expand_product(G, budget: int = DEFAULT_COEFFICIENT_BUDGET) -> np.ndarray:
    """Coefficients of prod_i (sum_j g[i,j] x_j) over all r-partitions of the
    row count, colex-ranked; built row by row so the intermediate array after
    row t covers the partitions of t."""
    if not isinstance(G, LowRankFactor):
        G = LowRankFactor(G)
    rows, r = G.rows, G.rank
    final_size = num_partitions(rows, r)
    if final_size > budget:
        raise CapacityExceeded(
            f"expansion needs {final_size} coefficients, budget is {budget}"
        )
    cur = np.ones(1, dtype=np.complex128)  # partitions of 0
    g = G.g
    for t in range(rows):
        nxt = np.zeros(num_partitions(t + 1, r), dtype=np.complex128)
        for p in _compositions(t, r):
            c = cur[partition_rank(p, t, r)]
            if c == 0:
                continue
            for j in range(r):
                w = g[t, j]
                if w == 0:
                    continue
                q = p[:j] + (p[j] + 1,) + p[j + 1 :]
                nxt[partition_rank(q, t + 1, r)] += w * c
        cur = nxt
    return cur


def hafnian_lowrank(G, budget: int = DEFAULT_COEFFICIENT_BUDGET) -> complex:
    """haf(G . G^T) = sum over even partitions e of lambda_e prod (e_i - 1)!!."""
    if not isinstance(G, LowRankFactor):
        G = LowRankFactor(G)
    rows, r = G.rows, G.rank
    coeffs = expand_product(G, budget=budget)
    total = 0.0 + 0.0j
    for half in _compositions(rows // 2, r):
        e = tuple(2 * x for x in half)
        lam = coeffs[partition_rank(e, rows, r)]
        if lam == 0:
            continue
        weight = 1.0
        for ei in e:
            weight *= double_factorial(ei - 1)
        total += lam * weight
    return complex(total)
