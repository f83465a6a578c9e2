"""Brute-force reference implementations and combinatorial count formulas.

These are the ground truth the fast engine is tested against: perfect
matchings are enumerated explicitly (smallest uncovered vertex first, so
every matching appears exactly once) and the per-matrix sums are evaluated
vectorized over the cached enumeration.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import OddDimension, TooLarge
from .matrix import ComplexSymmetricMatrix

MAX_BRUTEFORCE_N = 16
MAX_LOOP_BRUTEFORCE_N = 14
MAX_RYSER_M = 20
MAX_MATCHING_COUNT_N = 12


def double_factorial(k: int) -> int:
    """k!! with the convention (-1)!! = 0!! = 1."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def telephone(n: int) -> int:
    """Number of involutions of n elements: T(n) = T(n-1) + (n-1) T(n-2)."""
    if n < 0:
        raise ValueError("telephone numbers need n >= 0")
    prev, cur = 1, 1  # T(0), T(1)
    if n == 0:
        return 1
    for m in range(2, n + 1):
        prev, cur = cur, cur + (m - 1) * prev
    return cur


def _enumerate_matchings(n: int, loops: bool):
    """All perfect matchings of K_n (with loops if requested) as pair tuples.

    Always pairs the smallest uncovered vertex, so each matching is produced
    exactly once.
    """
    out = []

    def step(avail: tuple[int, ...], acc: tuple):
        if not avail:
            out.append(acc)
            return
        v, rest = avail[0], avail[1:]
        if loops:
            step(rest, acc + ((v, v),))
        for k, w in enumerate(rest):
            step(rest[:k] + rest[k + 1 :], acc + ((v, w),))

    step(tuple(range(n)), ())
    return out


@lru_cache(maxsize=None)
def _matching_arrays(n: int, loops: bool):
    """Enumerations grouped by matching length: list of (I, J) index arrays."""
    groups: dict[int, list] = {}
    for m in _enumerate_matchings(n, loops):
        groups.setdefault(len(m), []).append(m)
    packed = []
    for size in sorted(groups):
        ms = groups[size]
        idx = np.array(ms, dtype=np.int64)  # (count, size, 2)
        packed.append((idx[:, :, 0].copy(), idx[:, :, 1].copy()))
    return tuple(packed)


def _sum_over_matchings(a: np.ndarray, loops: bool) -> complex:
    total = 0.0 + 0.0j
    for I, J in _matching_arrays(a.shape[0], loops):
        total += a[I, J].prod(axis=1).sum()
    return complex(total)


def _as_square(A) -> np.ndarray:
    if isinstance(A, ComplexSymmetricMatrix):
        return A.entries
    return np.asarray(A, dtype=np.complex128)


def hafnian_bruteforce(A) -> complex:
    """Sum over all perfect matchings of the product of matched entries."""
    a = _as_square(A)
    n = a.shape[0]
    if n % 2:
        raise OddDimension(f"hafnian needs even dimension, got {n}")
    if n > MAX_BRUTEFORCE_N:
        raise TooLarge(f"brute force capped at n={MAX_BRUTEFORCE_N}, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    return _sum_over_matchings(a, loops=False)


def loop_hafnian_bruteforce(A) -> complex:
    """Sum over all single-pair matchings (pairs plus self-loops)."""
    a = _as_square(A)
    n = a.shape[0]
    if n % 2:
        raise OddDimension(f"loop hafnian needs even dimension, got {n}")
    if n > MAX_LOOP_BRUTEFORCE_N:
        raise TooLarge(f"brute force capped at n={MAX_LOOP_BRUTEFORCE_N}, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    return _sum_over_matchings(a, loops=True)


def permanent_ryser(W) -> complex:
    """Ryser's inclusion-exclusion permanent with Gray-code updates."""
    w = np.asarray(W, dtype=np.complex128)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise TooLarge(f"permanent needs a square matrix, got shape {w.shape}")
    m = w.shape[0]
    if m > MAX_RYSER_M:
        raise TooLarge(f"Ryser capped at m={MAX_RYSER_M}, got {m}")
    if m == 0:
        return 1.0 + 0.0j
    row_sums = np.zeros(m, dtype=np.complex128)
    total = 0.0 + 0.0j
    gray = 0
    bits = 0
    for k in range(1, 1 << m):
        bit = k & -k
        j = bit.bit_length() - 1
        if gray & bit:
            row_sums -= w[:, j]
            bits -= 1
        else:
            row_sums += w[:, j]
            bits += 1
        gray ^= bit
        sign = -1.0 if (m - bits) % 2 else 1.0
        total += sign * row_sums.prod()
    return complex(total)


def matching_count_bruteforce(adjacency) -> int:
    """Number of matchings (including the empty one) of a loopless 0/1 graph."""
    a = np.asarray(adjacency)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise TooLarge(f"adjacency must be square, got shape {a.shape}")
    if n > MAX_MATCHING_COUNT_N:
        raise TooLarge(f"matching count capped at n={MAX_MATCHING_COUNT_N}, got {n}")
    adj = [
        sum(1 << j for j in range(n) if j != i and a[i, j] != 0) for i in range(n)
    ]
    memo: dict[int, int] = {0: 1}

    def count(mask: int) -> int:
        if mask in memo:
            return memo[mask]
        v = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << v)
        total = count(rest)  # v stays unmatched
        nbrs = adj[v] & rest
        while nbrs:
            wbit = nbrs & -nbrs
            total += count(rest & ~wbit)
            nbrs ^= wbit
        memo[mask] = total
        return total

    return count((1 << n) - 1)


def bipartite_embedding(W) -> np.ndarray:
    """[[0, W], [W^T, 0]]: the hafnian of this block matrix is per(W)."""
    w = np.asarray(W, dtype=np.complex128)
    m = w.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    out[:m, m:] = w
    out[m:, :m] = w.T
    return out
