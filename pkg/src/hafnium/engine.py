"""Hafnian and loop hafnian by inclusion-exclusion over pair subsets.

For each nonempty subset Z of the n/2 row/column pairs the engine takes the
pair-swapped submatrix, turns its power traces (plus diagonal loop
corrections for the loop hafnian) into a truncated series, and extracts the
top coefficient of its exponential; the signed terms are reduced either
deterministically (fixed ranges, fixed binary tree: bit-identical for any
worker count) or per-worker ("fast").

Note on loop corrections: the order-k correction is v . B^(k-1) . (Xv)^T
with B the pair-swapped submatrix, v the submatrix diagonal and X the pair
exchange. Walk counting forces the trailing pair swap of v; dropping it
breaks diagonal-only matrices (the SPM brute-force oracle agrees).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import (
    DegenerateHessenberg,
    EigensolverNoConvergence,
    LengthMismatch,
    OddDimension,
)
from .matrix import ComplexSymmetricMatrix, coerce, pair_swap
from .powertrace import BACKENDS

N_RANGES = 512  # fixed partition of the mask space; never depends on threads

REDUCTIONS = ("deterministic", "fast")


@dataclass(frozen=True)
class EngineOptions:
    backend: str = "spectral"
    threads: int | None = None  # None: HAFNIUM_THREADS env var, else 1
    reduction: str = "deterministic"
    include_loops: bool = False

    def resolved_threads(self) -> int:
        t = self.threads
        if t is None:
            t = int(os.environ.get("HAFNIUM_THREADS", "1"))
        if t < 1:
            raise ValueError(f"threads must be >= 1, got {t}")
        return t

    def validate(self) -> "EngineOptions":
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(
                f"reduction must be one of {REDUCTIONS}, got {self.reduction!r}"
            )
        self.resolved_threads()
        return self


def _options(opts, **overrides) -> EngineOptions:
    if opts is None:
        opts = EngineOptions()
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        opts = replace(opts, **overrides)
    return opts.validate()


def _backend_id(backend: str) -> int:
    return 0 if backend == "spectral" else 1


def _raise_for_status(status: int):
    if status == 1:
        raise EigensolverNoConvergence(
            "QR iteration hit the sweep cap on a subset matrix; "
            "consider the charpoly backend"
        )
    if status == 2:
        raise DegenerateHessenberg("charpoly trace recurrence produced non-finite values")


def tree_reduce(values) -> complex:
    """Fixed binary reduction tree; shape depends only on len(values)."""
    vals = [complex(v) for v in values]
    if not vals:
        return 0.0 + 0.0j
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _kahan_sum(values) -> complex:
    s = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for v in values:
        y = complex(v) - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def reduce_terms(terms, mode: str = "deterministic", workers: int = 1) -> complex:
    """Reduce a term stream under the engine's reduction contract.

    Deterministic: Kahan per fixed contiguous chunk, then a fixed binary
    tree over chunk sums (independent of workers). Fast: chunks dealt
    round-robin to workers, per-worker Kahan, combined in worker order.
    """
    if mode not in REDUCTIONS:
        raise ValueError(f"mode must be one of {REDUCTIONS}, got {mode!r}")
    terms = [complex(t) for t in terms]
    if not terms:
        return 0.0 + 0.0j
    nchunks = min(len(terms), N_RANGES)
    width = -(-len(terms) // nchunks)
    chunks = [terms[i : i + width] for i in range(0, len(terms), width)]
    if mode == "deterministic":
        return tree_reduce(_kahan_sum(c) for c in chunks)
    wsums = []
    for w in range(workers):
        mine = []
        for r in range(w, len(chunks), workers):
            mine.extend(chunks[r])
        wsums.append(_kahan_sum(mine))
    total = 0.0 + 0.0j
    for s in wsums:
        total += s
    return total


def _prepare(A, include_loops: bool):
    M = coerce(A)
    n = M.n
    if n % 2:
        raise OddDimension(f"hafnian needs even dimension, got n={n}")
    a = M.array()
    if not include_loops:
        np.fill_diagonal(a, 0.0)  # the hafnian ignores the diagonal
    diag = np.ascontiguousarray(np.diag(a))
    atilde = pair_swap(a)
    return atilde, diag, n // 2


def _compute(A, opts: EngineOptions) -> complex:
    M = coerce(A)
    if M.n == 0:
        return 1.0 + 0.0j
    atilde, diag, n_half = _prepare(M, opts.include_loops)
    impl = kernels.active()
    workers = opts.resolved_threads()
    nterms = (1 << n_half) - 1
    n_ranges = min(nterms, N_RANGES)
    backend = _backend_id(opts.backend)
    cap = impl.SWEEP_CAP_MULT
    if opts.reduction == "deterministic":
        partials, fails = impl.sum_subsets_det(
            atilde, diag, n_half, backend, opts.include_loops, workers, n_ranges, cap
        )
        result = tree_reduce(partials)
    else:
        partials, fails = impl.sum_subsets_fast(
            atilde, diag, n_half, backend, opts.include_loops, workers, n_ranges, cap
        )
        result = 0.0 + 0.0j
        for s in partials:
            result += complex(s)
    bad = int(fails.max()) if len(fails) else 0
    _raise_for_status(bad)
    return complex(result)


def hafnian(A, opts: EngineOptions | None = None, *, backend: str | None = None,
            threads: int | None = None, reduction: str | None = None) -> complex:
    """Hafnian of a complex symmetric matrix (diagonal ignored); n=0 gives 1."""
    opts = _options(opts, backend=backend, threads=threads, reduction=reduction,
                    include_loops=False)
    return _compute(A, opts)


def loop_hafnian(A, opts: EngineOptions | None = None, *, backend: str | None = None,
                 threads: int | None = None, reduction: str | None = None) -> complex:
    """Loop hafnian: diagonal entries weight the self-loops; equals the
    hafnian exactly when the diagonal is zero."""
    opts = _options(opts, backend=backend, threads=threads, reduction=reduction)
    opts = replace(opts, include_loops=True).validate()
    return _compute(A, opts)


def subset_term(A, Z, opts: EngineOptions | None = None) -> complex:
    """Signed contribution of one nonempty pair subset Z (mask or PairSubset)."""
    opts = _options(opts)
    M = coerce(A)
    if M.n == 0:
        raise ValueError("subset terms are undefined for the empty matrix")
    mask = getattr(Z, "mask", Z)
    if mask == 0:
        raise ValueError("empty subset contributes 0 and is skipped by contract")
    atilde, diag, n_half = _prepare(M, opts.include_loops)
    if mask >= (1 << n_half):
        raise ValueError(f"mask {mask:#x} out of range for {n_half} pairs")
    impl = kernels.active()
    term, status = impl.subset_term(
        atilde, diag, mask, n_half, _backend_id(opts.backend), opts.include_loops,
        impl.SWEEP_CAP_MULT,
    )
    _raise_for_status(status)
    return complex(term)


def inner_series(traces, loop_terms=None) -> np.ndarray:
    """Series s with s_0 = 0 and s_k = t_k/(2k) (+ loop_terms[k-1]/2)."""
    t = np.asarray(traces, dtype=np.complex128)
    K = t.shape[0]
    s = np.zeros(K + 1, dtype=np.complex128)
    s[1:] = t / (2.0 * np.arange(1, K + 1))
    if loop_terms is not None:
        lt = np.asarray(loop_terms, dtype=np.complex128)
        if lt.shape[0] != K:
            raise LengthMismatch(
                f"loop terms have length {lt.shape[0]}, traces {K}"
            )
        s[1:] += 0.5 * lt
    return s


def exp_coefficient(s) -> complex:
    """Coefficient of the top degree in sum_{j>=1} s^j / j! (s_0 must be 0)."""
    arr = np.asarray(s, dtype=np.complex128)
    if arr.shape[0] == 0:
        raise ValueError("series must have at least the constant coefficient")
    if arr[0] != 0:
        raise ValueError("series must have zero constant term")
    if arr.shape[0] == 1:
        return 0.0 + 0.0j
    from .kernels import _numpy as _np_impl

    return complex(_np_impl._exp_top(arr))


def loop_correction_vector(A_Z, v, K: int) -> np.ndarray:
    """Order-k loop corrections v . B^(k-1) . (Xv)^T, k = 1..K, where
    B = X . A_Z; computed by iterated vector-matrix products."""
    a = np.asarray(A_Z, dtype=np.complex128)
    vv = np.asarray(v, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise LengthMismatch(f"pair submatrix must be square even-sized, got {a.shape}")
    if vv.shape[0] != a.shape[0]:
        raise LengthMismatch(f"diagonal vector length {vv.shape[0]} != size {a.shape[0]}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    b = pair_swap(a)
    xv = vv.reshape(-1, 2)[:, ::-1].ravel()
    out = np.zeros(K, dtype=np.complex128)
    u = vv.copy()
    for k in range(K):
        out[k] = u @ xv
        if k < K - 1:
            u = u @ b
    return out
