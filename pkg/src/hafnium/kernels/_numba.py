"""JIT-compiled hot kernels: per-subset terms and the subset-sum drivers.

Everything here is written loop-style for numba. The eigensolver is a
stabilized-elementary Hessenberg reduction followed by implicit single-shift
QR with Wilkinson shifts (eigenvalues only, no Schur vectors): subdiagonal
entries deflate when |h[i,i-1]| <= 1e-14 * (|h[i-1,i-1]| + |h[i,i]|) and the
sweep budget is capped at 30 * size.

Subset masks are partitioned into contiguous ranges whose boundaries depend
only on the problem size, never on the worker count; each range is summed
with Kahan compensation, so the deterministic reduction is bit-identical for
any number of workers.
"""

import warnings

import numpy as np

try:
    from numba import NumbaWarning, njit, prange

    # the TBB-version probe warning is environmental noise; workqueue is fine
    warnings.filterwarnings("ignore", message=".*TBB.*", category=NumbaWarning)
except ImportError:  # pragma: no cover - numba is a hard dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

    prange = range

DEFLATION_RTOL = 1e-14
SWEEP_CAP_MULT = 30


@njit(cache=True)
def _hessenberg(h):
    """In-place reduction by pivoted elementary similarity transforms."""
    m = h.shape[0]
    for j in range(m - 2):
        piv = j + 1
        big = abs(h[j + 1, j])
        for i in range(j + 2, m):
            a = abs(h[i, j])
            if a > big:
                big = a
                piv = i
        if big == 0.0:
            continue
        if piv != j + 1:
            for k in range(j, m):
                tmp = h[piv, k]
                h[piv, k] = h[j + 1, k]
                h[j + 1, k] = tmp
            for k in range(m):
                tmp = h[k, piv]
                h[k, piv] = h[k, j + 1]
                h[k, j + 1] = tmp
        p = h[j + 1, j]
        for i in range(j + 2, m):
            mu = h[i, j] / p
            if mu != 0:
                for k in range(j + 1, m):
                    h[i, k] -= mu * h[j + 1, k]
                for k in range(m):
                    h[k, j + 1] += mu * h[k, i]
            h[i, j] = 0.0 + 0.0j


@njit(cache=True)
def _givens(x, y):
    """c real, s complex with [[c, s], [-conj(s), c]] @ (x, y) = (r, 0)."""
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0 + 0.0j
    if ax == 0.0:
        return 0.0, y.conjugate() / ay
    r = np.hypot(ax, ay)
    c = ax / r
    s = (x / ax) * (y.conjugate() / r)
    return c, s


@njit(cache=True)
def _qr_sweep(h, lo, hi, shift):
    """One implicit single-shift bulge chase on the active block [lo, hi]."""
    for k in range(lo, hi):
        if k == lo:
            x = h[lo, lo] - shift
            y = h[lo + 1, lo]
        else:
            x = h[k, k - 1]
            y = h[k + 1, k - 1]
        c, s = _givens(x, y)
        sc = s.conjugate()
        col0 = lo if k == lo else k - 1
        for col in range(col0, hi + 1):
            t1 = h[k, col]
            t2 = h[k + 1, col]
            h[k, col] = c * t1 + s * t2
            h[k + 1, col] = -sc * t1 + c * t2
        if k > lo:
            h[k + 1, k - 1] = 0.0 + 0.0j
        row_end = k + 2
        if row_end > hi:
            row_end = hi
        for row in range(lo, row_end + 1):
            t1 = h[row, k]
            t2 = h[row, k + 1]
            h[row, k] = c * t1 + sc * t2
            h[row, k + 1] = -s * t1 + c * t2


@njit(cache=True)
def _hess_eigvals(h, cap_mult):
    """Eigenvalues of a general complex square matrix, destroying it:
    Hessenberg reduction, then shifted QR on the active blocks.

    Returns (eigenvalues, sweeps, converged).
    """
    m = h.shape[0]
    eig = np.zeros(m, np.complex128)
    if m == 0:
        return eig, 0, True
    _hessenberg(h)
    total_sweeps = 0
    cap = cap_mult * m
    hi = m - 1
    stagnation = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            sd = abs(h[lo, lo - 1])
            if sd <= DEFLATION_RTOL * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])):
                h[lo, lo - 1] = 0.0 + 0.0j
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            stagnation = 0
            continue
        if lo == hi - 1:
            a = h[lo, lo]
            b = h[lo, hi]
            cc = h[hi, lo]
            d = h[hi, hi]
            half = 0.5 * (a + d)
            det = a * d - b * cc
            disc = np.sqrt(half * half - det)
            e1 = half + disc
            e2 = half - disc
            if abs(e1) >= abs(e2):
                eig[hi] = e1
                eig[lo] = det / e1 if abs(e1) > 0.0 else e2
            else:
                eig[hi] = e2
                eig[lo] = det / e2 if abs(e2) > 0.0 else e1
            hi -= 2
            stagnation = 0
            continue
        if total_sweeps >= cap:
            return eig, total_sweeps, False
        stagnation += 1
        if stagnation % 10 == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            cc = h[hi, hi - 1]
            d = h[hi, hi]
            delta = 0.5 * (a - d)
            bc = b * cc
            disc = np.sqrt(delta * delta + bc)
            d1 = delta + disc
            d2 = delta - disc
            den = d1 if abs(d1) >= abs(d2) else d2
            if den == 0:
                shift = d
            else:
                shift = d - bc / den
        _qr_sweep(h, lo, hi, shift)
        total_sweeps += 1
    return eig, total_sweeps, True


@njit(cache=True)
def _power_sums(eig, K):
    t = np.zeros(K, np.complex128)
    for i in range(eig.shape[0]):
        lam = eig[i]
        p = lam
        for k in range(K):
            t[k] += p
            p *= lam
    return t


@njit(cache=True)
def _charpoly(h):
    """Monic characteristic polynomial (ascending coefficients) of a
    Hessenberg matrix via the leading-minor recurrence."""
    m = h.shape[0]
    P = np.zeros((m + 1, m + 1), np.complex128)
    P[0, 0] = 1.0
    for k in range(1, m + 1):
        for d in range(k):
            P[k, d + 1] = P[k - 1, d]
        hk = h[k - 1, k - 1]
        for d in range(k):
            P[k, d] -= hk * P[k - 1, d]
        prod = 1.0 + 0.0j
        for i in range(k - 1, 0, -1):
            prod *= h[i, i - 1]
            if prod == 0:
                break
            coef = h[i - 1, k - 1] * prod
            if coef != 0:
                for d in range(i):
                    P[k, d] -= coef * P[i - 1, d]
    return P[m].copy()


@njit(cache=True)
def _traces_from_charpoly(a, K):
    """Power traces from monic charpoly coefficients: Newton's identities up
    to the matrix size, then the Cayley-Hamilton linear recurrence."""
    m = a.shape[0] - 1
    t = np.zeros(K, np.complex128)
    kmax = K if K < m else m
    for k in range(1, kmax + 1):
        acc = -k * a[m - k]
        for j in range(1, k):
            acc -= a[m - j] * t[k - j - 1]
        t[k - 1] = acc
    if m >= 1:
        for k in range(m + 1, K + 1):
            acc = 0.0 + 0.0j
            for j in range(m):
                acc -= a[j] * t[k - m + j - 1]
            t[k - 1] = acc
    ok = True
    for k in range(K):
        if not (np.isfinite(t[k].real) and np.isfinite(t[k].imag)):
            ok = False
    return t, ok


@njit(cache=True)
def _loop_chain(b, v, xv, K):
    """ell[k-1] = v . b^(k-1) . xv by iterated row-vector products."""
    size = v.shape[0]
    ell = np.zeros(K, np.complex128)
    u = v.copy()
    unew = np.empty(size, np.complex128)
    for k in range(K):
        acc = 0.0 + 0.0j
        for i in range(size):
            acc += u[i] * xv[i]
        ell[k] = acc
        if k < K - 1:
            for j in range(size):
                s = 0.0 + 0.0j
                for i in range(size):
                    s += u[i] * b[i, j]
                unew[j] = s
            for i in range(size):
                u[i] = unew[i]
    return ell


@njit(cache=True)
def _exp_top(s):
    """Coefficient of the top degree in sum_j s^j / j! (s has zero constant
    term), by Horner-style truncated multiplication."""
    D = s.shape[0] - 1
    E = np.zeros(D + 1, np.complex128)
    F = np.zeros(D + 1, np.complex128)
    E[0] = 1.0
    for j in range(D, 0, -1):
        inv = 1.0 / j
        for d in range(D + 1):
            acc = 0.0 + 0.0j
            for tt in range(1, d + 1):
                acc += E[d - tt] * s[tt]
            F[d] = acc * inv
        F[0] += 1.0
        for d in range(D + 1):
            E[d] = F[d]
    return E[D]


@njit(cache=True)
def subset_term(atilde, diag, mask, n_half, backend, include_loops, cap_mult):
    """Signed contribution of one nonempty pair subset.

    Returns (term, status); status 1 flags eigensolver non-convergence and
    2 a non-finite charpoly recurrence.
    """
    K = n_half
    m = 0
    for i in range(n_half):
        if (mask >> i) & 1:
            m += 1
    size = 2 * m
    idx = np.empty(size, np.int64)
    j = 0
    for i in range(n_half):
        if (mask >> i) & 1:
            idx[j] = 2 * i
            idx[j + 1] = 2 * i + 1
            j += 2
    b = np.empty((size, size), np.complex128)
    for r in range(size):
        ir = idx[r]
        for c in range(size):
            b[r, c] = atilde[ir, idx[c]]
    work = b.copy()
    if backend == 0:
        eig, _, conv = _hess_eigvals(work, cap_mult)
        if not conv:
            return 0.0 + 0.0j, 1
        t = _power_sums(eig, K)
    else:
        _hessenberg(work)
        a = _charpoly(work)
        t, ok = _traces_from_charpoly(a, K)
        if not ok:
            return 0.0 + 0.0j, 2
    s = np.zeros(K + 1, np.complex128)
    for k in range(1, K + 1):
        s[k] = t[k - 1] / (2.0 * k)
    if include_loops:
        v = np.empty(size, np.complex128)
        xv = np.empty(size, np.complex128)
        for r in range(size):
            v[r] = diag[idx[r]]
        for p in range(m):
            xv[2 * p] = v[2 * p + 1]
            xv[2 * p + 1] = v[2 * p]
        ell = _loop_chain(b, v, xv, K)
        for k in range(1, K + 1):
            s[k] += 0.5 * ell[k - 1]
    coeff = _exp_top(s)
    if (n_half - m) % 2 == 1:
        return -coeff, 0
    return coeff, 0


@njit(cache=True, parallel=True)
def sum_subsets_det(atilde, diag, n_half, backend, include_loops, workers, n_ranges, cap_mult):
    """Per-range Kahan partial sums over masks 1..2^(n/2)-1.

    Range boundaries depend only on n_half and n_ranges, and ranges are dealt
    round-robin to workers (popcount cost balances out), so the returned
    partials are independent of the worker count.
    """
    total = 1 << n_half
    nterms = total - 1
    width = (nterms + n_ranges - 1) // n_ranges
    sums = np.zeros(n_ranges, np.complex128)
    fails = np.zeros(n_ranges, np.int64)
    for w in prange(workers):
        for r in range(w, n_ranges, workers):
            lo = 1 + r * width
            hi = lo + width
            if hi > total:
                hi = total
            s = 0.0 + 0.0j
            comp = 0.0 + 0.0j
            for mask in range(lo, hi):
                term, st = subset_term(atilde, diag, mask, n_half, backend, include_loops, cap_mult)
                if st != 0:
                    fails[r] = st
                y = term - comp
                tacc = s + y
                comp = (tacc - s) - y
                s = tacc
            sums[r] = s
    return sums, fails


@njit(cache=True, parallel=True)
def sum_subsets_fast(atilde, diag, n_half, backend, include_loops, workers, n_ranges, cap_mult):
    """Per-worker compensated accumulation across that worker's ranges."""
    total = 1 << n_half
    nterms = total - 1
    width = (nterms + n_ranges - 1) // n_ranges
    wsums = np.zeros(workers, np.complex128)
    wfails = np.zeros(workers, np.int64)
    for w in prange(workers):
        s = 0.0 + 0.0j
        comp = 0.0 + 0.0j
        for r in range(w, n_ranges, workers):
            lo = 1 + r * width
            hi = lo + width
            if hi > total:
                hi = total
            for mask in range(lo, hi):
                term, st = subset_term(atilde, diag, mask, n_half, backend, include_loops, cap_mult)
                if st != 0:
                    wfails[w] = st
                y = term - comp
                tacc = s + y
                comp = (tacc - s) - y
                s = tacc
        wsums[w] = s
    return wsums, wfails


@njit(cache=True)
def power_traces_spectral(b, K, cap_mult):
    """tr(b^k), k = 1..K, from Hessenberg-QR eigenvalues; destroys b.

    Returns (traces, sweeps, converged).
    """
    eig, sweeps, conv = _hess_eigvals(b, cap_mult)
    return _power_sums(eig, K), sweeps, conv


@njit(cache=True)
def power_traces_charpoly(b, K):
    """tr(b^k) via the characteristic-polynomial recurrence; destroys b.

    Returns (traces, finite_ok).
    """
    _hessenberg(b)
    a = _charpoly(b)
    return _traces_from_charpoly(a, K)


@njit(cache=True)
def charpoly_coefficients(b):
    """Monic characteristic polynomial coefficients (ascending); destroys b."""
    _hessenberg(b)
    return _charpoly(b)
