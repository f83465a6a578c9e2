"""Pure-numpy fallback kernels, selected with HAFNIUM_KERNELS=numpy.

Mirrors the JIT module's surface. The spectral backend delegates the
eigenvalue step to LAPACK via np.linalg.eigvals; polynomial assembly and the
charpoly recurrence are vectorized numpy. Drivers run ranges on a thread
pool (range boundaries are identical to the JIT module, so deterministic
reductions stay bit-identical across worker counts within this path).
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

SWEEP_CAP_MULT = 30


def _mask_vertices(mask, n_half):
    out = []
    for i in range(n_half):
        if (mask >> i) & 1:
            out.append(2 * i)
            out.append(2 * i + 1)
    return np.asarray(out, dtype=np.int64)


def _hessenberg(h, ops=None):
    """In-place pivoted elementary Hessenberg reduction (batched updates)."""
    m = h.shape[0]
    for j in range(m - 2):
        col = np.abs(h[j + 1 :, j])
        if col.size == 0 or col.max() == 0.0:
            continue
        piv = j + 1 + int(col.argmax())
        if piv != j + 1:
            h[[piv, j + 1], j:] = h[[j + 1, piv], j:]
            h[:, [piv, j + 1]] = h[:, [j + 1, piv]]
        p = h[j + 1, j]
        mults = h[j + 2 :, j] / p
        h[j + 2 :, j + 1 :] -= np.outer(mults, h[j + 1, j + 1 :])
        h[:, j + 1] += h[:, j + 2 :] @ mults
        h[j + 2 :, j] = 0.0
        if ops is not None:
            ops[0] += 2 * mults.size * (m - j - 1) + m * mults.size
    return h


def _charpoly(h, ops=None):
    """Monic charpoly coefficients (ascending) of a Hessenberg matrix."""
    m = h.shape[0]
    polys = [np.zeros(k + 1, dtype=np.complex128) for k in range(m + 1)]
    polys[0][0] = 1.0
    for k in range(1, m + 1):
        pk = polys[k]
        pk[1 : k + 1] = polys[k - 1]
        pk[:k] -= h[k - 1, k - 1] * polys[k - 1]
        if ops is not None:
            ops[0] += k
        prod = 1.0 + 0.0j
        for i in range(k - 1, 0, -1):
            prod *= h[i, i - 1]
            if prod == 0:
                break
            coef = h[i - 1, k - 1] * prod
            if coef != 0:
                pk[:i] -= coef * polys[i - 1]
            if ops is not None:
                ops[0] += i + 2
    return polys[m]


def _traces_from_charpoly(a, K, ops=None):
    m = a.shape[0] - 1
    t = np.zeros(K, dtype=np.complex128)
    for k in range(1, min(K, m) + 1):
        acc = -k * a[m - k]
        for j in range(1, k):
            acc -= a[m - j] * t[k - j - 1]
        t[k - 1] = acc
        if ops is not None:
            ops[0] += k
    if m >= 1:
        for k in range(m + 1, K + 1):
            t[k - 1] = -(a[:m] @ t[k - m - 1 : k - 1])
            if ops is not None:
                ops[0] += m
    ok = bool(np.isfinite(t.view(np.float64)).all())
    return t, ok


def power_traces_spectral(b, K, cap_mult=SWEEP_CAP_MULT):
    """tr(b^k) from LAPACK eigenvalues; returns (traces, sweeps, converged)."""
    m = b.shape[0]
    t = np.zeros(K, dtype=np.complex128)
    if m == 0:
        return t, 0, True
    try:
        eig = np.linalg.eigvals(b)
    except np.linalg.LinAlgError:
        return t, -1, False
    p = np.ones(m, dtype=np.complex128)
    for k in range(K):
        p *= eig
        t[k] = p.sum()
    return t, 0, True


def power_traces_charpoly(b, K):
    _hessenberg(b)
    a = _charpoly(b)
    return _traces_from_charpoly(a, K)


def charpoly_coefficients(b):
    _hessenberg(b)
    return _charpoly(b)


def _exp_top(s):
    """Top-degree coefficient of sum_j s^j / j! by Horner on truncated series."""
    D = s.shape[0] - 1
    E = np.zeros(D + 1, dtype=np.complex128)
    E[0] = 1.0
    for j in range(D, 0, -1):
        E = np.convolve(E, s)[: D + 1] / j
        E[0] += 1.0
    return E[D]


def subset_term(atilde, diag, mask, n_half, backend, include_loops, cap_mult=SWEEP_CAP_MULT):
    """Signed contribution of one nonempty pair subset; see the JIT twin."""
    K = n_half
    idx = _mask_vertices(mask, n_half)
    m = idx.size // 2
    b = atilde[np.ix_(idx, idx)]
    if backend == 0:
        t, _, ok = power_traces_spectral(b.copy(), K, cap_mult)
        if not ok:
            return 0.0 + 0.0j, 1
    else:
        t, ok = power_traces_charpoly(b.copy(), K)
        if not ok:
            return 0.0 + 0.0j, 2
    s = np.zeros(K + 1, dtype=np.complex128)
    s[1:] = t / (2.0 * np.arange(1, K + 1))
    if include_loops:
        v = diag[idx]
        xv = v.reshape(-1, 2)[:, ::-1].ravel()
        u = v.copy()
        ell = np.zeros(K, dtype=np.complex128)
        for k in range(K):
            ell[k] = u @ xv
            if k < K - 1:
                u = u @ b
        s[1:] += 0.5 * ell
    coeff = _exp_top(s)
    sign = -1.0 if (n_half - m) % 2 else 1.0
    return sign * complex(coeff), 0


def _range_bounds(n_half, n_ranges):
    total = 1 << n_half
    nterms = total - 1
    width = -(-nterms // n_ranges)
    return [(1 + r * width, min(1 + (r + 1) * width, total)) for r in range(n_ranges)]


def _kahan_range(atilde, diag, n_half, backend, include_loops, lo, hi, cap_mult):
    s = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    fail = 0
    for mask in range(lo, hi):
        term, st = subset_term(atilde, diag, mask, n_half, backend, include_loops, cap_mult)
        if st != 0:
            fail = st
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s, fail


def sum_subsets_det(atilde, diag, n_half, backend, include_loops, workers, n_ranges,
                    cap_mult=SWEEP_CAP_MULT):
    bounds = _range_bounds(n_half, n_ranges)
    sums = np.zeros(n_ranges, dtype=np.complex128)
    fails = np.zeros(n_ranges, dtype=np.int64)

    def run(r):
        lo, hi = bounds[r]
        return _kahan_range(atilde, diag, n_half, backend, include_loops, lo, hi, cap_mult)

    if workers == 1:
        results = map(run, range(n_ranges))
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, range(n_ranges)))
    for r, (s, fail) in enumerate(results):
        sums[r] = s
        fails[r] = fail
    return sums, fails


def sum_subsets_fast(atilde, diag, n_half, backend, include_loops, workers, n_ranges,
                     cap_mult=SWEEP_CAP_MULT):
    bounds = _range_bounds(n_half, n_ranges)
    wsums = np.zeros(workers, dtype=np.complex128)
    wfails = np.zeros(workers, dtype=np.int64)

    def run(w):
        s = 0.0 + 0.0j
        comp = 0.0 + 0.0j
        fail = 0
        for r in range(w, n_ranges, workers):
            lo, hi = bounds[r]
            for mask in range(lo, hi):
                term, st = subset_term(atilde, diag, mask, n_half, backend, include_loops, cap_mult)
                if st != 0:
                    fail = st
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
        return s, fail

    if workers == 1:
        results = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, range(workers)))
    for w, (s, fail) in enumerate(results):
        wsums[w] = s
        wfails[w] = fail
    return wsums, wfails
