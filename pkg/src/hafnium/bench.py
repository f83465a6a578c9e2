"""Benchmark families, timing sweeps, scaling fits, CSV reporting.

Families: 'complete' (all ones, zero diagonal, exact value (n-1)!!),
'complete_loops' (all ones including diagonal, exact value the telephone
number T(n)), 'bipartite' (block embedding of the all-ones n/2 square,
exact value (n/2)!), and 'random' (uniform [-1,1] real and imaginary parts,
symmetrized, no reference). Wall time is measured around the engine call
only, on the monotonic clock.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .engine import EngineOptions, hafnian, loop_hafnian
from .errors import (
    BadFamily,
    BudgetExceeded,
    DivisionByZeroReference,
    InsufficientData,
    OddDimension,
    ParseError,
)
from .matrix import ComplexSymmetricMatrix, validate_or_symmetrize
from .oracle import double_factorial, telephone

FAMILIES = ("complete", "complete_loops", "bipartite", "random")

CSV_HEADER = (
    "family,n,threads,backend,mode,repetition,wall_seconds,"
    "result_re,result_im,reference,percent_error_re,percent_error_abs"
)

RNG_NAME = "pcg64"  # np.random.default_rng; recorded in CSV metadata


@dataclass
class BenchmarkRecord:
    family: str
    n: int
    threads: int
    backend: str
    mode: str
    repetition: int | str
    wall_seconds: float
    result: complex
    reference: int | None = None
    percent_error_re: float | None = None
    percent_error_abs: float | None = None

    def csv_row(self) -> str:
        ref = "" if self.reference is None else str(self.reference)
        pe_re = "" if self.percent_error_re is None else repr(self.percent_error_re)
        pe_abs = "" if self.percent_error_abs is None else repr(self.percent_error_abs)
        return (
            f"{self.family},{self.n},{self.threads},{self.backend},{self.mode},"
            f"{self.repetition},{self.wall_seconds!r},{self.result.real!r},"
            f"{self.result.imag!r},{ref},{pe_re},{pe_abs}"
        )


def generate(family: str, n: int, seed: int = 0) -> ComplexSymmetricMatrix:
    """Benchmark matrix of the given family; `seed` only affects 'random'."""
    if family not in FAMILIES:
        raise BadFamily(f"family must be one of {FAMILIES}, got {family!r}")
    if n < 0 or n % 2:
        raise OddDimension(f"benchmark families need even n >= 0, got {n}")
    if family == "complete":
        a = np.ones((n, n), dtype=np.complex128)
        np.fill_diagonal(a, 0.0)
    elif family == "complete_loops":
        a = np.ones((n, n), dtype=np.complex128)
    elif family == "bipartite":
        a = np.zeros((n, n), dtype=np.complex128)
        h = n // 2
        a[:h, h:] = 1.0
        a[h:, :h] = 1.0
    else:
        rng = np.random.default_rng(seed)
        raw = rng.uniform(-1.0, 1.0, (n, n)) + 1j * rng.uniform(-1.0, 1.0, (n, n))
        a = (raw + raw.T) / 2
    return validate_or_symmetrize(a, mode="strict")


def reference_value(family: str, n: int) -> int | None:
    """Exact big-integer value, or None for the random family."""
    if family not in FAMILIES:
        raise BadFamily(f"family must be one of {FAMILIES}, got {family!r}")
    if family == "complete":
        return double_factorial(n - 1) if n else 1
    if family == "complete_loops":
        return telephone(n)
    if family == "bipartite":
        return math.factorial(n // 2)
    return None


def percent_error(numerical: complex, exact) -> float:
    """Real part of (numerical / exact - 1), times 100."""
    if exact == 0:
        raise DivisionByZeroReference("percent error needs a nonzero reference")
    return float((complex(numerical) / complex(exact) - 1).real * 100.0)


def percent_error_abs(numerical: complex, exact) -> float:
    """|numerical / exact - 1|, times 100."""
    if exact == 0:
        raise DivisionByZeroReference("percent error needs a nonzero reference")
    return float(abs(complex(numerical) / complex(exact) - 1) * 100.0)


def _engine_call(family: str, loops: bool | None):
    if loops is None:
        loops = family == "complete_loops"
    return loop_hafnian if loops else hafnian


def _measure(a, family, n, threads, backend, mode, repetition, loops=None) -> BenchmarkRecord:
    call = _engine_call(family, loops)
    opts = EngineOptions(backend=backend, threads=threads, reduction=mode)
    t0 = time.perf_counter()
    result = call(a, opts)
    wall = time.perf_counter() - t0
    ref = reference_value(family, n)
    rec = BenchmarkRecord(
        family=family, n=n, threads=threads, backend=backend, mode=mode,
        repetition=repetition, wall_seconds=wall, result=result, reference=ref,
    )
    if ref is not None:
        rec.percent_error_re = percent_error(result, ref)
        rec.percent_error_abs = percent_error_abs(result, ref)
    return rec


def sweep(family: str, n_min: int, n_max: int, step: int = 2, threads: int = 1,
          backend: str = "spectral", mode: str = "deterministic",
          repetitions: int = 1, seed: int = 0, budget_seconds: float | None = None,
          loops: bool | None = None) -> list[BenchmarkRecord]:
    """One record per (n, repetition), plus a repetition='median' row per n
    when repetitions > 1. Raises BudgetExceeded (carrying .records with the
    partial, still valid results) once the budget is exhausted."""
    records: list[BenchmarkRecord] = []
    spent = 0.0
    seeds = np.random.SeedSequence(seed).spawn((n_max - n_min) // step + 1)
    for i, n in enumerate(range(n_min, n_max + 1, step)):
        if budget_seconds is not None and spent > budget_seconds:
            exc = BudgetExceeded(
                f"budget {budget_seconds}s exhausted before n={n}; "
                f"{len(records)} records kept"
            )
            exc.records = records
            raise exc
        a = generate(family, n, seed=seeds[i].generate_state(1)[0] if family == "random" else 0)
        walls = []
        for rep in range(repetitions):
            rec = _measure(a, family, n, threads, backend, mode, rep, loops)
            records.append(rec)
            walls.append(rec.wall_seconds)
            spent += rec.wall_seconds
        if repetitions > 1:
            med = records[-repetitions]  # identical results across reps; median time
            records.append(BenchmarkRecord(
                family=family, n=n, threads=threads, backend=backend, mode=mode,
                repetition="median", wall_seconds=float(np.median(walls)),
                result=med.result, reference=med.reference,
                percent_error_re=med.percent_error_re,
                percent_error_abs=med.percent_error_abs,
            ))
    return records


@dataclass
class FitResult:
    a: float
    b: float
    c: float
    r_squared: float
    residual: float  # sum of squared residuals on log2(time)


def fit_scaling(records, n_threshold: int = 20) -> FitResult:
    """Least-squares fit of log2(t) = log2(a) + b log2(n) + c n over the
    median wall time per n, restricted to n > n_threshold."""
    times: dict[int, list[float]] = {}
    medians: dict[int, float] = {}
    for rec in records:
        if isinstance(rec, BenchmarkRecord):
            n, wall, rep = rec.n, rec.wall_seconds, rec.repetition
        else:
            n, wall, rep = int(rec[0]), float(rec[1]), None
        if rep == "median":
            medians[n] = wall
        else:
            times.setdefault(n, []).append(wall)
    points = {n: medians.get(n, float(np.median(w))) for n, w in times.items()}
    points.update({n: w for n, w in medians.items()})
    ns = sorted(n for n in points if n > n_threshold and points[n] > 0)
    if len(ns) < 5:
        raise InsufficientData(
            f"need >= 5 points with n > {n_threshold}, have {len(ns)}"
        )
    y = np.log2([points[n] for n in ns])
    X = np.column_stack([np.ones(len(ns)), np.log2(ns), np.asarray(ns, dtype=float)])
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    rss = float(((y - fitted) ** 2).sum())
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    return FitResult(a=float(2.0 ** coef[0]), b=float(coef[1]), c=float(coef[2]),
                     r_squared=r2, residual=rss)


def thread_scaling(family: str, n: int, thread_list, weak: bool = False,
                   backend: str = "spectral", mode: str = "deterministic",
                   repetitions: int = 1, seed: int = 0,
                   loops: bool | None = None) -> list[BenchmarkRecord]:
    """Strong scaling (fixed n, varying threads) or weak scaling, where each
    doubling step also grows the matrix by 2 rows/columns."""
    records = []
    for i, t in enumerate(thread_list):
        ni = n + 2 * i if weak else n
        a = generate(family, ni, seed=seed)
        for rep in range(repetitions):
            records.append(_measure(a, family, ni, t, backend, mode, rep, loops))
    return records


def write_csv(records, fh, metadata: dict | None = None) -> None:
    """'#' metadata lines, the exact schema header, then one row per record."""
    meta = {"generator": RNG_NAME}
    meta.update(metadata or {})
    for k, v in meta.items():
        fh.write(f"# {k}={v}\n")
    fh.write(CSV_HEADER + "\n")
    for rec in records:
        fh.write(rec.csv_row() + "\n")


def read_csv_records(fh):
    """Rows as (family, n, threads, backend, mode, repetition, wall, ...) tuples."""
    header_seen = False
    out = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise ParseError(f"unexpected CSV header: {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        rep = parts[5]
        rec = BenchmarkRecord(
            family=parts[0], n=int(parts[1]), threads=int(parts[2]),
            backend=parts[3], mode=parts[4],
            repetition=rep if rep == "median" else int(rep),
            wall_seconds=float(parts[6]),
            result=complex(float(parts[7]), float(parts[8])),
            reference=int(parts[9]) if parts[9] else None,
            percent_error_re=float(parts[10]) if parts[10] else None,
            percent_error_abs=float(parts[11]) if parts[11] else None,
        )
        out.append(rec)
    return out
