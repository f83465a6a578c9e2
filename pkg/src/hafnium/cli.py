"""Command-line front end.

Subcommands: compute, generate, sweep, fit, threads, oracle. Matrix files
use the text/binary/JSON formats from hafnium.matrix. Exit codes: 0 ok,
2 parse, 3 dimension, 4 numeric, 5 budget.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import bench, oracle
from .engine import EngineOptions, hafnian, loop_hafnian
from .errors import BudgetExceeded, HafniumError
from .kernels import kernel_mode
from .matrix import read_array, read_matrix, write_matrix


def format_mantissa_exp(x: float) -> str:
    """Mantissa with 12 decimals and a bare integer exponent, e.g. 3.0e0."""
    if x == 0 or not math.isfinite(x):
        return "0.0e0" if x == 0 else repr(x)
    exp = int(math.floor(math.log10(abs(x))))
    mant = x / 10.0 ** exp
    if abs(mant) >= 10.0:  # log10 rounding at power-of-ten boundaries
        mant /= 10.0
        exp += 1
    return f"{mant:.12f}e{exp}"


def format_complex(z: complex) -> str:
    re = format_mantissa_exp(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{re} {sign} {format_mantissa_exp(abs(z.imag))} i"


def _add_engine_flags(p: argparse.ArgumentParser):
    p.add_argument("--backend", choices=("spectral", "charpoly"), default="spectral")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (default: HAFNIUM_THREADS env var, else 1)")
    p.add_argument("--mode", choices=("deterministic", "fast"), default="deterministic")


def _cmd_compute(args) -> int:
    M = read_matrix(args.path, format=args.format)
    opts = EngineOptions(backend=args.backend, threads=args.threads, reduction=args.mode)
    call = loop_hafnian if args.loops else hafnian
    t0 = time.perf_counter()
    result = call(M, opts)
    wall = time.perf_counter() - t0
    n = M.n
    terms = (1 << (n // 2)) - 1 if n else 0
    mag = abs(result)
    print(format_complex(result))
    print(f"log10|result|: {math.log10(mag) if mag > 0 else float('-inf'):.6f}")
    print(f"wall_seconds: {wall:.6f}")
    print(f"backend: {args.backend}  mode: {args.mode}  threads: {opts.resolved_threads()}  "
          f"kernels: {kernel_mode()}")
    print(f"terms: {terms}")
    return 0


def _cmd_generate(args) -> int:
    M = bench.generate(args.family, args.n, seed=args.seed)
    if args.out:
        write_matrix(M, args.out, format=args.format)
    else:
        if args.format == "binary":
            raise HafniumError("binary output needs --out")
        write_matrix(M, "/dev/stdout", format=args.format)
    return 0


def _open_out(path):
    return open(path, "w") if path else sys.stdout


def _cmd_sweep(args) -> int:
    exit_code = 0
    try:
        records = bench.sweep(
            args.family, args.n_min, args.n_max, step=args.step,
            threads=args.threads if args.threads is not None else 1,
            backend=args.backend, mode=args.mode, repetitions=args.repetitions,
            seed=args.seed, budget_seconds=args.budget_seconds,
            loops=True if args.loops else None,
        )
    except BudgetExceeded as exc:
        print(f"hafnium: {exc}", file=sys.stderr)
        records = exc.records
        exit_code = exc.exit_code
    meta = {"seed": args.seed, "kernels": kernel_mode()}
    fh = _open_out(args.out)
    try:
        bench.write_csv(records, fh, metadata=meta)
    finally:
        if args.out:
            fh.close()
    return exit_code


def _cmd_fit(args) -> int:
    with open(args.csv) as fh:
        records = bench.read_csv_records(fh)
    fit = bench.fit_scaling(records, n_threshold=args.n_threshold)
    print(f"a: {fit.a:.6e}")
    print(f"b: {fit.b:.4f}")
    print(f"c: {fit.c:.4f}")
    print(f"r_squared: {fit.r_squared:.6f}")
    print(f"residual: {fit.residual:.6e}")
    return 0


def _cmd_threads(args) -> int:
    thread_list = [int(t) for t in args.threads_list.split(",") if t]
    records = bench.thread_scaling(
        args.family, args.n, thread_list, weak=args.weak, backend=args.backend,
        mode=args.mode, repetitions=args.repetitions, seed=args.seed,
        loops=True if args.loops else None,
    )
    fh = _open_out(args.out)
    try:
        bench.write_csv(records, fh, metadata={"seed": args.seed, "kernels": kernel_mode()})
    finally:
        if args.out:
            fh.close()
    return 0


def _cmd_oracle(args) -> int:
    what = args.what
    if what in ("telephone", "dfact"):
        k = int(args.arg)
        value = oracle.telephone(k) if what == "telephone" else oracle.double_factorial(k)
        print(value)
        return 0
    a = read_array(args.arg, format=args.format)
    if what == "haf":
        print(format_complex(oracle.hafnian_bruteforce(a)))
    elif what == "lhaf":
        print(format_complex(oracle.loop_hafnian_bruteforce(a)))
    elif what == "permanent":
        print(format_complex(oracle.permanent_ryser(a)))
    elif what == "matchings":
        print(oracle.matching_count_bruteforce((np.abs(a) != 0).astype(np.int64)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hafnium",
                                 description="Exact hafnian / loop-hafnian computation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="hafnian of a matrix file")
    p.add_argument("path")
    p.add_argument("--format", choices=("auto", "text", "binary", "json"), default="auto")
    p.add_argument("--loops", action="store_true", help="loop hafnian instead")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("generate", help="write a benchmark-family matrix")
    p.add_argument("--family", choices=bench.FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "binary", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sweep", help="timing/accuracy sweep over n, CSV out")
    p.add_argument("--family", choices=bench.FAMILIES, required=True)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loops", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fit", help="fit a*n^b*2^(c*n) to a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--n-threshold", type=int, default=20)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("threads", help="strong/weak thread-scaling experiment")
    p.add_argument("--family", choices=bench.FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threads-list", default="1,2,4,8")
    p.add_argument("--weak", action="store_true",
                   help="double threads while growing n by 2 each step")
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loops", action="store_true")
    p.add_argument("--out", default=None)
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_threads)

    p = sub.add_parser("oracle", help="brute-force reference values")
    p.add_argument("what", choices=("haf", "lhaf", "permanent", "matchings",
                                    "telephone", "dfact"))
    p.add_argument("arg", help="matrix file, or an integer for telephone/dfact")
    p.add_argument("--format", choices=("auto", "text", "binary", "json"), default="auto")
    p.set_defaults(func=_cmd_oracle)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except HafniumError as exc:
        print(f"hafnium: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"hafnium: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
