"""``adiwave`` command line: simulate, converge, bench.

Exit status: 0 on success, 2 for bad flags, 3 for invalid configuration,
4 when the solver diverges.
"""
import argparse
import csv
import io
import math
import sys

from . import parallel
from .adi import COMPUTED, CONSISTENT, JACOBI, MIDPOINT, PRESCRIBED, SEIDEL, AdiConfig
from .bench import benchmark_series, records_to_csv
from .convergence import (
    DEFAULT_CFL,
    DEFAULT_PERIODS,
    Diverged,
    convergence_study,
    run_case,
)
from .errors import AdiWaveError, NonFinite
from .fields import GridSpec, Scheme, write_snapshot
from .linalg import frobenius_norm
from .manufactured import ManufacturedCase

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DIVERGED = 4

SIMULATE_FIELDS = ("scheme", "gamma", "k", "N", "h", "dt", "steps", "t_end",
                   "error_fro", "norm_u", "max_inner_iters")


def _int_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _common(p):
    p.add_argument("--scheme", choices=("cfd", "mfd"), default="cfd")
    p.add_argument("--cfl", type=float, default=None,
                   help="Courant number (default 0.91 for cfd, 0.81 for mfd)")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=0.25)
    p.add_argument("--period", type=float, default=1.0 / math.sqrt(2.0))
    p.add_argument("--periods", type=float, default=DEFAULT_PERIODS)
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--min-check", type=int, default=6)
    p.add_argument("--coupling", choices=(SEIDEL, JACOBI), default=SEIDEL)
    p.add_argument("--intermediate-bc", choices=(MIDPOINT, CONSISTENT), default=MIDPOINT)
    p.add_argument("--edge-velocity", choices=(COMPUTED, PRESCRIBED), default=None,
                   help="normal velocity on the domain edges (default: per scheme)")
    p.add_argument("--output", "-o", default="-", help="CSV destination, '-' for stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="adiwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one manufactured case and report its error")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--snapshot", default=None,
                   help="also write the final state (.csv text or binary otherwise)")

    p = sub.add_parser("converge", help="error and rate table over a grid ladder")
    _common(p)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--timings", action="store_true",
                   help="fill the wall_time_s column (output is then not byte-reproducible)")

    p = sub.add_parser("bench", help="time the step loop for several worker counts")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--workers", type=_int_list, default=[1])
    p.add_argument("--steps", type=int, default=10)
    return parser


def _config(args):
    scheme = Scheme.parse(args.scheme)
    cfl = DEFAULT_CFL[scheme] if args.cfl is None else args.cfl
    cfg = AdiConfig(cfl=cfl, eps=args.eps, k_max=args.k_max,
                    min_iters_before_check=args.min_check, coupling=args.coupling,
                    intermediate_bc=args.intermediate_bc, edge_velocity=args.edge_velocity)
    try:
        case = ManufacturedCase(gamma=args.gamma, k=args.k, lam=args.lam, period=args.period)
    except ValueError as exc:
        raise _ConfigFailure(str(exc))
    if not args.periods > 0:
        raise _ConfigFailure("periods must be positive")
    ladder = args.n if isinstance(args.n, list) else [args.n]
    for n in ladder:
        GridSpec(n)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise _ConfigFailure("--n ladder must be strictly increasing")
    workers = args.workers if isinstance(args.workers, list) else [args.workers]
    for w in workers:
        if w is not None and w < 1:
            raise _ConfigFailure("--workers must be >= 1")
    if getattr(args, "steps", 1) < 1:
        raise _ConfigFailure("--steps must be >= 1")
    return scheme, cfg, case


class _ConfigFailure(Exception):
    pass


def _simulate(args, scheme, cfg, case):
    if args.workers is not None:
        parallel.set_workers(args.workers)
    res = run_case(scheme, case, args.n, cfg, args.periods)
    state = res.final_state
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SIMULATE_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerow({
        "scheme": scheme.label,
        "gamma": repr(float(case.gamma)),
        "k": case.k,
        "N": args.n,
        "h": repr(1.0 / args.n),
        "dt": repr(res.dt),
        "steps": res.steps,
        "t_end": repr(state.time),
        "error_fro": repr(res.error),
        "norm_u": repr(float(frobenius_norm(state.U))),
        "max_inner_iters": res.max_inner_iters,
    })
    if args.snapshot:
        fmt = "csv" if args.snapshot.endswith(".csv") else "binary"
        write_snapshot(state, args.snapshot, fmt)
    return buf.getvalue()


def _converge(args, scheme, cfg, case):
    if args.workers is not None:
        parallel.set_workers(args.workers)
    report = convergence_study(scheme, case, args.n, cfg, args.periods)
    return report.to_csv(timings=args.timings)


def _bench(args, scheme, cfg, case):
    records = benchmark_series(scheme, case, args.n, args.workers, args.steps, cfg)
    return records_to_csv(records)


def _emit(text, path):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def parse_and_run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        scheme, cfg, case = _config(args)
    except (_ConfigFailure, AdiWaveError, ValueError) as exc:
        print(f"adiwave: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"simulate": _simulate, "converge": _converge, "bench": _bench}[args.command]
    try:
        text = handler(args, scheme, cfg, case)
    except (Diverged, NonFinite) as exc:
        print(f"adiwave: diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except AdiWaveError as exc:
        print(f"adiwave: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, args.output)
    return EXIT_OK


def main():
    sys.exit(parse_and_run())


if __name__ == "__main__":
    main()
