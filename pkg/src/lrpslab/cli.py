"""Command-line interface: ``lrpslab run | calibrate | report``.

Exit codes: 0 success (or accepted), 2 statistical rejection, 1 any
operational or usage error.
"""

import argparse
import json
import sys

from .calibration import (
    DEFAULT_CAP,
    SUITES,
    calibrate_methods,
    default_jobs,
    sort_problems,
)
from .geometry import KINDS, SETUPS, get_geometry, make_geometry
from .proposals import METHODS
from .report import ReportError, format_rows, read_csv

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _geometry_id(name, dim):
    try:
        if dim is not None:
            return make_geometry(name, dim).name
        return get_geometry(name).name
    except ValueError as exc:
        raise UsageError(
            f"{exc}\nvalid geometry ids: {', '.join(SETUPS)} (or <gauss|pyramid|shell><dim>); "
            f"with --dim: {', '.join(KINDS)}"
        ) from None


def _method(name):
    if name not in METHODS:
        raise UsageError(f"unknown method {name!r}; valid methods: {', '.join(METHODS)}")
    return name


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=False)


def cmd_run(args):
    from .runner import ConfigError, RunConfig, run_shrinkage, run_shrinkage_oracle
    from .shrinkage import verdict_for

    geometry = _geometry_id(args.geometry, args.dim)
    method = _method(args.method)
    try:
        cfg = RunConfig(geometry, method, args.nsteps, K=args.live_points,
                        n_collect=args.collect, warmup=args.warmup, seed=args.seed)
        run = run_shrinkage_oracle if args.oracle else run_shrinkage
        rec = run(cfg, timing=args.timing)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    verdict = verdict_for(rec)
    doc = {
        "config": dict(rec.config, oracle=bool(args.oracle)),
        "verdict": verdict.to_dict(),
        "n_collected": rec.n,
        "iterations_run": rec.iterations_run,
        "mean_evals_per_iter": rec.mean_evals_per_iter if not args.oracle else None,
        "wall_seconds": rec.wall_seconds,
    }
    if args.record:
        try:
            with open(args.record, "w", encoding="utf-8") as fh:
                fh.write(rec.to_json() + "\n")
        except OSError as exc:
            print(f"cannot write {args.record}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    print(_dump(doc))
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


def _methods(text):
    if text == "all":
        return list(METHODS)
    names = [m.strip() for m in text.split(",") if m.strip()]
    if not names:
        raise UsageError("no methods given")
    return [_method(m) for m in names]


def cmd_calibrate(args):
    methods = _methods(args.methods)
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; valid suites: {', '.join(SUITES)}")
    suite = SUITES[args.suite]
    if args.geometries:
        problems = [_geometry_id(g.strip(), None) for g in args.geometries.split(",")]
    else:
        problems = list(suite["problems"])
    problems = sort_problems(problems)
    K = args.live_points if args.live_points is not None else suite["K"]
    n_collect = args.collect if args.collect is not None else (
        suite["n_collect"] if args.live_points is None else None)
    warmup = args.warmup if args.warmup is not None else (
        suite["warmup"] if args.live_points is None else None)
    jobs = args.jobs if args.jobs is not None else default_jobs()

    out = None
    if args.out != "-":
        try:
            out = open(args.out, "w", encoding="utf-8", newline="")
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    try:
        rows = calibrate_methods(methods, problems, jobs=jobs, K=K, n_collect=n_collect,
                                 warmup=warmup, cap=args.cap, seed=args.seed,
                                 repeats=args.repeats, timing=args.timing)
        text = format_rows(rows)
        if out is None:
            sys.stdout.write(text)
        else:
            out.write(text)
    finally:
        if out is not None:
            out.close()
    return EXIT_OK


def cmd_report(args):
    from .plotting import write_figures

    try:
        rows = read_csv(args.input)
    except ReportError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        paths = write_figures(rows, args.out_dir)
    except OSError as exc:
        print(f"cannot write figures to {args.out_dir}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for p in paths:
        print(p)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="lrpslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    run = sub.add_parser("run", help="run one shrinkage-test configuration")
    run.add_argument("--geometry", required=True,
                     help=f"geometry id ({', '.join(SETUPS)}, ...) or a kind name with --dim")
    run.add_argument("--dim", type=int, help="dimension, when --geometry names a kind")
    run.add_argument("--method", default="cube-slice", help=f"one of: {', '.join(METHODS)}")
    run.add_argument("--nsteps", type=int, default=1, help="slice steps per iteration")
    run.add_argument("--live-points", type=int, default=400)
    run.add_argument("--collect", type=int, help="shrinkage samples to collect (default 25 K)")
    run.add_argument("--warmup", type=int, help="iterations discarded per run (default 3 K)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--oracle", action="store_true",
                     help="replace points by exact constrained draws instead of slice chains")
    run.add_argument("--record", metavar="PATH", help="also write the full record as JSON")
    run.add_argument("--timing", action="store_true", help="include wall-clock time")
    run.set_defaults(func=cmd_run)

    cal = sub.add_parser("calibrate", help="doubling search for N_steps over a problem suite")
    cal.add_argument("--methods", default="all", help="comma-separated methods or 'all'")
    cal.add_argument("--suite", default="full", help=f"one of: {', '.join(SUITES)}")
    cal.add_argument("--geometries", help="comma-separated geometry ids overriding the suite")
    cal.add_argument("--cap", type=int, default=DEFAULT_CAP)
    cal.add_argument("--out", default="-", help="CSV path ('-' for standard output)")
    cal.add_argument("--seed", type=int, default=0)
    cal.add_argument("--jobs", type=int, help="worker processes (default: LRPSLAB_JOBS or CPUs)")
    cal.add_argument("--repeats", type=int, default=0,
                     help="rerun accepted configurations with this many extra seeds")
    cal.add_argument("--live-points", type=int, help="override the suite's K")
    cal.add_argument("--collect", type=int)
    cal.add_argument("--warmup", type=int)
    cal.add_argument("--timing", action="store_true", help="fill the wall_seconds column")
    cal.set_defaults(func=cmd_calibrate)

    rep = sub.add_parser("report", help="render calibration figures from a CSV")
    rep.add_argument("--in", dest="input", required=True)
    rep.add_argument("--out-dir", required=True)
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lrpslab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
