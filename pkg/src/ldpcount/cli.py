"""Command line entry point: ``python -m ldpcount <subcommand>``.

Exit codes: 0 success, 2 usage error, 3 size guard, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .graph import GraphFormatError
from .harness import (PlanError, Query, compare_trees, exact_for, load_graph, load_plan,
                      run_plan, run_query, write_csv)
from .marked import trimmed_mean
from .netsim import Transcript
from .oracle import DEFAULT_WORK_LIMIT, SizeGuardError
from .pattern import PatternError, parse_pattern
from .privacy import PrivacyViolation

EXIT_USAGE, EXIT_GUARD, EXIT_IO = 2, 3, 4


class UsageError(Exception):
    pass


def _pattern_arg(args, mech: str | None = None):
    if args.pattern:
        return parse_pattern(args.pattern)
    if args.k is None:
        raise UsageError("--pattern or --k is required")
    kind = {"walk-basic": "walk", "walk-opt": "walk", "walk": "walk", "star": "star"}.get(mech, "path")
    return parse_pattern(f"{kind}:{args.k}")


def _query(args) -> Query:
    return Query(args.mech, _pattern_arg(args, args.mech), root=args.root,
                 distinct=args.distinct, unoriented=args.unoriented, noiseless=args.noiseless)


def _read_marks(path):
    try:
        with open(path) as fh:
            return [int(line) for line in fh if line.strip()]
    except ValueError as exc:
        raise UsageError(f"--fixed-marks: {exc}") from None


def cmd_exact(args) -> int:
    g = load_graph(args.graph, args.seed)
    p = _pattern_arg(args, "walk" if args.pattern is None and args.walk else None)
    q = Query("rr", p, distinct=args.distinct, unoriented=args.distinct)
    print(exact_for(g, q, args.limit))
    return 0


def cmd_run(args) -> int:
    g = load_graph(args.graph, args.seed)
    q = _query(args)
    marks = _read_marks(args.fixed_marks) if args.fixed_marks else None
    if marks is not None and q.mech not in ("path", "pattern"):
        raise UsageError("--fixed-marks applies to path and pattern mechanisms only")
    try:
        exact = exact_for(g, q, args.limit)
    except SizeGuardError:
        exact = None
    values, errs, comm = [], [], []
    for trial in range(args.trials):
        tr = Transcript() if args.dump_transcript and trial == 0 else None
        est = run_query(g, q, args.eps, args.seed, trial, args.nrep, marks, tr)
        est.accountant.assert_total(args.eps)
        values.append(float(est.value))
        comm.append(est.ledger.total_bytes)
        if exact:
            errs.append(abs(float(est.value) - exact) / exact * 100)
        if tr is not None:
            with open(args.dump_transcript, "w") as fh:
                tr.dump(fh)
    print(f"query\t{q.label}")
    print(f"graph\tN={g.n} M={g.m} d(G)={g.max_degree()}")
    print(f"rounds\t{est.rounds}")
    print(f"mean_estimate\t{np.mean(values):.6g}")
    print(f"exact\t{exact if exact is not None else 'NA'}")
    if errs:
        err, trimmed = trimmed_mean(errs, values)
        print(f"rel_err_pct\t{err:.4g}{'' if trimmed else ' (plain mean)'}")
    print(f"comm_MB\t{np.mean(comm) / 1e6:.6g}")
    return 0


def cmd_bench(args) -> int:
    plan = load_plan(args.plan)
    if args.output:
        plan = replace(plan, output=args.output)
    rows = run_plan(plan, workers=args.workers)
    if not plan.output:
        write_csv(rows, sys.stdout)
    return 0


def cmd_compare_trees(args) -> int:
    g = load_graph(args.graph, args.seed)
    p = parse_pattern(args.pattern)
    rows = compare_trees(g, p, args.roots, args.eps, args.trials, args.seed, args.nrep,
                         distinct=not args.embeddings, dataset=args.graph)
    print("root\tround_count\tleaves\tsigma\texact\trel_err_pct\tbytes_total")
    for r in rows:
        e = r.extra
        rel = "NA" if r.rel_err_pct is None else f"{r.rel_err_pct:.4g}"
        print(f"{e['root']}\t{e['round_count']}\t{e['leaves']}\t{e['sigma']}\t"
              f"{r.exact if r.exact is not None else 'NA'}\t{rel}\t{r.bytes_total:.0f}")
    return 0


def cmd_transcript(args) -> int:
    g = load_graph(args.graph, args.seed)
    q = _query(args)
    marks = _read_marks(args.fixed_marks) if args.fixed_marks else None
    tr = Transcript()
    run_query(g, q, args.eps, args.seed, args.trial, 1, marks, tr)
    tr.dump(sys.stdout)
    return 0


def _common(p, mech=True):
    p.add_argument("--graph", required=True, help="er:N:p, avg:N:mean_degree, file:PATH or PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", help="walk:K, path:K, star:K or 'a-b,b-c,...'")
    p.add_argument("--k", type=int)
    p.add_argument("--distinct", action="store_true")
    p.add_argument("--limit", type=float, default=DEFAULT_WORK_LIMIT,
                   help="work limit for exact enumeration")
    if mech:
        p.add_argument("--mech", required=True,
                       help="walk-basic, walk-opt (walk), path, pattern, star, rr")
        p.add_argument("--eps", type=float, default=1.0)
        p.add_argument("--root", type=int)
        p.add_argument("--unoriented", action="store_true")
        p.add_argument("--noiseless", action="store_true")
        p.add_argument("--fixed-marks", help="file with one mark per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldpcount", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="print the exact count")
    _common(p, mech=False)
    p.add_argument("--walk", action="store_true", help="with --k: count walks instead of paths")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("run", help="run a mechanism for several trials")
    _common(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--nrep", type=int, default=1)
    p.add_argument("--dump-transcript", metavar="FILE")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="run an experiment plan file, emit CSV")
    p.add_argument("plan")
    p.add_argument("--output")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare-trees", help="pattern mechanism under several roots")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", required=True)
    p.add_argument("--roots", type=int, nargs="+", required=True)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--nrep", type=int, default=1)
    p.add_argument("--embeddings", action="store_true", help="count embeddings, not instances")
    p.set_defaults(func=cmd_compare_trees)

    p = sub.add_parser("transcript", help="dump the published values of one run")
    _common(p)
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=cmd_transcript)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (OSError, GraphFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, PlanError, PatternError, PrivacyViolation, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
