"""Experiment orchestration: query dispatch, trial scheduling and CSV reports.

Plan files are plain ``key = value`` lines (``#`` starts a comment)::

    dataset = er:2000:0.005        # or avg:N:mean_degree, or file:path/to/edges.txt
    seed = 1
    trials = 10
    eps = 0.2:4.0:0.2              # list "0.5, 1" or inclusive range start:stop:step
    n_rep = 1, 2
    output = results.csv
    exact_cache = exact.json       # optional {"<query>": count} sidecar
    query = walk-opt walk:4 unoriented
    query = pattern 0-1,1-2,1-3,3-4 root=1 distinct

Query lines are ``<mechanism> <pattern> [flags]`` with flags ``distinct``,
``unoriented``, ``noiseless`` and ``root=R``. Mechanisms: ``walk-basic``,
``walk-opt`` (alias ``walk``), ``path``, ``pattern``, ``star``, ``rr``.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baseline_rr import run_rr
from .estimate import Estimate
from .graph import Graph, gen_average_degree, gen_erdos_renyi, load_edge_file
from .marked import MarkedRunConfig, run_path, run_pattern, run_star, trimmed_mean
from .oracle import DEFAULT_WORK_LIMIT, SizeGuardError, exact_count
from .pattern import Pattern, formulate_tree, parse_pattern, round_count
from .walk import WalkRunConfig, run_walk_basic, run_walk_opt

MECHANISMS = ("walk-basic", "walk-opt", "path", "pattern", "star", "rr")
WORKERS_ENV = "LDPCOUNT_WORKERS"


class PlanError(ValueError):
    pass


def load_graph(spec: str, seed: int = 0) -> Graph:
    """``er:N:p``, ``avg:N:mean_degree``, ``file:path`` or a bare path."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "er":
            n, p = rest.split(":")
            return gen_erdos_renyi(int(n), float(p), seed)
        if kind == "avg":
            n, d = rest.split(":")
            return gen_average_degree(int(n), float(d), seed)
    except ValueError as exc:
        raise PlanError(f"bad graph spec {spec!r}: {exc}") from None
    return load_edge_file(rest if kind == "file" else spec)


@dataclass(frozen=True)
class Query:
    mech: str
    pattern: Pattern
    root: int | None = None
    distinct: bool = False
    unoriented: bool = False
    noiseless: bool = False

    def __post_init__(self):
        mech = "walk-opt" if self.mech == "walk" else self.mech
        object.__setattr__(self, "mech", mech)
        if mech not in MECHANISMS:
            raise PlanError(f"unknown mechanism {self.mech!r}; choose from {', '.join(MECHANISMS)}")
        kind = self.pattern.kind
        need = {"walk-basic": ("walk",), "walk-opt": ("walk",), "path": ("path",),
                "star": ("star",)}.get(mech)
        if need and kind not in need:
            raise PlanError(f"mechanism {mech} needs a {need[0]}:k pattern, got {self.pattern}")
        if mech == "pattern" and kind == "walk":
            raise PlanError("walks are not acyclic patterns; use walk-basic/walk-opt")

    @property
    def label(self) -> str:
        flags = [f for f in ("distinct", "unoriented", "noiseless") if getattr(self, f)]
        if self.root is not None:
            flags.append(f"root={self.root}")
        return " ".join([self.mech, str(self.pattern), *flags])

    def dedupe(self) -> bool:
        return self.distinct or self.unoriented

    def tree(self):
        return formulate_tree(self.pattern, self.root)


def parse_query(line: str) -> Query:
    parts = line.split()
    if len(parts) < 2:
        raise PlanError(f"query needs '<mechanism> <pattern>', got {line!r}")
    kwargs = {}
    for flag in parts[2:]:
        if flag.startswith("root="):
            kwargs["root"] = int(flag[5:])
        elif flag in ("distinct", "unoriented", "noiseless"):
            kwargs[flag] = True
        else:
            raise PlanError(f"unknown query flag {flag!r}")
    return Query(parts[0], parse_pattern(parts[1]), **kwargs)


def run_query(g: Graph, q: Query, eps: float, seed: int, trial: int = 0, n_rep: int = 1,
              fixed_marks=None, transcript=None) -> Estimate:
    """Execute one trial of a query."""
    k = q.pattern.k
    if q.mech in ("walk-basic", "walk-opt"):
        if n_rep != 1:
            raise PlanError("n_rep applies to marking mechanisms only")
        cfg = WalkRunConfig(k, eps, q.noiseless, q.dedupe(), seed, trial)
        run = run_walk_basic if q.mech == "walk-basic" else run_walk_opt
        return run(g, cfg, transcript)
    if q.mech == "rr":
        return run_rr(g, q.pattern, eps, q.dedupe(), seed, trial)
    cfg = MarkedRunConfig(eps, n_rep, q.noiseless, q.distinct,
                          None if fixed_marks is None else tuple(fixed_marks), seed, trial)
    if q.mech == "path":
        return run_path(g, k, cfg, transcript)
    if q.mech == "star":
        return run_star(g, k, cfg, transcript)
    return run_pattern(g, q.tree(), cfg, transcript)


def exact_for(g: Graph, q: Query, limit: float = DEFAULT_WORK_LIMIT) -> int:
    return exact_count(g, q.pattern, q.dedupe(), limit)


@dataclass(frozen=True)
class ExperimentPlan:
    dataset: str
    queries: tuple[Query, ...]
    eps_grid: tuple[float, ...] = (1.0,)
    trials: int = 10
    n_rep_grid: tuple[int, ...] = (1,)
    seed: int = 0
    output: str | None = None
    exact_cache: str | None = None
    exact_limit: float = DEFAULT_WORK_LIMIT

    def __post_init__(self):
        if self.trials < 1:
            raise PlanError("trials must be >= 1")
        if any(e <= 0 for e in self.eps_grid):
            raise PlanError("epsilon values must be positive")
        if any(r < 1 for r in self.n_rep_grid):
            raise PlanError("n_rep values must be >= 1")


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if text.count(":") == 2:
        start, stop, step = (float(x) for x in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(x) for x in text.replace(",", " ").split())


def parse_plan(text: str, base: Path | None = None) -> ExperimentPlan:
    fields: dict = {"queries": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise PlanError(f"plan line {lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        try:
            if key == "query":
                fields["queries"].append(parse_query(value))
            elif key == "dataset":
                fields["dataset"] = value
            elif key == "eps":
                fields["eps_grid"] = _floats(value)
            elif key == "n_rep":
                fields["n_rep_grid"] = tuple(int(x) for x in _floats(value))
            elif key in ("trials", "seed"):
                fields[key] = int(value)
            elif key == "exact_limit":
                fields[key] = float(value)
            elif key in ("output", "exact_cache"):
                fields[key] = str(base / value) if base and not os.path.isabs(value) else value
            else:
                raise PlanError(f"unknown key {key!r}")
        except (ValueError, SizeGuardError) as exc:
            raise PlanError(f"plan line {lineno}: {exc}") from None
    if "dataset" not in fields:
        raise PlanError("plan has no dataset")
    if not fields["queries"]:
        raise PlanError("plan has no query lines")
    fields["queries"] = tuple(fields["queries"])
    return ExperimentPlan(**fields)


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    return parse_plan(path.read_text(), path.parent)


REPORT_COLUMNS = (
    "dataset", "query", "mechanism", "eps", "n_rep", "trials", "trimmed",
    "rel_err_pct", "mean_estimate", "exact", "rounds",
    "bytes_node_to_node", "bytes_node_to_analyzer", "bytes_analyzer_to_node", "bytes_total",
    "wall_time_s",
)


@dataclass
class ReportRow:
    dataset: str
    query: str
    mechanism: str
    eps: float
    n_rep: int
    trials: int
    trimmed: bool
    rel_err_pct: float | None
    mean_estimate: float
    exact: int | None
    rounds: int
    bytes_node_to_node: float
    bytes_node_to_analyzer: float
    bytes_analyzer_to_node: float
    bytes_total: float
    wall_time_s: float
    extra: dict = field(default_factory=dict)

    def csv_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        if d["exact"] is None:
            d["exact"] = "NA"
        if d["rel_err_pct"] is None:
            d["rel_err_pct"] = ""
        return d


def cell_seed(master: int, cell: int) -> int:
    """Independent seed for one plan cell, whatever order cells run in."""
    return int(np.random.SeedSequence(master, spawn_key=(cell,)).generate_state(1)[0])


def run_cell(g: Graph, dataset: str, q: Query, eps: float, n_rep: int, trials: int,
             seed: int, exact: int | None) -> ReportRow:
    estimates, walls, rel = [], [], []
    for trial in range(trials):
        t0 = time.perf_counter()
        est = run_query(g, q, eps, seed, trial, n_rep)
        walls.append(time.perf_counter() - t0)
        est.accountant.assert_total(eps)
        estimates.append(est)
        if exact:
            rel.append(abs(float(est.value) - exact) / exact * 100)
    trimmed = trials == 10
    # runs are ranked by estimate, then the retained runs' errors averaged
    rel_err = trimmed_mean(rel, [float(e.value) for e in estimates])[0] if rel else None

    def mean_bytes(channel):
        return float(np.mean([e.ledger.bytes(channel) for e in estimates]))

    return ReportRow(
        dataset=dataset, query=q.label, mechanism=q.mech, eps=eps, n_rep=n_rep,
        trials=trials, trimmed=trimmed, rel_err_pct=rel_err,
        mean_estimate=float(np.mean([float(e.value) for e in estimates])),
        exact=exact, rounds=estimates[0].rounds,
        bytes_node_to_node=mean_bytes("node_to_node"),
        bytes_node_to_analyzer=mean_bytes("node_to_analyzer"),
        bytes_analyzer_to_node=mean_bytes("analyzer_to_node"),
        bytes_total=float(np.mean([e.ledger.total_bytes for e in estimates])),
        wall_time_s=statistics.median(walls),
    )


def _load_cache(path) -> dict:
    if path and os.path.exists(path):
        with open(path) as fh:
            return json.load(fh)
    return {}


def _exact_lookup(g, q, cache: dict, limit: float) -> int | None:
    key = str(q.pattern) + (" distinct" if q.dedupe() else "")
    if key in cache:
        return None if cache[key] is None else int(cache[key])
    try:
        value = exact_for(g, q, limit)
    except SizeGuardError:
        value = None
    cache[key] = value
    return value


def _run_cell_job(args):
    return run_cell(*args)


def run_plan(plan: ExperimentPlan, graph: Graph | None = None,
             workers: int | None = None) -> list[ReportRow]:
    """One row per (query, eps, n_rep) cell; writes CSV when ``plan.output`` is set."""
    g = graph if graph is not None else load_graph(plan.dataset, plan.seed)
    cache = _load_cache(plan.exact_cache)
    jobs = []
    for q in plan.queries:
        exact = _exact_lookup(g, q, cache, plan.exact_limit)
        walk_like = q.mech in ("walk-basic", "walk-opt", "rr")
        for eps in plan.eps_grid:
            for n_rep in (plan.n_rep_grid if not walk_like else (1,)):
                jobs.append((g, plan.dataset, q, eps, n_rep, plan.trials,
                             cell_seed(plan.seed, len(jobs)), exact))
    if plan.exact_cache:
        with open(plan.exact_cache, "w") as fh:
            json.dump(cache, fh, indent=1, sort_keys=True)
    workers = workers or int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_cell_job, jobs))
    else:
        rows = [_run_cell_job(j) for j in jobs]
    if plan.output:
        write_csv(rows, plan.output)
    return rows


def write_csv(rows, path_or_fh) -> None:
    own = isinstance(path_or_fh, (str, os.PathLike))
    fh = open(path_or_fh, "w", newline="") if own else path_or_fh
    try:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row.csv_dict())
    finally:
        if own:
            fh.close()


def compare_trees(g: Graph, pattern: Pattern, roots, eps: float = 1.0, trials: int = 10,
                  seed: int = 0, n_rep: int = 1, distinct: bool = True,
                  dataset: str = "", exact: int | None = None) -> list[ReportRow]:
    """Run the pattern mechanism under several root choices of one pattern."""
    if exact is None:
        try:
            exact = exact_count(g, pattern, distinct)
        except SizeGuardError:
            exact = None
    rows = []
    for idx, root in enumerate(roots):
        q = Query("pattern", pattern, root=root, distinct=distinct)
        t = q.tree()
        row = run_cell(g, dataset, q, eps, n_rep, trials, cell_seed(seed, idx), exact)
        row.extra = {"root": root, "sigma": t.sigma, "leaves": len(t.leaves),
                     "round_count": round_count(t)}
        rows.append(row)
    return rows

