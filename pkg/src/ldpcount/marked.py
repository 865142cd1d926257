"""Random-marking mechanisms for paths and general acyclic patterns, plus the
one-round k-star mechanism and n_rep averaging.

Every node draws a public mark in ``0..k`` that pins it to one pattern
position, so no node can appear twice in a counted instance. The analyzer
rescales by ``(k+1)^(k+1)``, the inverse probability that one fixed embedding
receives exactly the right marks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .estimate import Estimate, exact_or_float
from .graph import Graph
from .netsim import CommLedger, Transcript, broadcast, round_max
from .pattern import TreeForm, formulate_tree, parse_pattern
from .privacy import PrivacyAccountant, RunKeys, laplace


@dataclass(frozen=True)
class MarkedRunConfig:
    eps: float = 1.0
    n_rep: int = 1
    noiseless: bool = False
    distinct: bool = False
    fixed_marks: tuple[int, ...] | None = None
    seed: int = 0
    trial: int = 0

    def __post_init__(self):
        if self.n_rep < 1:
            raise ValueError("n_rep must be >= 1")
        if not self.noiseless and not self.eps > 0:
            raise ValueError(f"epsilon must be positive, got {self.eps}")


def draw_marks(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform marks in ``0..k``; depends only on the node count, never on edges."""
    return rng.integers(0, k + 1, size=n)


def _marks_for(g: Graph, k: int, cfg: MarkedRunConfig, keys: RunKeys) -> np.ndarray:
    if cfg.fixed_marks is not None:
        marks = np.asarray(cfg.fixed_marks, dtype=np.int64)
        if marks.shape != (g.n,) or marks.min(initial=0) < 0 or marks.max(initial=0) > k:
            raise ValueError(f"fixed marks must be {g.n} integers in 0..{k}")
        return marks
    return draw_marks(g.n, k, keys.stream(0, "marks"))


def _account_marking(g: Graph, ledger: CommLedger) -> None:
    ledger.marks("node_to_node", 2 * g.m)
    ledger.marks("node_to_analyzer", g.n)


def _indicator(mask: np.ndarray, exact: bool) -> np.ndarray:
    return mask.astype(object) if exact else mask.astype(np.float64)


def _edges_between(g: Graph, src_mask: np.ndarray, dst_mask: np.ndarray) -> int:
    """Directed edge count from ``src_mask`` nodes to ``dst_mask`` nodes."""
    return int(np.count_nonzero(src_mask[g.row_of_entry] & dst_mask[g.indices]))


def _rescale(total, k: int, divisor: int, exact: bool):
    factor = (k + 1) ** (k + 1)
    if exact:
        return exact_or_float(Fraction(int(total)) * factor / divisor)
    return float(total) * factor / divisor


def _path_once(g, k, eps, keys, marks, exact, ledger, acct, scope, transcript):
    n = g.n
    _account_marking(g, ledger)
    acct.charge(None, 1, eps, "parallel", scope)
    zero = np.zeros(n, dtype=object) if exact else np.zeros(n)
    prev = _indicator(marks == 0, exact)
    mx = 1.0
    for rnd in range(1, k):
        active = marks == rnd
        if rnd > 1:
            broadcast(mx, int(active.sum()), ledger)
        s = g.neighbor_sum(prev)
        if not exact:
            s = s + laplace(mx / eps, keys.stream(rnd), size=n)
        if rnd == k - 1:
            cnt = g.neighbor_sum(_indicator(marks == k, exact))
            if not exact:
                cnt = cnt + laplace(1.0 / eps, keys.stream(rnd, "degree"), size=n)
            s = s * cnt
        else:
            ledger.scalars("node_to_node", _edges_between(g, active, marks == rnd + 1))
        ledger.scalars("node_to_analyzer", int(active.sum()))
        prev = zero.copy()
        prev[active] = s[active]
        mx = round_max(s[active])
        if transcript is not None:
            transcript.publish(rnd, "path", np.flatnonzero(active), s[active], mx)
    return sum(prev[marks == k - 1])


def _pattern_once(g, t: TreeForm, eps, keys, marks, exact, ledger, acct, scope, transcript):
    n, k = g.n, t.k
    _account_marking(g, ledger)
    acct.charge(None, 1, eps, "parallel", scope)
    values: dict[int, np.ndarray] = {}
    maxima: dict[int, float] = {}
    for leaf in t.leaves:
        values[leaf] = _indicator(marks == leaf, exact)
        maxima[leaf] = 1.0
    for sub in t.internal:
        active = marks == sub
        n_active = int(active.sum())
        inner = [c for c in t.children[sub] if c not in t.leaves]
        if inner:
            broadcast([maxima[c] for c in inner], n_active, ledger)
        prod = None
        for c in t.children[sub]:
            y = g.neighbor_sum(values[c])
            if not exact:
                y = y + laplace(maxima[c] / eps, keys.stream(sub, "noise", c), size=n)
            prod = y if prod is None else prod * y
        out = np.zeros(n, dtype=object) if exact else np.zeros(n)
        out[active] = prod[active]
        values[sub] = out
        maxima[sub] = round_max(prod[active])
        if sub != k:
            ledger.scalars("node_to_node", _edges_between(g, active, marks == t.parent[sub]))
        ledger.scalars("node_to_analyzer", n_active)
        if transcript is not None:
            transcript.publish(sub, "pattern", np.flatnonzero(active), prod[active], maxima[sub])
    return sum(values[k][marks == k])


def _repeat(g, k, cfg: MarkedRunConfig, once, divisor: int, rounds: int, meta: dict,
            transcript: Transcript | None) -> Estimate:
    ledger, acct = CommLedger(), PrivacyAccountant()
    eps_run = cfg.eps / cfg.n_rep
    outs = []
    all_marks = []
    for rep in range(cfg.n_rep):
        keys = RunKeys(cfg.seed, cfg.trial, rep)
        marks = _marks_for(g, k, cfg, keys)
        if transcript is not None and rep == 0:
            transcript.marks = marks
        total = once(keys, marks, eps_run, ledger, acct, rep,
                     transcript if rep == 0 else None)
        outs.append(_rescale(total, k, divisor, cfg.noiseless))
        all_marks.append(marks)
    if cfg.noiseless:
        value = exact_or_float(sum(Fraction(o) for o in outs) / cfg.n_rep)
    else:
        value = float(np.mean(outs))
    meta = dict(meta, n_rep=cfg.n_rep, marks=all_marks, runs=outs)
    return Estimate(value, cfg.eps, rounds, ledger, acct, transcript=transcript, meta=meta)


def run_path(g: Graph, k: int, cfg: MarkedRunConfig,
             transcript: Transcript | None = None) -> Estimate:
    """k-round path mechanism (marking round plus k-1 aggregation rounds).

    The estimate targets oriented paths, or unoriented ones with ``distinct``.
    """
    if k < 2:
        raise ValueError(f"path mechanism needs k >= 2, got {k}")

    def once(keys, marks, eps, ledger, acct, scope, tr):
        return _path_once(g, k, eps, keys, marks, cfg.noiseless, ledger, acct, scope, tr)

    return _repeat(g, k, cfg, once, 2 if cfg.distinct else 1, k,
                   {"mech": "path", "k": k}, transcript)


def run_pattern(g: Graph, t: TreeForm, cfg: MarkedRunConfig,
                transcript: Transcript | None = None) -> Estimate:
    """Tree-pattern mechanism over the rounds fixed by the formulation ``t``.

    Without ``distinct`` the estimate counts embeddings (instances times
    sigma); with it, distinct instances.
    """

    def once(keys, marks, eps, ledger, acct, scope, tr):
        return _pattern_once(g, t, eps, keys, marks, cfg.noiseless, ledger, acct, scope, tr)

    rounds = t.k + 2 - len(t.leaves)
    return _repeat(g, t.k, cfg, once, t.sigma if cfg.distinct else 1, rounds,
                   {"mech": "pattern", "k": t.k, "sigma": t.sigma,
                    "pattern": str(t.pattern)}, transcript)


def run_star(g: Graph, k: int, cfg: MarkedRunConfig,
             transcript: Transcript | None = None) -> Estimate:
    """One-round k-star estimate from noisy degrees.

    Each node reports the falling factorial of ``d + Lap(2/eps)``. The
    estimate is biased for ``k >= 2`` because even Laplace moments do not
    vanish; only the high-probability error bound holds.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n
    ledger, acct = CommLedger(), PrivacyAccountant()
    outs = []
    for rep in range(cfg.n_rep):
        keys = RunKeys(cfg.seed, cfg.trial, rep)
        eps = cfg.eps / cfg.n_rep
        if cfg.noiseless:
            d = g.degrees.astype(object)
        else:
            d = g.degrees + laplace(2.0 / eps, keys.stream(1, "degree"), size=n)
        prod = np.ones(n, dtype=object) if cfg.noiseless else np.ones(n)
        for s in range(k):
            prod = prod * (d - s)
        acct.charge(None, 1, eps, "parallel", rep)
        ledger.scalars("node_to_analyzer", n)
        if transcript is not None and rep == 0:
            transcript.publish(1, "star", np.arange(n), prod)
        total = sum(prod)
        div = math.factorial(k) if cfg.distinct else 1
        outs.append(exact_or_float(Fraction(int(total), div)) if cfg.noiseless
                    else float(total) / div)
    value = (exact_or_float(sum(Fraction(o) for o in outs) / cfg.n_rep)
             if cfg.noiseless else float(np.mean(outs)))
    return Estimate(value, cfg.eps, 1, ledger, acct, transcript=transcript,
                    meta={"mech": "star", "k": k, "n_rep": cfg.n_rep})


def run_with_reps(g: Graph, target, cfg: MarkedRunConfig) -> Estimate:
    """Average ``cfg.n_rep`` runs at ``eps / n_rep`` each.

    ``target`` is a :class:`TreeForm`, or a ``("path", k)`` / ``("star", k)`` pair.
    """
    if isinstance(target, TreeForm):
        return run_pattern(g, target, cfg)
    kind, k = target
    if kind == "path":
        return run_path(g, k, cfg)
    if kind == "star":
        return run_star(g, k, cfg)
    raise ValueError(f"unknown target {target!r}")


def _pattern_gamma(n, k, eps, beta, paths: bool) -> float:
    inner = 12 * n / beta if paths else 12 * k * n / beta
    return (k + 1) * math.sqrt(8 * math.log(inner)) / eps


def marked_error_bound(n: int, max_degree: int, k: int, eps: float, beta: float,
                       paths: bool = True) -> float:
    """High-probability total error bound for the path (or tree) mechanism."""
    gamma = _pattern_gamma(n, k, eps, beta, paths)
    d_hat = max(max_degree, math.ceil(gamma ** 2))
    sampling = (k + 1) * math.sqrt(2 * n / beta) * (max_degree + k + 1) ** k
    noise = k * (k + 1) * gamma * math.sqrt(n) * (d_hat + gamma * math.sqrt(d_hat) + gamma) ** (k - 1)
    return sampling + noise


def trimmed_mean(values, order_by=None) -> tuple[float, bool]:
    """Drop the 2 highest and 2 lowest of exactly 10 runs and average the rest.

    Runs are ranked by ``order_by`` (e.g. their estimates) when given, else by
    the values themselves. Any other sample size falls back to the plain mean;
    the flag reports whether trimming was applied.
    """
    vals = [float(v) for v in values]
    if len(vals) != 10:
        return float(np.mean(vals)), False
    keys = vals if order_by is None else [float(o) for o in order_by]
    kept = [vals[i] for i in np.argsort(keys, kind="stable")[2:8]]
    return float(np.mean(kept)), True


@dataclass
class ErrorDecomposition:
    sampling_rel_err: float
    dp_rel_err: float
    total_rel_err: float
    trimmed: bool
    per_trial: list[tuple[float, float, float]]


def error_decompose(g: Graph, run, cfg, trials: int, exact: int) -> ErrorDecomposition:
    """Split relative error into marking (sampling) and Laplace (DP) parts.

    ``run(g, cfg)`` executes the mechanism; each trial reruns it noiseless
    with identical keys, hence identical marks.
    """
    if exact == 0:
        raise ValueError("relative error undefined for an exact count of 0")
    rows = []
    for trial in range(trials):
        c = replace(cfg, trial=trial)
        dp = float(run(g, c).value)
        clean = float(run(g, replace(c, noiseless=True)).value)
        rows.append((abs(clean - exact) / exact, abs(dp - clean) / exact, abs(dp - exact) / exact))
    cols = list(zip(*rows))
    s, trimmed = trimmed_mean(cols[0])
    d, _ = trimmed_mean(cols[1])
    tot, _ = trimmed_mean(cols[2])
    return ErrorDecomposition(s, d, tot, trimmed, rows)


def path_tree(k: int) -> TreeForm:
    """Linear formulation of ``path:k`` rooted at an endpoint."""
    return formulate_tree(parse_pattern(f"path:{k}"), root=k)
