"""One-round randomized-response baseline.

Each node perturbs its adjacency bits once; the analyzer unbiases every pair
and sums, over all ordered node tuples, the product of the estimators of the
tuple's distinct edges. Exact on expectation, but ``O(N^2)`` communication and
``O(N^(k+1))`` analyzer time, so it only runs on small graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .estimate import Estimate, exact_or_float
from .graph import Graph
from .netsim import CommLedger
from .oracle import SizeGuardError
from .pattern import Pattern, formulate_tree
from .privacy import PrivacyAccountant, RunKeys, keep_probability, rr_perturb, rr_unbias

N_MAX_RR = 4000
ENUM_LIMIT = 10**9


@dataclass(frozen=True)
class NoisyGraphEstimates:
    """Reported bits for pairs ``i < j`` and the matching unbiased estimators.

    ``eps = inf`` means no flips, so estimates equal the true adjacency.
    """

    n: int
    eps: float
    reported: np.ndarray  # (n, n) bool, upper triangle meaningful

    def estimate(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("no self-pairs")
        a, b = min(i, j), max(i, j)
        return float(rr_unbias(self.reported[a, b], self.eps))

    def matrix(self) -> np.ndarray:
        """Symmetric matrix of edge estimators with a zero diagonal."""
        upper = np.triu(self.reported, 1)
        bits = upper | upper.T
        out = rr_unbias(bits, self.eps)
        np.fill_diagonal(out, 0.0)
        return out


def build_noisy_graph(g: Graph, eps: float, keys: RunKeys,
                      ledger: CommLedger | None = None,
                      accountant: PrivacyAccountant | None = None) -> NoisyGraphEstimates:
    """Node ``i`` reports perturbed bits for every ``j > i`` in one message."""
    n = g.n
    if n > N_MAX_RR:
        raise SizeGuardError(f"RR baseline limited to N <= {N_MAX_RR}, got {n}")
    keep_probability(eps)  # validates eps
    adj = np.zeros((n, n), dtype=bool)
    e = g.edges()
    adj[e[:, 0], e[:, 1]] = True
    iu = np.triu_indices(n, 1)
    noisy = np.zeros((n, n), dtype=bool)
    # row-major upper triangle: node i's bits form one contiguous block
    noisy[iu] = rr_perturb(adj[iu], eps, keys.stream(0, "rr"))
    if ledger is not None:
        ledger.record_bits("node_to_analyzer", max(n - 1, 0), n * (n - 1) // 2)
    if accountant is not None:
        # each edge is reported once, by its smaller endpoint
        accountant.charge(None, 1, eps if math.isfinite(eps) else 0.0, "parallel")
    return NoisyGraphEstimates(n, eps, noisy)


@lru_cache(maxsize=32)
def _enumeration_plan(n: int, template: tuple[tuple[int, int], ...], size: int, walk: bool):
    """Valid ordered tuples and, per template edge, the pair index or -1 when
    the edge repeats an earlier one in the same tuple."""
    if n ** size > ENUM_LIMIT:
        raise SizeGuardError(f"RR enumeration over N^{size} = {n ** size:.3g} tuples exceeds {ENUM_LIMIT:.0e}")
    if n ** size > 5 * 10**7:
        raise SizeGuardError(f"RR enumeration plan of {n ** size:.3g} tuples does not fit in memory")
    tuples = np.stack(np.unravel_index(np.arange(n ** size, dtype=np.int64), (n,) * size), axis=1)
    return _plan_for(tuples, n, template, walk)


def _plan_for(tuples: np.ndarray, n: int, template, walk: bool):
    if walk:
        ok = np.all(tuples[:, :-1] != tuples[:, 1:], axis=1)
    else:
        srt = np.sort(tuples, axis=1)
        ok = np.all(srt[:, 1:] != srt[:, :-1], axis=1)
    tuples = tuples[ok]
    ids = []
    for a, b in template:
        u, v = tuples[:, a], tuples[:, b]
        ids.append(np.minimum(u, v) * n + np.maximum(u, v))
    ids = np.stack(ids, axis=1) if ids else np.empty((len(tuples), 0), np.int64)
    use = ids.copy()
    for e in range(1, ids.shape[1]):
        seen = np.any(ids[:, :e] == ids[:, [e]], axis=1)
        use[seen, e] = -1
    return tuples, use


def tuple_products(a_hat: np.ndarray, use: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-tuple estimator products and the number of factors each used."""
    flat = a_hat.ravel()
    factors = np.where(use >= 0, flat[np.maximum(use, 0)], 1.0)
    return np.prod(factors, axis=1), np.count_nonzero(use >= 0, axis=1)


def tuple_estimate(est: NoisyGraphEstimates, nodes, template, walk: bool = True) -> tuple[float, int]:
    """Estimator for one node tuple; also returns the factor count."""
    tuples = np.asarray([nodes], dtype=np.int64)
    _, use = _plan_for(tuples, est.n, tuple(template), walk)
    if use.shape[0] == 0:
        return 0.0, 0
    vals, used = tuple_products(est.matrix(), use)
    return float(vals[0]), int(used[0])


def _template(p: Pattern):
    if p.kind in ("walk", "path"):
        return tuple((i, i + 1) for i in range(p.k))
    return tuple(p.edges)


def _oriented_sum(est: NoisyGraphEstimates, p: Pattern, walk: bool):
    _, use = _enumeration_plan(est.n, _template(p), p.k + 1, walk)
    vals, _ = tuple_products(est.matrix(), use)
    total = vals.sum()
    if not math.isfinite(est.eps):
        return int(round(total))
    return float(total)


def rr_count(est: NoisyGraphEstimates, p: Pattern, mode: str = "oriented"):
    """Sum of tuple estimators for ``p``.

    ``oriented`` counts ordered tuples; ``distinct`` removes orientation or
    automorphism redundancy (for even walks via the symmetric-walk estimate).
    """
    if mode not in ("oriented", "distinct"):
        raise ValueError(f"unknown mode {mode!r}")
    walk = p.kind == "walk"
    total = _oriented_sum(est, p, walk)
    if mode == "oriented":
        return total
    exact = not math.isfinite(est.eps)
    if walk:
        s_hat = 0
        if p.k % 2 == 0:
            half = Pattern(p.k // 2 + 1, tuple((i, i + 1) for i in range(p.k // 2)), "walk")
            s_hat = _oriented_sum(est, half, True)
        return exact_or_float(Fraction(total + s_hat, 2)) if exact else (total + s_hat) / 2
    sigma = formulate_tree(p).sigma
    return exact_or_float(Fraction(total, sigma)) if exact else total / sigma


def run_rr(g: Graph, p: Pattern, eps: float, distinct: bool = False, seed: int = 0,
           trial: int = 0) -> Estimate:
    ledger, acct = CommLedger(), PrivacyAccountant()
    est = build_noisy_graph(g, eps, RunKeys(seed, trial), ledger, acct)
    value = rr_count(est, p, "distinct" if distinct else "oriented")
    return Estimate(value, eps, 1, ledger, acct, meta={"mech": "rr", "k": p.k})
