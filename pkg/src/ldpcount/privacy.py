"""Noise primitives, randomized response and per-node privacy accounting.

Randomness is derived from value keys rather than shared generator state: the
same ``(seed, trial, party, round)`` key always reproduces the same stream,
so trials can run in any order or in parallel.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

ANALYZER = -1

# stream purposes, kept distinct so e.g. marks never share draws with noise
_PURPOSE = {"noise": 0, "marks": 1, "rr": 2, "degree": 3, "aux": 4}


def rng_stream(seed: int, trial: int = 0, node: int = ANALYZER, rnd: int = 0,
               purpose: str = "noise") -> np.random.Generator:
    """Generator keyed by ``(seed, trial, node, round, purpose)``."""
    ss = np.random.SeedSequence(
        entropy=seed, spawn_key=(trial, node + 1, rnd, _PURPOSE[purpose]))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class RunKeys:
    """Key prefix of one mechanism run: master seed, trial and repetition.

    ``stream(rnd, ...)`` is shared by all nodes of a round and node ``i``
    reads draw ``i``; that is a counter-based per-node stream (key = round,
    counter = node), drawn for the whole round in one vectorised call.
    """

    seed: int
    trial: int = 0
    rep: int = 0

    def stream(self, rnd: int, purpose: str = "noise", sub: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=self.seed,
            spawn_key=(self.trial, self.rep, rnd, _PURPOSE[purpose], sub))
        return np.random.Generator(np.random.Philox(ss))

    def with_rep(self, rep: int) -> "RunKeys":
        return RunKeys(self.seed, self.trial, rep)


_HALF_OPEN = 0.5 - 2.0 ** -54


def laplace(scale, rng: np.random.Generator, size=None):
    """Zero-mean Laplace draws by inverse CDF.

    ``scale`` may be a scalar or an array (broadcast against ``size``). A
    scale of exactly zero yields exactly zero.
    """
    scale_arr = np.asarray(scale, dtype=np.float64)
    if np.any(scale_arr < 0):
        raise ValueError("Laplace scale must be non-negative")
    shape = size if size is not None else scale_arr.shape
    u = rng.random(shape) - 0.5
    a = np.minimum(np.abs(u), _HALF_OPEN)
    out = -scale_arr * np.sign(u) * np.log1p(-2.0 * a)
    if np.ndim(out) == 0:
        return float(out)
    out[np.broadcast_to(scale_arr == 0, out.shape)] = 0.0
    return out


def keep_probability(eps: float) -> float:
    """RR probability of reporting the true bit, ``e^eps / (e^eps + 1)``."""
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if math.isinf(eps):
        return 1.0
    return 1.0 / (1.0 + math.exp(-eps))


def rr_perturb(bits, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ``1 / (e^eps + 1)``."""
    p = keep_probability(eps)
    bits = np.asarray(bits, dtype=bool)
    if p == 1.0:
        return bits.copy()
    return bits ^ (rng.random(bits.shape) >= p)


def rr_unbias(bit, eps: float):
    """Unbiased edge estimator ``(bit - q) / (p - q)``."""
    p = keep_probability(eps)
    q = 1.0 - p
    return (np.asarray(bit, dtype=np.float64) - q) / (p - q)


class PrivacyViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Charge:
    node: int | None  # None: the same charge on every node
    rnd: int
    eps: float
    composition: str
    scope: int


@dataclass
class PrivacyAccountant:
    """Per-node ledger of edge-level privacy loss.

    Every charge is the loss an edge incident to ``node`` suffers through the
    node's release, both endpoints included. Within a scope, ``basic`` charges
    add up while ``parallel`` charges count once at their maximum (each edge
    feeds at most one of them). Scopes compose by addition; n_rep repetitions
    use one scope per run.
    """

    charges: list[Charge] = field(default_factory=list)

    def charge(self, node: int | None, rnd: int, eps: float,
               composition: str = "basic", scope: int = 0) -> None:
        if eps < 0:
            raise ValueError("epsilon charge must be non-negative")
        if composition not in ("basic", "parallel"):
            raise ValueError(f"unknown composition {composition!r}")
        self.charges.append(Charge(node, rnd, float(eps), composition, scope))

    def _totals(self) -> dict:
        basic = defaultdict(float)
        par = defaultdict(float)
        for c in self.charges:
            key = (c.node, c.scope)
            if c.composition == "basic":
                basic[key] += c.eps
            else:
                par[key] = max(par[key], c.eps)
        totals = defaultdict(float)
        for key in set(basic) | set(par):
            totals[key[0]] += basic[key] + par[key]
        shared = totals.pop(None, 0.0)
        out = {node: v + shared for node, v in totals.items()}
        out[None] = shared
        return out

    def total(self, node: int) -> float:
        totals = self._totals()
        return totals.get(node, totals[None])

    def assert_total(self, eps_total: float, rel_tol: float = 1e-9) -> None:
        for node, spent in self._totals().items():
            if spent > eps_total * (1 + rel_tol):
                rounds = sorted({c.rnd for c in self.charges
                                 if c.node == node or c.node is None})
                who = "every node" if node is None else f"node {node}"
                raise PrivacyViolation(
                    f"{who} spent eps={spent:.6g} > {eps_total:.6g} in rounds {rounds}")
