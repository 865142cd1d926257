"""Multi-round edge-LDP k-line walk counting.

Both variants start from ``X0 = 1`` and let each node add up its neighbors'
previous-round values, perturbed with Laplace noise scaled by the public
round maximum. The basic variant runs k rounds and publishes every value to
all parties. The optimized variant stops after k-1 rounds: the last round
multiplies by a noisy degree, values travel only along edges, and the
analyzer broadcasts the maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .estimate import Estimate, exact_or_float
from .graph import Graph
from .netsim import CommLedger, Transcript, broadcast, round_max
from .privacy import PrivacyAccountant, RunKeys, laplace


@dataclass(frozen=True)
class WalkRunConfig:
    k: int
    eps: float = 1.0
    noiseless: bool = False
    unoriented: bool = False
    seed: int = 0
    trial: int = 0

    def validate(self, min_k: int) -> None:
        if self.k < min_k:
            raise ValueError(f"walk length k must be >= {min_k}, got {self.k}")
        if not self.noiseless and not self.eps > 0:
            raise ValueError(f"epsilon must be positive, got {self.eps}")


def _start(g: Graph, noiseless: bool) -> np.ndarray:
    return np.ones(g.n, dtype=object) if noiseless else np.ones(g.n)


def _finish(total, s_hat, cfg: WalkRunConfig):
    if not cfg.unoriented:
        return exact_or_float(total) if cfg.noiseless else float(total)
    if cfg.k % 2:
        out = Fraction(total) / 2 if cfg.noiseless else total / 2
    else:
        assert s_hat is not None, "even k needs the symmetric-walk estimate"
        out = (Fraction(total) + s_hat) / 2 if cfg.noiseless else (total + s_hat) / 2
    return exact_or_float(out) if cfg.noiseless else float(out)


def run_walk_basic(g: Graph, cfg: WalkRunConfig, transcript: Transcript | None = None) -> Estimate:
    """k-round mechanism with all-to-all publication of each round's values."""
    cfg.validate(1)
    k, n = cfg.k, g.n
    keys = RunKeys(cfg.seed, cfg.trial)
    ledger, acct = CommLedger(), PrivacyAccountant()
    x = _start(g, cfg.noiseless)
    mx = 1.0
    s_hat = None
    for rnd in range(1, k + 1):
        x = g.neighbor_sum(x)
        if not cfg.noiseless:
            x = x + laplace(2 * k * mx / cfg.eps, keys.stream(rnd), size=n)
        acct.charge(None, rnd, cfg.eps / k, "basic")
        if rnd < k:
            ledger.scalars("node_to_node", n * (n - 1))
        ledger.scalars("node_to_analyzer", n)
        mx = round_max(x)
        if transcript is not None:
            transcript.publish(rnd, "walk", np.arange(n), x, mx)
        if cfg.unoriented and k % 2 == 0 and rnd == k // 2:
            s_hat = sum(x)
    return Estimate(_finish(sum(x), s_hat, cfg), cfg.eps, k, ledger, acct,
                    transcript=transcript, meta={"mech": "walk-basic", "k": k})


def run_walk_opt(g: Graph, cfg: WalkRunConfig, transcript: Transcript | None = None) -> Estimate:
    """(k-1)-round mechanism: neighbor-only messages, analyzer-side maxima."""
    cfg.validate(2)
    k, n = cfg.k, g.n
    keys = RunKeys(cfg.seed, cfg.trial)
    ledger, acct = CommLedger(), PrivacyAccountant()
    x = _start(g, cfg.noiseless)
    mx = 1.0  # known from initialization; no broadcast for round 1
    s_hat = None
    last = k - 1
    for rnd in range(1, last + 1):
        if rnd > 1:
            broadcast(mx, n, ledger)
        x = g.neighbor_sum(x)
        if not cfg.noiseless:
            x = x + laplace(2 * k * mx / cfg.eps, keys.stream(rnd), size=n)
        acct.charge(None, rnd, cfg.eps / k, "basic")
        if cfg.unoriented and k % 2 == 0 and rnd == k // 2:
            s_hat = sum(x)
        if rnd < last:
            mx = round_max(x)
            ledger.scalars("node_to_node", 2 * g.m)
            ledger.scalars("node_to_analyzer", n)
            if transcript is not None:
                transcript.publish(rnd, "walk", np.arange(n), x, mx)
            continue
        deg = g.degrees.astype(object) if cfg.noiseless else g.degrees.astype(np.float64)
        if not cfg.noiseless:
            deg = deg + laplace(2 * k / cfg.eps, keys.stream(rnd, "degree"), size=n)
        acct.charge(None, rnd, cfg.eps / k, "basic")
        if rnd == k // 2 and s_hat is not None:
            # k = 2: the pre-multiplication value is shipped for the symmetric estimate
            ledger.scalars("node_to_analyzer", n)
            if transcript is not None:
                transcript.publish(rnd, "walk-pre", np.arange(n), x)
        x = x * deg
        ledger.scalars("node_to_analyzer", n)
        if transcript is not None:
            transcript.publish(rnd, "walk-final", np.arange(n), x)
    return Estimate(_finish(sum(x), s_hat, cfg), cfg.eps, last, ledger, acct,
                    transcript=transcript, meta={"mech": "walk-opt", "k": k})


def run_walk_unoriented(g: Graph, cfg: WalkRunConfig, variant: str = "opt",
                        transcript: Transcript | None = None) -> Estimate:
    """Walks counted once per reversal pair; even k adds the symmetric-walk estimate."""
    cfg = WalkRunConfig(cfg.k, cfg.eps, cfg.noiseless, True, cfg.seed, cfg.trial)
    run = run_walk_opt if variant == "opt" else run_walk_basic
    return run(g, cfg, transcript)


def walk_gamma(n: int, k: int, eps: float, beta: float) -> float:
    return 2 * k * math.sqrt(8 * math.log(2 * k * n / beta)) / eps


def walk_error_bound(n: int, max_degree: int, k: int, eps: float, beta: float) -> float:
    """Additive error exceeded with probability at most ``beta`` (oriented count)."""
    gamma = walk_gamma(n, k, eps, beta)
    return k * gamma * math.sqrt(n) * (max_degree + gamma) ** (k - 1)
