import math

import numpy as np
import pytest

from ldpcount.baseline_rr import (N_MAX_RR, build_noisy_graph, rr_count, run_rr,
                                  tuple_estimate)
from ldpcount.graph import Graph, complete_graph, gen_erdos_renyi, star_graph
from ldpcount.netsim import CommLedger
from ldpcount.oracle import SizeGuardError, pattern_count, walk_count_oriented
from ldpcount.pattern import parse_pattern
from ldpcount.privacy import RunKeys, rr_unbias

INF = math.inf


def _noisy(g, eps, seed=0):
    return build_noisy_graph(g, eps, RunKeys(seed))


def test_no_flip_examples():
    k3, k4 = complete_graph(3), complete_graph(4)
    assert rr_count(_noisy(k3, INF), parse_pattern("walk:2")) == 12
    assert rr_count(_noisy(k3, INF), parse_pattern("walk:2"), "distinct") == 9
    assert rr_count(_noisy(k4, INF), parse_pattern("path:3"), "distinct") == 12
    assert rr_count(_noisy(k4, INF), parse_pattern("star:3"), "distinct") == 4


def test_large_eps_estimates_near_adjacency():
    g = gen_erdos_renyi(30, 0.2, 1)
    est = _noisy(g, 50.0)
    adj = g.adjacency.toarray()
    assert np.all(np.abs(est.matrix() - adj) < 1e-3)
    assert est.estimate(3, 1) == est.estimate(1, 3)
    with pytest.raises(ValueError):
        est.estimate(2, 2)


def test_entries_take_two_values():
    est = _noisy(gen_erdos_renyi(20, 0.3, 0), 1.0)
    off = est.matrix()[~np.eye(20, dtype=bool)]
    assert set(np.round(off, 12)) <= {round(float(rr_unbias(0, 1.0)), 12),
                                      round(float(rr_unbias(1, 1.0)), 12)}


@pytest.mark.parametrize("a", [0, 1])
def test_pair_estimator_unbiased(a):
    g = Graph.from_edges(2, [(0, 1)] if a else [])
    vals = np.array([_noisy(g, 1.0, s).estimate(0, 1) for s in range(20_000)])
    assert abs(vals.mean() - a) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals))


def test_reporting_cost():
    g = gen_erdos_renyi(1000, 0.005, 0)
    led = CommLedger()
    build_noisy_graph(g, 1.0, RunKeys(0), led)
    assert led.total_bytes == led.bytes_node_to_analyzer == math.ceil(1000 * 999 / 2 / 8)


def test_size_guards():
    with pytest.raises(SizeGuardError):
        build_noisy_graph(Graph.from_edges(N_MAX_RR + 1, []), 1.0, RunKeys(0))
    with pytest.raises(SizeGuardError):
        rr_count(_noisy(gen_erdos_renyi(100, 0.1, 0), 1.0), parse_pattern("walk:4"))
    with pytest.raises(ValueError):
        rr_count(_noisy(complete_graph(3), 1.0), parse_pattern("walk:2"), "both")


def test_revisiting_walk_uses_edge_once():
    est = _noisy(complete_graph(4), 1.0, 3)
    template = ((0, 1), (1, 2), (2, 3))
    value, used = tuple_estimate(est, (0, 1, 0, 1), template)
    assert used == 1 and value == pytest.approx(est.estimate(0, 1))
    value, used = tuple_estimate(est, (0, 1, 2, 1), template)
    assert used == 2 and value == pytest.approx(est.estimate(0, 1) * est.estimate(1, 2))
    # a self-loop step is never a walk
    assert tuple_estimate(est, (0, 0, 1, 2), template) == (0.0, 0)


def test_pattern_no_flip_matches_oracle():
    g = gen_erdos_renyi(9, 0.5, 2)
    p = parse_pattern("0-1,1-2,1-3")
    assert rr_count(_noisy(g, INF), p, "distinct") == pattern_count(g, p)


def test_run_rr_accounting():
    g = gen_erdos_renyi(15, 0.3, 0)
    est = run_rr(g, parse_pattern("path:2"), 0.8)
    est.accountant.assert_total(0.8)
    assert est.rounds == 1


def test_walk_unbiased_small():
    g = gen_erdos_renyi(12, 0.3, 5)
    vals = np.array([run_rr(g, parse_pattern("walk:2"), 1.0, trial=t).value for t in range(3000)])
    assert abs(vals.mean() - walk_count_oriented(g, 2)) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals))
