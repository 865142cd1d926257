import itertools

import numpy as np
import pytest

import _brute
from ldpcount.graph import Graph, complete_graph, gen_erdos_renyi, path_graph, star_graph
from ldpcount.oracle import (SizeGuardError, embedding_count, exact_count, marked_pattern_count,
                             path_count_oriented, pattern_count, star_count, walk_count_oriented,
                             walk_count_unoriented)
from ldpcount.pattern import formulate_tree, parse_pattern

K3 = complete_graph(3)


def test_walk_examples():
    assert walk_count_oriented(K3, 2) == 12
    # the centre of 0-1-2 gives 1-0-1, 1-2-1, 0-1-2, 2-1-0, and the ends give
    # 0-1-0, 2-1-2: six sequences in all
    assert walk_count_oriented(path_graph(3), 2) == 6 == _brute.walks(path_graph(3), 2)
    assert walk_count_oriented(Graph.from_edges(4, []), 3) == 0


def test_unoriented_examples():
    assert walk_count_unoriented(K3, 2) == 9
    g = gen_erdos_renyi(7, 0.4, 2)
    assert walk_count_unoriented(g, 1) == g.m
    s3 = star_graph(3)
    assert walk_count_unoriented(s3, 2) == _brute.walks_unoriented(s3, 2)


def test_walk_guard():
    with pytest.raises(SizeGuardError):
        walk_count_oriented(K3, 31)
    with pytest.raises(ValueError):
        walk_count_oriented(K3, 0)


def test_walk_counts_exceed_int64():
    g = complete_graph(60)
    w = walk_count_oriented(g, 12)
    assert w == 60 * 59 ** 12 and w > 2**63


def test_path_examples():
    assert path_count_oriented(K3, 2) == 6
    assert path_count_oriented(path_graph(3), 2) == 2
    assert path_count_oriented(complete_graph(4), 3) == 24


def test_path_guard():
    g = gen_erdos_renyi(300, 0.5, 0)
    with pytest.raises(SizeGuardError):
        path_count_oriented(g, 6)


def test_pattern_examples():
    assert pattern_count(star_graph(3), parse_pattern("star:3")) == 1
    assert pattern_count(complete_graph(4), parse_pattern("path:3")) == 12
    assert pattern_count(K3, parse_pattern("path:2")) == 3


def test_star_examples():
    s3 = star_graph(3)
    assert star_count(s3, 3, "ordered") == 6
    assert star_count(s3, 3, "distinct") == 1
    k4 = complete_graph(4)
    assert star_count(k4, 2, "distinct") == 12
    assert star_count(k4, 2, "ordered") == 24


def test_marked_examples():
    t = formulate_tree(parse_pattern("path:3"))
    assert marked_pattern_count(complete_graph(5), t, np.zeros(5, dtype=np.int64)) == 0
    t2 = formulate_tree(parse_pattern("path:2"), root=2)
    assert marked_pattern_count(path_graph(3), t2, np.array([0, 1, 2])) == 1


def test_marked_matches_filtered_brute_force():
    g = gen_erdos_renyi(8, 0.5, 3)
    t = formulate_tree(parse_pattern("path:3"), root=3)
    marks = np.random.default_rng(11).integers(0, 4, g.n)
    # vertex v of the pattern carries subscript order[v]
    allowed = [set(np.flatnonzero(marks == t.order[v]).tolist()) for v in range(4)]
    want = _brute.embeddings(g, t.pattern.edges, 4, allowed)
    assert marked_pattern_count(g, t, marks) == want


def test_against_brute_force(small_graphs):
    for g in small_graphs:
        for k in range(1, 5):
            assert walk_count_oriented(g, k) == _brute.walks(g, k)
            assert walk_count_unoriented(g, k) == _brute.walks_unoriented(g, k)
            assert path_count_oriented(g, k) == _brute.paths(g, k)
            assert pattern_count(g, parse_pattern(f"path:{k}")) * 2 == path_count_oriented(g, k)
            if k >= 2:  # star:1 is an edge, with two automorphisms rather than 1!
                assert pattern_count(g, parse_pattern(f"star:{k}")) == star_count(g, k, "distinct")


@pytest.mark.parametrize("spec", ["path:2", "path:3", "star:3", "0-1,1-2,1-3"])
def test_exhaustive_mark_sum(spec):
    p = parse_pattern(spec)
    for seed in range(3):
        g = gen_erdos_renyi(5, 0.6, seed)
        for root in range(p.vertex_count):
            t = formulate_tree(p, root)
            total = sum(marked_pattern_count(g, t, np.array(m))
                        for m in itertools.product(range(p.k + 1), repeat=g.n))
            # nodes outside an embedding may carry any of the k+1 marks
            free = (p.k + 1) ** (g.n - p.k - 1)
            assert total == pattern_count(g, p) * t.sigma * free == embedding_count(g, t) * free


def test_exact_count_dispatch():
    g = gen_erdos_renyi(9, 0.5, 4)
    assert exact_count(g, parse_pattern("walk:3")) == walk_count_oriented(g, 3)
    assert exact_count(g, parse_pattern("walk:3"), distinct=True) == walk_count_unoriented(g, 3)
    assert exact_count(g, parse_pattern("path:3")) == path_count_oriented(g, 3)
    assert exact_count(g, parse_pattern("path:3"), distinct=True) == path_count_oriented(g, 3) // 2
    assert exact_count(g, parse_pattern("star:2")) == star_count(g, 2, "ordered")
