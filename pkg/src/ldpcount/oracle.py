"""Exact (non-private) reference counts.

Walk counts use the neighbor-sum recursion in exact integer arithmetic.
Path and tree-pattern counts enumerate injective embeddings of the pattern
by backtracking; the inner loop is compiled with numba.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .graph import Graph
from .pattern import Pattern, TreeForm, formulate_tree, parse_pattern

MAX_WALK_LENGTH = 30
DEFAULT_WORK_LIMIT = 10**9


class SizeGuardError(RuntimeError):
    """Exact enumeration would exceed the configured work limit."""


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > MAX_WALK_LENGTH:
        raise SizeGuardError(f"k={k} exceeds the supported maximum of {MAX_WALK_LENGTH}")


def walk_vectors(g: Graph, k: int) -> list[np.ndarray]:
    """Exact per-node counts of l-line walks ending at each node, l = 0..k."""
    x = np.ones(g.n, dtype=object)
    out = [x]
    for _ in range(k):
        x = g.neighbor_sum(x)
        out.append(x)
    return out


def walk_count_oriented(g: Graph, k: int) -> int:
    """Number of node sequences (v_0..v_k) whose consecutive pairs are edges."""
    _check_k(k)
    return int(sum(walk_vectors(g, k)[-1]))


def symmetric_walk_count(g: Graph, k: int) -> int:
    """Walks equal to their own reversal; zero for odd k."""
    _check_k(k)
    return 0 if k % 2 else walk_count_oriented(g, k // 2)


def walk_count_unoriented(g: Graph, k: int) -> int:
    """Walks counted once per reversal pair."""
    w = walk_count_oriented(g, k)
    total = w + symmetric_walk_count(g, k)
    assert total % 2 == 0
    return total // 2


@njit(cache=True)
def _count_embeddings(indptr, indices, n, parent_pos, pos_label, marks, use_marks):
    size = parent_pos.size
    assign = np.empty(size, np.int64)
    ptr = np.empty(size, np.int64)
    end = np.empty(size, np.int64)
    total = 0
    for root in range(n):
        if use_marks and marks[root] != pos_label[0]:
            continue
        if size == 1:
            total += 1
            continue
        assign[0] = root
        level = 1
        p = assign[parent_pos[1]]
        ptr[1] = indptr[p]
        end[1] = indptr[p + 1]
        while level >= 1:
            if level == size - 1:
                # last vertex: count admissible candidates instead of descending
                p = assign[parent_pos[level]]
                for e in range(indptr[p], indptr[p + 1]):
                    v = indices[e]
                    if use_marks and marks[v] != pos_label[level]:
                        continue
                    fresh = True
                    for t in range(level):
                        if assign[t] == v:
                            fresh = False
                            break
                    if fresh:
                        total += 1
                level -= 1
                continue
            if ptr[level] < end[level]:
                v = indices[ptr[level]]
                ptr[level] += 1
                if use_marks and marks[v] != pos_label[level]:
                    continue
                fresh = True
                for t in range(level):
                    if assign[t] == v:
                        fresh = False
                        break
                if not fresh:
                    continue
                assign[level] = v
                level += 1
                p = assign[parent_pos[level]]
                ptr[level] = indptr[p]
                end[level] = indptr[p + 1]
            else:
                level -= 1
    return total


def _embedding_plan(t: TreeForm):
    # assignment position pos holds subscript k - pos, so parents come first
    k = t.k
    pos_label = np.array([k - pos for pos in range(k + 1)], dtype=np.int64)
    parent_pos = np.full(k + 1, -1, dtype=np.int64)
    for child, par in t.parent.items():
        parent_pos[k - child] = k - par
    return parent_pos, pos_label


def _guard(g: Graph, k: int, limit: float) -> None:
    work = g.n * float(max(g.max_degree(), 1)) ** k
    if work > limit:
        raise SizeGuardError(
            f"exact enumeration needs ~{work:.3g} steps (N*d(G)^k) > limit {limit:.3g}; "
            "use a private mechanism or supply an exact count")


def embedding_count(g: Graph, t: TreeForm, marks=None, limit: float = DEFAULT_WORK_LIMIT) -> int:
    """Injective edge-preserving maps of the pattern into ``g``.

    With ``marks``, the node mapped to subscript ``l`` must carry mark ``l``.
    """
    if marks is None:
        _guard(g, t.k, limit)
        mk = np.zeros(1, dtype=np.int64)
        use = False
    else:
        mk = np.asarray(marks, dtype=np.int64)
        if mk.shape != (g.n,):
            raise ValueError("mark vector length must equal the node count")
        use = True
    parent_pos, pos_label = _embedding_plan(t)
    return int(_count_embeddings(g.indptr, g.indices, g.n, parent_pos, pos_label, mk, use))


def path_count_oriented(g: Graph, k: int, limit: float = DEFAULT_WORK_LIMIT) -> int:
    """Sequences of k+1 distinct nodes joined by edges (both orientations)."""
    _check_k(k)
    t = formulate_tree(parse_pattern(f"path:{k}"), root=k)
    return embedding_count(g, t, limit=limit)


def pattern_count(g: Graph, p: Pattern, limit: float = DEFAULT_WORK_LIMIT) -> int:
    """Distinct subgraph instances of the pattern."""
    t = formulate_tree(p)
    emb = embedding_count(g, t, limit=limit)
    q, rem = divmod(emb, t.sigma)
    assert rem == 0, f"{emb} embeddings not divisible by sigma={t.sigma}"
    return q


def star_count(g: Graph, k: int, mode: str = "distinct") -> int:
    """k-stars: ordered sums falling factorials, distinct sums binomials."""
    if k < 1:
        raise ValueError("k must be >= 1")
    degs = g.degrees.tolist()
    if mode == "ordered":
        return sum(math.perm(d, k) for d in degs)
    if mode == "distinct":
        return sum(math.comb(d, k) for d in degs)
    raise ValueError(f"unknown star mode {mode!r}")


def marked_pattern_count(g: Graph, t: TreeForm, marks) -> int:
    """Embeddings whose node at subscript ``l`` is marked ``l``."""
    marks = np.asarray(marks, dtype=np.int64)
    if marks.size and (marks.min() < 0 or marks.max() > t.k):
        raise ValueError(f"marks must lie in 0..{t.k}")
    return embedding_count(g, t, marks=marks)


def exact_count(g: Graph, p: Pattern, distinct: bool = False,
                limit: float = DEFAULT_WORK_LIMIT) -> int:
    """Reference count matching what a mechanism for ``p`` estimates."""
    if p.kind == "walk":
        return walk_count_unoriented(g, p.k) if distinct else walk_count_oriented(g, p.k)
    if p.kind == "star":
        return star_count(g, p.k, "distinct" if distinct else "ordered")
    if p.kind == "path":
        oriented = path_count_oriented(g, p.k, limit=limit)
        return oriented // 2 if distinct else oriented
    q = pattern_count(g, p, limit=limit)
    return q if distinct else q * formulate_tree(p).sigma
