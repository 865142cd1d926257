"""Acyclic query patterns and their rooted, post-ordered tree formulations."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

MAX_PATTERN_EDGES = 10


class PatternError(ValueError):
    """Invalid pattern specification."""


@dataclass(frozen=True)
class Pattern:
    """Connected acyclic pattern on vertices ``0..k``.

    ``kind`` records how the pattern was requested (``walk``, ``path``,
    ``star`` or ``tree``). A ``walk:k`` pattern shares the path's edge
    template; walk semantics only matter to the walk mechanisms and oracles.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    kind: str = "tree"

    @property
    def k(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(self.vertex_count)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for v in adj:
            adj[v].sort()
        return adj

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def __str__(self) -> str:
        if self.kind in ("walk", "path", "star"):
            return f"{self.kind}:{self.k}"
        return ",".join(f"{a}-{b}" for a, b in self.edges)


def _validate(vertex_count: int, edges: list[tuple[int, int]]) -> None:
    seen = set()
    for a, b in edges:
        if a == b:
            raise PatternError(f"self-loop at vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise PatternError(f"duplicate edge {a}-{b}")
        seen.add(key)
    # union-find: any edge joining an existing component closes a cycle
    parent = list(range(vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            raise PatternError(f"cycle detected through edge {a}-{b}")
        parent[ra] = rb
    if len({find(v) for v in range(vertex_count)}) != 1:
        raise PatternError("pattern is disconnected")


def make_pattern(edges, kind: str = "tree") -> Pattern:
    edges = [(int(a), int(b)) for a, b in edges]
    if not edges:
        raise PatternError("pattern needs at least one edge")
    labels = sorted({v for e in edges for v in e})
    if labels != list(range(len(labels))):
        raise PatternError(f"vertex labels must be 0..k without gaps, got {labels}")
    if len(edges) > MAX_PATTERN_EDGES:
        raise PatternError(f"pattern has {len(edges)} edges; at most {MAX_PATTERN_EDGES} supported")
    _validate(len(labels), edges)
    return Pattern(len(labels), tuple(edges), kind)


_BUILTIN = re.compile(r"^\s*(walk|path|star)\s*:\s*(\d+)\s*$")


def parse_pattern(spec: str) -> Pattern:
    """Parse ``walk:k``, ``path:k``, ``star:k`` or an ``a-b,b-c`` edge list."""
    m = _BUILTIN.match(spec)
    if m:
        kind, k = m.group(1), int(m.group(2))
        if k < 1:
            raise PatternError(f"{kind} needs k >= 1")
        if k > MAX_PATTERN_EDGES:
            raise PatternError(f"k={k} exceeds the limit of {MAX_PATTERN_EDGES}")
        if kind == "star":
            return Pattern(k + 1, tuple((0, j) for j in range(1, k + 1)), "star")
        return Pattern(k + 1, tuple((i, i + 1) for i in range(k)), kind)
    edges = []
    for tok in spec.split(","):
        tok = tok.strip()
        parts = tok.split("-")
        if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
            raise PatternError(f"bad edge token {tok!r} in pattern {spec!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return make_pattern(edges)


@dataclass(frozen=True)
class TreeForm:
    """Rooted tree formulation with vertices renamed to post-order subscripts.

    Subscript ``k`` is the root and every child subscript is smaller than its
    parent's. ``order[v]`` maps an original pattern vertex to its subscript.
    """

    pattern: Pattern
    order: tuple[int, ...]
    parent: dict[int, int]
    children: dict[int, tuple[int, ...]]
    leaves: frozenset[int]
    subtree_edges: dict[int, int]
    sigma: int

    @property
    def k(self) -> int:
        return self.pattern.k

    @property
    def root(self) -> int:
        return self.k

    @property
    def internal(self) -> list[int]:
        """Non-leaf subscripts in evaluation order."""
        return [s for s in range(self.k + 1) if s not in self.leaves]

    def edges(self) -> list[tuple[int, int]]:
        """Tree edges as ``(child, parent)`` subscript pairs."""
        return sorted(self.parent.items())


def default_root(p: Pattern) -> int:
    return min(range(p.vertex_count), key=lambda v: (-p.degree(v), v))


def formulate_tree(p: Pattern, root: int | None = None) -> TreeForm:
    if root is None:
        root = default_root(p)
    if not 0 <= root < p.vertex_count:
        raise ValueError(f"root {root} out of range for a pattern with {p.vertex_count} vertices")
    adj = p.adjacency
    order: dict[int, int] = {}
    tree_parent: dict[int, int] = {}
    # iterative DFS; a vertex gets its subscript once all children are done
    stack = [(root, -1, iter(adj[root]))]
    while stack:
        v, par, it = stack[-1]
        for w in it:
            if w != par:
                tree_parent[w] = v
                stack.append((w, v, iter(adj[w])))
                break
        else:
            order[v] = len(order)
            stack.pop()
    sub = order
    parent = {sub[c]: sub[pv] for c, pv in tree_parent.items()}
    children: dict[int, list[int]] = {s: [] for s in range(p.vertex_count)}
    for c, pv in parent.items():
        children[pv].append(c)
    children_t = {s: tuple(sorted(cs)) for s, cs in children.items()}
    leaves = frozenset(s for s, cs in children_t.items() if not cs)
    subtree_edges: dict[int, int] = {}
    for s in range(p.vertex_count):
        subtree_edges[s] = sum(1 + subtree_edges[c] for c in children_t[s])
    return TreeForm(
        pattern=p,
        order=tuple(sub[v] for v in range(p.vertex_count)),
        parent=parent,
        children=children_t,
        leaves=leaves,
        subtree_edges=subtree_edges,
        sigma=automorphism_count(p),
    )


def round_count(t: TreeForm) -> int:
    """Rounds of the marked pattern protocol, marking round included."""
    return t.k + 2 - len(t.leaves)


def _centroids(p: Pattern) -> list[int]:
    n = p.vertex_count
    adj = p.adjacency
    size = [1] * n
    parent = [-1] * n
    seq = [0]
    for v in seq:
        for w in adj[v]:
            if w != parent[v]:
                parent[w] = v
                seq.append(w)
    for v in reversed(seq):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    best, out = n, []
    for v in range(n):
        heaviest = n - size[v]
        for w in adj[v]:
            if w != parent[v]:
                heaviest = max(heaviest, size[w])
        if heaviest < best:
            best, out = heaviest, [v]
        elif heaviest == best:
            out.append(v)
    return out


def _rooted(adj, v, par) -> tuple[str, int]:
    """Canonical AHU string and rooted automorphism count of the subtree at v."""
    codes = []
    sigma = 1
    for w in adj[v]:
        if w == par:
            continue
        code, s = _rooted(adj, w, v)
        codes.append(code)
        sigma *= s
    for mult in Counter(codes).values():
        sigma *= math.factorial(mult)
    return "(" + "".join(sorted(codes)) + ")", sigma


def automorphism_count(p: Pattern) -> int:
    """Number of edge-preserving vertex permutations of the pattern."""
    adj = p.adjacency
    cents = _centroids(p)
    if len(cents) == 1:
        return _rooted(adj, cents[0], -1)[1]
    a, b = cents
    code_a, sa = _rooted(adj, a, b)
    code_b, sb = _rooted(adj, b, a)
    return sa * sb * (2 if code_a == code_b else 1)
