"""Undirected simple graphs stored in CSR form.

Node ids are dense integers ``0..n-1``. Neighbor lists are sorted, so
adjacency tests are binary searches over ``indices[indptr[i]:indptr[i+1]]``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp


class GraphFormatError(ValueError):
    """Raised when an edge list cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    Attributes:
        n: number of nodes.
        indptr: CSR row pointer, length ``n + 1``.
        indices: concatenated sorted neighbor lists.
    """

    n: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from undirected pairs; drops self-loops and duplicates."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls._from_pairs(n, arr[:, 0], arr[:, 1])

    @classmethod
    def _from_pairs(cls, n: int, u: np.ndarray, v: np.ndarray) -> "Graph":
        if n < 0:
            raise ValueError("node count must be non-negative")
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("edge endpoint out of range")
        keep = u != v
        u, v = u[keep], v[keep]
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = np.unique(lo * max(n, 1) + hi)
        lo, hi = key // max(n, 1), key % max(n, 1)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int64))

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.setflags(write=False)
        return d

    @cached_property
    def adjacency(self) -> sp.csr_array:
        """Sparse 0/1 adjacency matrix (float64) for neighbor aggregation."""
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_array((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def row_of_entry(self) -> np.ndarray:
        """Source node for every CSR entry."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"node {i} out of range [0, {self.n})")

    def neighbors(self, i: int) -> list[int]:
        self._check(i)
        return self.indices[self.indptr[i] : self.indptr[i + 1]].tolist()

    def degree(self, i: int) -> int:
        self._check(i)
        return int(self.indptr[i + 1] - self.indptr[i])

    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def has_edge(self, i: int, j: int) -> bool:
        row = self.indices[self.indptr[i] : self.indptr[i + 1]]
        pos = np.searchsorted(row, j)
        return bool(pos < row.size and row[pos] == j)

    def edges(self) -> np.ndarray:
        """Array of shape (m, 2) with ``u < v`` per row, sorted."""
        src = self.row_of_entry
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask]], axis=1)

    def neighbor_sum(self, x: np.ndarray) -> np.ndarray:
        """Return ``y[i] = sum(x[j] for j in N(i))``.

        Object arrays (exact Python ints) are summed without conversion.
        """
        if x.dtype == object:
            gathered = x[self.indices]
            out = np.zeros(self.n, dtype=object)
            nz = self.degrees > 0
            if gathered.size:
                out[nz] = np.add.reduceat(gathered, self.indptr[:-1][nz])
            return out
        return self.adjacency @ x

    def to_edge_list(self) -> str:
        """Serialize so that reloading reproduces the same labels.

        Edges are grouped by their larger endpoint. A node with no smaller
        neighbour is announced with a self-loop line, which the loader drops
        while keeping the node, so first appearance follows label order.
        """
        lines = []
        for v in range(self.n):
            lower = [u for u in self.neighbors(v) if u < v]
            if not lower:
                lines.append(f"{v} {v}\n")
            lines.extend(f"{u} {v}\n" for u in lower)
        return "".join(lines)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def load_edge_list(source: TextIO | str) -> Graph:
    """Parse a SNAP-style whitespace separated edge list.

    Lines starting with ``#`` are comments. Node ids are compacted in order of
    first appearance; self-loops are dropped (their endpoint is still kept as a
    node) and duplicate or reversed edges merged.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    ids: dict[int, int] = {}
    us: list[int] = []
    vs: list[int] = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphFormatError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node id in {line!r}") from None
        if a < 0 or b < 0:
            raise GraphFormatError(f"line {lineno}: negative node id in {line!r}")
        us.append(ids.setdefault(a, len(ids)))
        vs.append(ids.setdefault(b, len(ids)))
    if not ids:
        raise GraphFormatError("empty edge list")
    return Graph._from_pairs(len(ids), np.array(us), np.array(vs))


def load_edge_file(path) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh)


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with every unordered pair drawn independently."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    us, vs = [], []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - i - 1) < p)
        if hits.size:
            us.append(np.full(hits.size, i, dtype=np.int64))
            vs.append(hits + i + 1)
    if not us:
        return Graph._from_pairs(n, np.empty(0, np.int64), np.empty(0, np.int64))
    return Graph._from_pairs(n, np.concatenate(us), np.concatenate(vs))


def gen_average_degree(n: int, avg_degree: float, seed: int) -> Graph:
    """G(n, p) with ``p`` chosen so the expected average degree is ``avg_degree``."""
    return gen_erdos_renyi(n, min(1.0, avg_degree / max(n - 1, 1)), seed)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(k: int) -> Graph:
    """Center 0 joined to leaves ``1..k``."""
    return Graph.from_edges(k + 1, [(0, j) for j in range(1, k + 1)])
