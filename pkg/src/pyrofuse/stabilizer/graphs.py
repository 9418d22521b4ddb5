"""Labelled simple graphs, local complementation and LC-orbit equivalence."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import numpy as np

DEFAULT_LC_GUARD = 9


@dataclass(frozen=True, eq=False)
class GraphState:
    """Undirected simple graph over labelled qubits.

    ``adjacency[i, j]`` refers to ``labels[i]`` and ``labels[j]``. The matrix is
    copied and frozen on construction.
    """

    adjacency: np.ndarray
    labels: tuple

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if adj.shape[0] != len(self.labels):
            raise ValueError("one label per vertex required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("vertex labels must be unique")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if (adj != adj.T).any():
            raise ValueError("adjacency must be symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[Hashable, Hashable]], nodes: Sequence | None = None) -> GraphState:
        edges = list(edges)
        if nodes is None:
            seen: dict = {}
            for a, b in edges:
                seen.setdefault(a, None)
                seen.setdefault(b, None)
            nodes = list(seen)
        labels = tuple(nodes)
        pos = {v: i for i, v in enumerate(labels)}
        adj = np.zeros((len(labels), len(labels)), dtype=bool)
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at {a!r}")
            adj[pos[a], pos[b]] = adj[pos[b], pos[a]] = True
        return cls(adj, labels)

    @classmethod
    def empty(cls, nodes: Sequence) -> GraphState:
        return cls.from_edges([], nodes)

    @classmethod
    def complete(cls, nodes: Sequence) -> GraphState:
        return cls.from_edges(combinations(nodes, 2), nodes)

    @classmethod
    def path(cls, nodes: Sequence) -> GraphState:
        return cls.from_edges(zip(nodes, nodes[1:]), nodes)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, v: Hashable) -> int:
        return self.labels.index(v)

    def neighbors(self, v: Hashable) -> list:
        row = self.adjacency[self.index(v)]
        return [self.labels[j] for j in np.flatnonzero(row)]

    def has_edge(self, a: Hashable, b: Hashable) -> bool:
        return bool(self.adjacency[self.index(a), self.index(b)])

    def edges(self) -> list[tuple]:
        i, j = np.nonzero(np.triu(self.adjacency))
        return [(self.labels[a], self.labels[b]) for a, b in zip(i, j)]

    def edge_set(self) -> set[frozenset]:
        return {frozenset(e) for e in self.edges()}

    def local_complement(self, v: Hashable) -> GraphState:
        """Complement the subgraph induced on the neighbourhood of ``v``."""
        adj = self.adjacency.copy()
        nb = np.flatnonzero(adj[self.index(v)])
        block = adj[np.ix_(nb, nb)]
        block ^= True
        np.fill_diagonal(block, False)
        adj[np.ix_(nb, nb)] = block
        return GraphState(adj, self.labels)

    def isolate(self, v: Hashable) -> GraphState:
        """Drop every edge at ``v`` but keep the vertex."""
        adj = self.adjacency.copy()
        i = self.index(v)
        adj[i, :] = False
        adj[:, i] = False
        return GraphState(adj, self.labels)

    def subgraph(self, nodes: Sequence) -> GraphState:
        idx = [self.index(v) for v in nodes]
        return GraphState(self.adjacency[np.ix_(idx, idx)], tuple(nodes))

    def reordered(self, labels: Sequence) -> GraphState:
        if set(labels) != set(self.labels) or len(labels) != self.n:
            raise ValueError("reordering must use the same vertex set")
        return self.subgraph(labels)

    def components(self) -> list[tuple]:
        """Connected components as label tuples, in first-label order."""
        seen = np.zeros(self.n, dtype=bool)
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            comp = []
            queue = deque([start])
            seen[start] = True
            while queue:
                i = queue.popleft()
                comp.append(i)
                for j in np.flatnonzero(self.adjacency[i]):
                    if not seen[j]:
                        seen[j] = True
                        queue.append(j)
            out.append(tuple(self.labels[i] for i in sorted(comp)))
        return out

    def rows(self) -> tuple[int, ...]:
        """Adjacency rows packed as integer bit masks."""
        return tuple(sum(1 << int(j) for j in np.flatnonzero(row)) for row in self.adjacency)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphState) or set(self.labels) != set(other.labels):
            return NotImplemented if not isinstance(other, GraphState) else False
        return np.array_equal(self.adjacency, other.reordered(self.labels).adjacency)

    def __hash__(self):
        return hash((frozenset(self.labels), frozenset(self.edge_set())))

    def __repr__(self) -> str:
        return f"GraphState(labels={self.labels!r}, edges={self.edges()!r})"


def _local_complement_rows(rows: tuple[int, ...], v: int) -> tuple[int, ...]:
    nb = rows[v]
    if nb & (nb - 1) == 0:  # fewer than two neighbours
        return rows
    out = list(rows)
    u_mask = nb
    while u_mask:
        low = u_mask & -u_mask
        u = low.bit_length() - 1
        out[u] ^= nb & ~low
        u_mask ^= low
    return tuple(out)


def _partition(g: GraphState) -> set[frozenset]:
    return set(map(frozenset, g.components()))


def lc_orbit(g: GraphState, max_n: int = DEFAULT_LC_GUARD) -> set[tuple[int, ...]]:
    """Every labelled graph reachable from ``g`` by local complementations, as packed rows."""
    if g.n > max_n:
        raise ValueError(f"graph has {g.n} vertices, above the LC guard of {max_n}")
    start = g.rows()
    seen = {start}
    queue = deque([start])
    while queue:
        rows = queue.popleft()
        for v in range(g.n):
            nxt = _local_complement_rows(rows, v)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def lc_equivalent(g1: GraphState, g2: GraphState, max_n: int = DEFAULT_LC_GUARD) -> bool:
    """Whether ``g2`` lies in the local-complementation orbit of ``g1``.

    Both graphs must be on the same vertex labels. The orbit is searched
    breadth-first with early exit; ``max_n`` guards against blow-up.
    """
    if set(g1.labels) != set(g2.labels) or g1.n != g2.n:
        raise ValueError("graphs must share the same labelled vertex set")
    if g1.n > max_n:
        raise ValueError(f"graph has {g1.n} vertices, above the LC guard of {max_n}")
    g2 = g2.reordered(g1.labels)
    target = g2.rows()
    start = g1.rows()
    if start == target:
        return True
    # connected components are LC invariants
    if _partition(g1) != _partition(g2):
        return False
    seen = {start}
    queue = deque([start])
    while queue:
        rows = queue.popleft()
        for v in range(g1.n):
            nxt = _local_complement_rows(rows, v)
            if nxt == target:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def lc_equivalent_by_component(g1: GraphState, g2: GraphState, max_n: int = DEFAULT_LC_GUARD) -> bool:
    """LC equivalence decided component by component; only each component must fit the guard."""
    if set(g1.labels) != set(g2.labels) or g1.n != g2.n:
        raise ValueError("graphs must share the same labelled vertex set")
    if g1 == g2:
        return True
    if _partition(g1) != _partition(g2):
        return False
    for comp in g1.components():
        if not lc_equivalent(g1.subgraph(comp), g2.subgraph(comp), max_n=max_n):
            return False
    return True
