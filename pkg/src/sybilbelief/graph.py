"""Undirected simple graphs with dense integer node ids."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``edges`` is an ``(m, 2)`` int array with ``u < v`` on every row, rows
    sorted lexicographically. Adjacency is held in CSR form.

    Directed edges are numbered ``0..2m-1``: edge ``e < m`` runs
    ``edges[e, 0] -> edges[e, 1]`` and edge ``e + m`` is its reverse.
    """

    node_count: int
    edges: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        _check_node(self, v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def directed(self) -> tuple[np.ndarray, np.ndarray]:
        """Source and target arrays of the 2m directed edges."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        return np.concatenate([u, v]), np.concatenate([v, u])

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count == other.node_count
                and np.array_equal(self.edges, other.edges))

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges.tobytes()))


def _check_node(graph: Graph, v: int) -> None:
    if not 0 <= v < graph.node_count:
        raise GraphError(f"node {v} out of range for graph with {graph.node_count} nodes")


def build_graph(node_count: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a simple undirected graph, collapsing duplicate and reversed pairs.

    Raises :class:`GraphError` on self-loops or out-of-range endpoints.
    """
    if node_count < 0:
        raise GraphError("node_count must be nonnegative")
    arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if len(arr):
        if arr.min() < 0 or arr.max() >= node_count:
            bad = arr[(arr < 0) | (arr >= node_count)][0]
            raise GraphError(f"edge endpoint {bad} out of range for {node_count} nodes")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            raise GraphError(f"self-loop on node {arr[loops][0, 0]}")
    arr = np.sort(arr, axis=1)
    arr = np.unique(arr, axis=0) if len(arr) else np.empty((0, 2), dtype=np.int64)

    src = np.concatenate([arr[:, 0], arr[:, 1]])
    dst = np.concatenate([arr[:, 1], arr[:, 0]])
    order = np.lexsort((dst, src))
    indices = dst[order]
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=node_count), out=indptr[1:])
    for a in (arr, indices, indptr):
        a.setflags(write=False)
    return Graph(node_count, arr, indptr, indices)


def degree(graph: Graph, v: int) -> int:
    _check_node(graph, v)
    return int(graph.indptr[v + 1] - graph.indptr[v])


def load_edge_list(stream: IO[str]) -> Graph:
    """Parse a whitespace-separated edge list; ``#`` lines are comments.

    The node count is ``max id + 1``.
    """
    pairs = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        if len(tok) < 2:
            raise GraphError(f"line {lineno}: expected two node ids, got {s!r}")
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer node id in {s!r}") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: negative node id in {s!r}")
        pairs.append((u, v))
    n = max(max(p) for p in pairs) + 1 if pairs else 0
    if pairs:
        arr = np.array(pairs, dtype=np.int64)
        # Real datasets occasionally carry self-loops; they carry no trust signal.
        arr = arr[arr[:, 0] != arr[:, 1]]
    else:
        arr = np.empty((0, 2), dtype=np.int64)
    return build_graph(n, arr)


def write_edge_list(graph: Graph, stream: IO[str]) -> None:
    stream.write(f"# nodes {graph.node_count} edges {graph.m}\n")
    for u, v in graph.edges:
        stream.write(f"{u} {v}\n")


def connected_components(graph: Graph) -> np.ndarray:
    """Component label per node; labels are numbered in order of smallest member id."""
    if graph.node_count == 0:
        return np.empty(0, dtype=np.int64)
    mat = csr_matrix((np.ones(len(graph.indices)), graph.indices, graph.indptr),
                     shape=(graph.node_count, graph.node_count))
    _, raw = _cc(mat, directed=False)
    _, first = np.unique(raw, return_index=True)
    relabel = np.empty(len(first), dtype=np.int64)
    relabel[np.argsort(first)] = np.arange(len(first))
    return relabel[raw]


def induced_subgraph(graph: Graph, nodes: np.ndarray) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` (sorted), relabelled to ``0..k-1``.

    Returns the subgraph and the array mapping new id -> original id.
    """
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    remap = np.full(graph.node_count, -1, dtype=np.int64)
    remap[nodes] = np.arange(len(nodes))
    e = remap[graph.edges]
    e = e[(e >= 0).all(axis=1)]
    return build_graph(len(nodes), e), nodes


def largest_connected_component(graph: Graph) -> tuple[Graph, np.ndarray]:
    """Largest component with ids remapped; ties go to the component holding the smallest id."""
    if graph.node_count == 0:
        raise GraphError("empty graph has no components")
    comp = connected_components(graph)
    sizes = np.bincount(comp)
    # labels are ordered by smallest member, so argmax picks the tie winner
    best = int(np.argmax(sizes))
    return induced_subgraph(graph, np.flatnonzero(comp == best))


def is_connected(graph: Graph) -> bool:
    if graph.node_count == 0:
        return True
    return int(connected_components(graph).max()) == 0


@dataclass(frozen=True, eq=False)
class ScenarioGraph:
    """A graph split into a benign and a Sybil region.

    ``is_sybil[v]`` is the ground-truth region of ``v``; ``attack_edges`` holds
    the rows of ``graph.edges`` that cross the partition.
    """

    graph: Graph
    is_sybil: np.ndarray
    attack_edges: np.ndarray

    @classmethod
    def from_regions(cls, graph: Graph, is_sybil) -> "ScenarioGraph":
        is_sybil = np.asarray(is_sybil, dtype=bool)
        if is_sybil.shape != (graph.node_count,):
            raise GraphError("region map must cover every node")
        e = graph.edges
        attack = e[is_sybil[e[:, 0]] != is_sybil[e[:, 1]]]
        is_sybil.setflags(write=False)
        attack.setflags(write=False)
        return cls(graph, is_sybil, attack)

    @property
    def benign_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.is_sybil)

    @property
    def sybil_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.is_sybil)

    def attack_endpoints(self) -> np.ndarray:
        """Boolean mask of nodes incident to at least one attack edge."""
        mask = np.zeros(self.graph.node_count, dtype=bool)
        mask[self.attack_edges.ravel()] = True
        return mask
