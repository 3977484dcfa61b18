"""Synthetic benign/Sybil regions and attack-edge placement."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph, GraphError, ScenarioGraph, build_graph
from .seeding import derive_seed, rng as make_rng


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "ER" or "PA"
    node_count: int
    avg_degree: float = 10.0
    rng_seed: int = 0

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return replace(self, rng_seed=seed)

    def with_nodes(self, n: int) -> "GeneratorSpec":
        return replace(self, node_count=n)

    @property
    def attachment(self) -> int:
        return int(math.floor(self.avg_degree / 2 + 0.5))


def generate(spec: GeneratorSpec) -> Graph:
    kind = spec.kind.upper()
    if kind == "ER":
        return gen_er(spec)
    if kind == "PA":
        return gen_pa(spec)
    raise GraphError(f"unknown generator kind {spec.kind!r}")


def _decode_pairs(k: np.ndarray, n: int) -> np.ndarray:
    """Map linear indices of the strict upper triangle (row-major) to (i, j)."""
    k = np.asarray(k, dtype=np.int64)
    b = 2 * n - 1

    def row_start(i):
        return i * (b - i) // 2

    i = np.floor((b - np.sqrt(b * b - 8.0 * k)) / 2).astype(np.int64)
    # float rounding can land one row off either way
    i = np.where(row_start(i) > k, i - 1, i)
    i = np.where(row_start(i + 1) <= k, i + 1, i)
    return np.column_stack([i, k - row_start(i) + i + 1])


def gen_er(spec: GeneratorSpec) -> Graph:
    """G(n, p) with ``p = avg_degree / (n - 1)``."""
    n = spec.node_count
    if n < 2:
        return build_graph(max(n, 0), [])
    p = spec.avg_degree / (n - 1)
    if not 0 < p <= 1:
        raise GraphError(f"edge probability {p:.4g} outside (0, 1]")
    r = make_rng(spec.rng_seed)
    pairs = n * (n - 1) // 2
    # Binomial edge count, then a uniform subset of that size: same law as
    # independent coin flips per pair without materialising n^2 flips.
    k = int(r.binomial(pairs, p))
    chosen = r.choice(pairs, size=k, replace=False) if k else np.empty(0, dtype=np.int64)
    return build_graph(n, _decode_pairs(np.sort(chosen), n))


def gen_pa(spec: GeneratorSpec) -> Graph:
    """Preferential attachment grown from a (c+1)-clique, c = round(avg_degree / 2)."""
    n, c = spec.node_count, spec.attachment
    if c < 1:
        raise GraphError(f"attachment count {c} < 1 (avg_degree={spec.avg_degree})")
    if n <= c:
        raise GraphError(f"PA needs more than {c} nodes, got {n}")
    r = make_rng(spec.rng_seed)
    m_total = c * (c + 1) // 2 + (n - c - 1) * c
    edges = np.empty((m_total, 2), dtype=np.int64)
    pool = np.empty(2 * m_total, dtype=np.int64)  # each node once per incident edge

    e = 0
    for u in range(c + 1):
        for v in range(u + 1, c + 1):
            edges[e] = (u, v)
            e += 1
    pool[: 2 * e] = edges[:e].ravel()
    plen = 2 * e

    for t in range(c + 1, n):
        chosen: list[int] = []
        while len(chosen) < c:
            for x in pool[r.integers(0, plen, size=2 * c)]:
                x = int(x)
                if x not in chosen:
                    chosen.append(x)
                    if len(chosen) == c:
                        break
        for x in chosen:
            edges[e] = (x, t)
            pool[plen] = x
            pool[plen + 1] = t
            plen += 2
            e += 1
    return build_graph(n, edges)


def sample_cross_pairs(left: np.ndarray, right: np.ndarray, count: int,
                       r: np.random.Generator) -> np.ndarray:
    """``count`` distinct (l, r) pairs drawn uniformly from ``left x right``.

    Rejection sampling while the table is sparse; after 100*count draws the
    remaining pairs are enumerated explicitly.
    """
    nl, nr = len(left), len(right)
    total = nl * nr
    if count < 0 or count > total:
        raise GraphError(f"cannot place {count} cross edges between {nl} and {nr} nodes")
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    seen: dict[int, None] = {}
    attempts = 0
    cap = 100 * count
    while len(seen) < count and attempts < cap:
        batch = min(max(2 * (count - len(seen)), 16), cap - attempts)
        keys = r.integers(0, total, size=batch)
        attempts += batch
        for k in keys.tolist():
            if k not in seen:
                seen[k] = None
                if len(seen) == count:
                    break
    keys = np.fromiter(seen, dtype=np.int64, count=len(seen))
    if len(keys) < count:
        rest = np.setdiff1d(np.arange(total, dtype=np.int64), keys, assume_unique=True)
        extra = r.choice(rest, size=count - len(keys), replace=False)
        keys = np.concatenate([keys, extra])
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    return np.column_stack([left[keys // nr], right[keys % nr]])


def compose_regions(benign: Graph, sybil: Graph, attack_edge_count: int,
                    rng_seed: int) -> ScenarioGraph:
    """Disjoint union (Sybil ids shifted by ``benign.n``) plus random attack edges."""
    nb, ns = benign.node_count, sybil.node_count
    r = make_rng(rng_seed)
    attack = sample_cross_pairs(np.arange(nb), np.arange(nb, nb + ns), attack_edge_count, r)
    edges = np.concatenate([benign.edges, sybil.edges + nb, attack])
    graph = build_graph(nb + ns, edges)
    is_sybil = np.zeros(nb + ns, dtype=bool)
    is_sybil[nb:] = True
    return ScenarioGraph.from_regions(graph, is_sybil)


def gen_community_benign(k: int, community_spec: GeneratorSpec, inter_edges: int = 10,
                         rng_seed: int = 0) -> Graph:
    """``k`` PA communities; community i is joined to communities 0..i-1 by ``inter_edges`` random edges.

    Community i occupies ids ``[i*size, (i+1)*size)``; see :func:`community_membership`.
    """
    if k < 1:
        raise GraphError("need at least one community")
    size = community_spec.node_count
    r = make_rng(rng_seed)
    parts = []
    for i in range(k):
        g = generate(community_spec.with_seed(derive_seed(community_spec.rng_seed, i, "community")))
        parts.append(g.edges + i * size)
        if i > 0:
            parts.append(sample_cross_pairs(np.arange(i * size, (i + 1) * size),
                                            np.arange(0, i * size), inter_edges, r))
    return build_graph(k * size, np.concatenate(parts))


def community_membership(k: int, community_size: int) -> np.ndarray:
    return np.repeat(np.arange(k), community_size)


def duplicate_region_scenario(base: Graph, attack_edge_count: int, rng_seed: int) -> ScenarioGraph:
    """Use ``base`` as both regions, joined by random attack edges."""
    return compose_regions(base, base, attack_edge_count, rng_seed)
