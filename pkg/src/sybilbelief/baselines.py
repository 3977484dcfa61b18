"""Random-walk ranking baselines: SybilRank, CIA, and a random scorer."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .graph import Graph, ScenarioGraph
from .labels import LabelError, LabelSet
from .seeding import rng as make_rng


@dataclass(eq=False)
class ScoreVector:
    """Reputation per node; higher means more likely benign."""

    scores: np.ndarray
    provenance: str
    iterations: int = 0
    converged: bool = True


def _graph(scenario) -> Graph:
    return scenario.graph if isinstance(scenario, ScenarioGraph) else scenario


def walk_transpose(graph: Graph) -> csr_matrix:
    """Sparse ``W^T`` for the simple random walk; degree-0 nodes keep their mass."""
    n = graph.node_count
    deg = graph.degrees.astype(float)
    src, dst = graph.directed()
    iso = np.flatnonzero(deg == 0)
    rows = np.concatenate([dst, iso])
    cols = np.concatenate([src, iso])
    vals = np.concatenate([1.0 / deg[src], np.ones(len(iso))])
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def sybilrank(scenario, benign_labels: LabelSet, iterations: int | None = None,
              log_base: float = 2.0) -> ScoreVector:
    """Early-terminated walk from the benign seeds, scored by mass over degree.

    Runs ``ceil(log_base(n))`` steps unless ``iterations`` is given.
    """
    graph = _graph(scenario)
    if len(benign_labels) == 0:
        raise LabelError("SybilRank needs at least one benign label")
    if benign_labels.sybil.any():
        raise LabelError("SybilRank only accepts benign labels")
    n = graph.node_count
    if iterations is None:
        iterations = max(1, math.ceil(math.log(n) / math.log(log_base))) if n > 1 else 1
    p = np.zeros(n)
    p[benign_labels.nodes] = 1.0 / len(benign_labels)
    wt = walk_transpose(graph)
    for _ in range(iterations):
        p = wt @ p
    deg = graph.degrees
    score = np.zeros(n)
    nz = deg > 0
    score[nz] = p[nz] / deg[nz]
    return ScoreVector(score, "SybilRank", iterations, True)


def cia(scenario, sybil_labels: LabelSet, alpha: float = 0.85, tol: float = 1e-6,
        max_iters: int = 1000) -> ScoreVector:
    """Random walk with restart to the Sybil seeds; reputation is ``1 - p``.

    Iterates ``p <- (1 - alpha) r + alpha W^T p`` from ``p = r`` until the L1
    change is below ``tol``.
    """
    graph = _graph(scenario)
    if len(sybil_labels) == 0:
        raise LabelError("CIA needs at least one Sybil label")
    if not sybil_labels.sybil.all():
        raise LabelError("CIA only accepts Sybil labels")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    n = graph.node_count
    r = np.zeros(n)
    r[sybil_labels.nodes] = 1.0 / len(sybil_labels)
    wt = walk_transpose(graph)
    p = r.copy()
    converged = False
    it = 0
    while it < max_iters:
        nxt = (1.0 - alpha) * r + alpha * (wt @ p)
        it += 1
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta < tol:
            converged = True
            break
    return ScoreVector(1.0 - p, "CIA", it, converged)


def cia_residual(scenario, sybil_labels: LabelSet, scores: ScoreVector, alpha: float = 0.85) -> float:
    """L1 residual of the restart fixed point for a CIA result."""
    graph = _graph(scenario)
    r = np.zeros(graph.node_count)
    r[sybil_labels.nodes] = 1.0 / len(sybil_labels)
    p = 1.0 - scores.scores
    return float(np.abs(p - (1 - alpha) * r - alpha * (walk_transpose(graph) @ p)).sum())


def random_rank(scenario, rng_seed: int = 0) -> ScoreVector:
    n = _graph(scenario).node_count
    return ScoreVector(make_rng(rng_seed).random(n), "Random")
