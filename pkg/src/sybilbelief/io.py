"""Plain-text file formats for scenarios, labels, beliefs and scores."""

from __future__ import annotations

from pathlib import Path
from typing import IO

import numpy as np

from .baselines import ScoreVector
from .graph import GraphError, ScenarioGraph, build_graph, load_edge_list, write_edge_list
from .labels import LabelError, LabelSet
from .mrf import Beliefs

EDGES = "edges.txt"
REGIONS = "regions.txt"
ATTACK = "attack_edges.txt"
LABELS = "labels.txt"


def _rows(stream: IO[str]):
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if s and not s.startswith("#"):
            yield lineno, s.split()


def write_scenario(scenario: ScenarioGraph, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / EDGES, "w") as f:
        write_edge_list(scenario.graph, f)
    with open(d / REGIONS, "w") as f:
        for v, s in enumerate(scenario.is_sybil):
            f.write(f"{v} {'S' if s else 'B'}\n")
    with open(d / ATTACK, "w") as f:
        f.write(f"# attack edges {len(scenario.attack_edges)}\n")
        for u, v in scenario.attack_edges:
            f.write(f"{u} {v}\n")


def read_scenario(directory) -> ScenarioGraph:
    d = Path(directory)
    with open(d / REGIONS) as f:
        regions = {}
        for lineno, tok in _rows(f):
            if len(tok) != 2 or tok[1] not in ("B", "S"):
                raise GraphError(f"{REGIONS} line {lineno}: expected 'node B|S'")
            regions[int(tok[0])] = tok[1] == "S"
    n = len(regions)
    if sorted(regions) != list(range(n)):
        raise GraphError(f"{REGIONS} must list every node 0..n-1 exactly once")
    with open(d / EDGES) as f:
        g = load_edge_list(f)
    if g.node_count > n:
        raise GraphError("edge list references nodes missing from the region map")
    graph = build_graph(n, g.edges)
    scenario = ScenarioGraph.from_regions(graph, [regions[v] for v in range(n)])
    if (d / ATTACK).exists():
        with open(d / ATTACK) as f:
            listed = {tuple(sorted((int(t[0]), int(t[1])))) for _, t in _rows(f)}
        found = {(int(u), int(v)) for u, v in scenario.attack_edges}
        if listed != found:
            raise GraphError("attack-edge file disagrees with the region map")
    return scenario


def write_labels(labels: LabelSet, stream: IO[str]) -> None:
    for v, s, z in zip(labels.nodes, labels.sybil, labels.noisy):
        stream.write(f"{v} {'S' if s else 'B'} {int(z)}\n")


def read_labels(stream: IO[str]) -> LabelSet:
    nodes, tags, noisy = [], [], []
    for lineno, tok in _rows(stream):
        if len(tok) not in (2, 3) or tok[1] not in ("B", "S"):
            raise LabelError(f"line {lineno}: expected 'node B|S [0|1]'")
        nodes.append(int(tok[0]))
        tags.append(tok[1] == "S")
        noisy.append(len(tok) == 3 and tok[2] == "1")
    return LabelSet(np.array(nodes, dtype=np.int64), np.array(tags, dtype=bool),
                    np.array(noisy, dtype=bool))


def write_beliefs(beliefs: Beliefs, stream: IO[str]) -> None:
    stream.write(f"# iterations={beliefs.iterations_run} converged={int(beliefs.converged)} "
                 f"final_delta={beliefs.final_delta:.9g}\n")
    for v, (ps, pb) in enumerate(beliefs.posterior):
        stream.write(f"{v} {ps:.9f} {pb:.9f}\n")


def read_beliefs(stream: IO[str]) -> Beliefs:
    meta = {}
    rows = []
    for line in stream:
        s = line.strip()
        if s.startswith("#"):
            for item in s[1:].split():
                k, _, v = item.partition("=")
                meta[k] = v
        elif s:
            tok = s.split()
            rows.append((int(tok[0]), float(tok[1]), float(tok[2])))
    rows.sort()
    post = np.array([[a, b] for _, a, b in rows]).reshape(-1, 2)
    return Beliefs(post, int(meta.get("iterations", 0)), meta.get("converged", "1") == "1",
                   float(meta.get("final_delta", 0.0)))


def write_scores(scores: ScoreVector, stream: IO[str]) -> None:
    stream.write(f"# provenance={scores.provenance}\n")
    for v, x in enumerate(scores.scores):
        stream.write(f"{v} {x:.9f}\n")


def read_scores(stream: IO[str]) -> ScoreVector:
    prov = "unknown"
    rows = []
    for line in stream:
        s = line.strip()
        if s.startswith("#"):
            if "provenance=" in s:
                prov = s.split("provenance=", 1)[1].strip()
        elif s:
            tok = s.split()
            rows.append((int(tok[0]), float(tok[1])))
    rows.sort()
    return ScoreVector(np.array([x for _, x in rows]), prov)
