"""Classification sweep (accepted Sybils / rejected benign) and ranking AUC."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import rankdata

from .graph import Graph, ScenarioGraph
from .labels import LabelSet
from .seeding import derive_seed
from .synth import GeneratorSpec, compose_regions, generate

GRID_FACTORS = (0.1, 0.2, 0.4, 0.8, 1.6, 3.2)


def default_size_grid(n_benign: int, factors: Sequence[float] = GRID_FACTORS) -> list[int]:
    return [math.ceil(f * n_benign) for f in factors]


def _exclude_mask(n: int, exclude) -> np.ndarray:
    keep = np.ones(n, dtype=bool)
    if exclude is not None:
        keep[np.asarray(list(exclude) if not isinstance(exclude, np.ndarray) else exclude,
                        dtype=np.int64)] = False
    return keep


def confusion(predicted_sybil: np.ndarray, scenario: ScenarioGraph, exclude=None) -> tuple[int, int]:
    """(false negatives, false positives) over the non-excluded nodes.

    A false negative is a Sybil predicted benign; a false positive is a benign
    node predicted Sybil.
    """
    pred = np.asarray(predicted_sybil)
    n = scenario.graph.node_count
    if pred.shape != (n,):
        raise ValueError(f"need a prediction for each of the {n} nodes, got shape {pred.shape}")
    pred = pred.astype(bool)
    keep = _exclude_mask(n, exclude)
    fn = int(np.count_nonzero(scenario.is_sybil & ~pred & keep))
    fp = int(np.count_nonzero(~scenario.is_sybil & pred & keep))
    return fn, fp


def auc(scores, scenario: ScenarioGraph, exclude=None) -> float:
    """Probability a random benign node outscores a random Sybil; ties count half."""
    s = np.asarray(getattr(scores, "scores", scores), dtype=float)
    keep = _exclude_mask(scenario.graph.node_count, exclude)
    s, syb = s[keep], scenario.is_sybil[keep]
    nb, ns = int((~syb).sum()), int(syb.sum())
    if nb == 0 or ns == 0:
        raise ValueError("AUC needs at least one benign and one Sybil node")
    ranks = rankdata(s)  # average ranks handle ties
    u = ranks[~syb].sum() - nb * (nb + 1) / 2.0
    return float(u / (nb * ns))


@dataclass
class SweepResult:
    sizes: list[int]
    false_negatives: np.ndarray  # (trials, sizes)
    false_positives: np.ndarray
    cells: list[dict] = field(default_factory=list)

    @property
    def mean_fn(self) -> np.ndarray:
        return self.false_negatives.mean(axis=0)

    @property
    def mean_fp(self) -> np.ndarray:
        return self.false_positives.mean(axis=0)

    @property
    def accepted_sybils(self) -> float:
        return float(self.mean_fn.max())

    @property
    def rejected_benign(self) -> float:
        return float(self.mean_fp.max())


DetectorFn = Callable[[ScenarioGraph, LabelSet, int], object]
LabelSampler = Callable[[ScenarioGraph, int], LabelSet]


def sweep_cell(benign: Graph | Callable[[int], Graph], attack_edge_count: int,
               sybil_spec: GeneratorSpec, size: int, label_plan: LabelSampler,
               rng_seed: int, trial: int) -> tuple[ScenarioGraph, LabelSet]:
    """Scenario and labels for one (trial, Sybil size) cell of a sweep."""
    g = benign(derive_seed(rng_seed, trial, "benign")) if callable(benign) else benign
    sybil = generate(sybil_spec.with_nodes(size).with_seed(derive_seed(rng_seed, trial, size, "sybil")))
    scenario = compose_regions(g, sybil, attack_edge_count, derive_seed(rng_seed, trial, size, "attack"))
    labels = label_plan(scenario, derive_seed(rng_seed, trial, size, "labels"))
    return scenario, labels


def _run_cell(args):
    benign, attack, sybil_spec, size, detector, label_plan, seed, trial = args
    scenario, labels = sweep_cell(benign, attack, sybil_spec, size, label_plan, seed, trial)
    out = detector(scenario, labels, derive_seed(seed, trial, size, "detector"))
    extra = {}
    if isinstance(out, tuple):
        out, extra = out
    fn, fp = confusion(out, scenario, exclude=labels.nodes)
    return trial, size, fn, fp, extra


def sweep_accepted_sybils(benign: Graph | Callable[[int], Graph], attack_edge_count: int,
                          sybil_spec: GeneratorSpec, size_grid: Sequence[int], detector: DetectorFn,
                          label_plan: LabelSampler, trials_per_size: int = 10, rng_seed: int = 0,
                          jobs: int = 1) -> SweepResult:
    """Grow the Sybil region over ``size_grid`` and record FN/FP per trial.

    ``benign`` may be a fixed graph or a function of a seed, in which case a
    fresh benign region is drawn once per trial and shared across sizes.
    ``detector`` returns a predicted-Sybil mask, optionally paired with a dict
    of extra per-cell measurements kept in ``SweepResult.cells``.
    """
    sizes = list(size_grid)
    if not sizes:
        raise ValueError("empty size grid")
    tasks = [(benign, attack_edge_count, sybil_spec, s, detector, label_plan, rng_seed, t)
             for t in range(trials_per_size) for s in sizes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]
    fn = np.zeros((trials_per_size, len(sizes)))
    fp = np.zeros_like(fn)
    cells = []
    col = {s: i for i, s in enumerate(sizes)}
    for trial, size, a, b, extra in results:
        fn[trial, col[size]] = a
        fp[trial, col[size]] = b
        cells.append({"trial": trial, "size": size, "false_negatives": a, "false_positives": b, **extra})
    return SweepResult(sizes, fn, fp, cells)
