"""Experiment configs, detector dispatch and the CSV-producing runner.

Config files are UTF-8 text with one ``section.key = value`` per line and
``#`` comments. Lists are comma separated. See ``SCHEMA`` for every key.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .baselines import cia, random_rank, sybilrank
from .graph import Graph, largest_connected_component, load_edge_list
from .labels import LabelSet, inject_noise, sample_labels
from .metrics import (SweepResult, auc, default_size_grid, sweep_accepted_sybils,
                      sweep_cell)
from .mrf import MrfParams, boost, build_mrf, classify, detect_noisy_labels, run_lbp
from .seeding import derive_seed
from .synth import (GeneratorSpec, compose_regions, duplicate_region_scenario,
                    gen_community_benign, generate)

DETECTORS = ("SB", "SB-N", "SB-B", "SR", "SR-N", "CIA", "CIA-N", "Random")
SB_FAMILY = ("SB", "SB-N", "SB-B")


class ConfigError(ValueError):
    pass


def _bool(s: str) -> bool:
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _strs(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def _opt_int(s: str):
    return None if s.lower() in ("", "none", "auto") else int(s)


# key -> (parser, default)
SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "scenario.benign": (str, "PA"),            # PA | ER | file
    "scenario.benign_nodes": (int, 1000),
    "scenario.benign_avg_degree": (float, 10.0),
    "scenario.benign_path": (str, ""),
    "scenario.lcc": (_bool, True),
    "scenario.communities": (int, 1),
    "scenario.inter_edges": (int, 10),
    "scenario.sybil": (str, "PA"),             # PA | ER
    "scenario.sybil_nodes": (int, 1000),
    "scenario.sybil_avg_degree": (float, 10.0),
    "scenario.sybil_sizes": (_ints, []),       # empty -> default geometric grid
    "scenario.attack_edges": (_ints, [500]),
    "scenario.duplicate": (_bool, False),
    "labels.benign": (int, 1),
    "labels.sybil": (int, 1),
    "labels.benign_site": (str, "uniform"),
    "labels.sybil_site": (str, "uniform"),
    "labels.benign_flips": (int, 0),
    "labels.sybil_flips": (int, 0),
    "detector.kind": (_strs, ["SB"]),
    "sybilbelief.w": (float, 0.9),
    "sybilbelief.theta": (float, 0.5),
    "sybilbelief.theta_labeled": (float, 0.5),
    "sybilbelief.max_iters": (int, 10),
    "sybilbelief.tol": (float, 1e-3),
    "sybilbelief.boost_trials": (int, 10),
    "sybilbelief.boost_samples": (int, 10),
    "sybilbelief.boost_include_labeled": (_bool, False),
    "sybilrank.log_base": (float, 2.0),
    "sybilrank.iterations": (_opt_int, None),
    "cia.alpha": (float, 0.85),
    "cia.tol": (float, 1e-6),
    "cia.max_iters": (int, 1000),
    "metric.kind": (str, "classification"),   # classification | auc
    "run.trials": (int, 10),
    "run.seed": (int, 0),
    "run.out": (str, ""),
    "run.jobs": (int, 1),
}


@dataclass
class ExperimentConfig:
    values: dict[str, Any] = field(default_factory=lambda: {k: d for k, (_, d) in SCHEMA.items()})

    def __getitem__(self, key: str):
        return self.values[key]

    def replace(self, **updates) -> "ExperimentConfig":
        """Copy with ``section__key=value`` overrides, revalidated."""
        vals = dict(self.values)
        for k, v in updates.items():
            key = k.replace("__", ".")
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            vals[key] = v
        cfg = ExperimentConfig(vals)
        validate(cfg)
        return cfg

    def dumps(self) -> str:
        out = []
        for k, v in self.values.items():
            if isinstance(v, list):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif v is None:
                v = "auto"
            out.append(f"{k} = {v}")
        return "\n".join(out) + "\n"

    @property
    def detectors(self) -> list[str]:
        return self.values["detector.kind"]


def parse_config(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, _, value = (p.strip() for p in line.partition("="))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: {key!r} already set on line {seen[key]}")
        parser = SCHEMA[key][0]
        try:
            cfg.values[key] = parser(value)
        except ValueError as e:
            raise ConfigError(f"line {lineno}: bad value for {key}: {e}") from None
        seen[key] = lineno
    validate(cfg, seen)
    return cfg


def validate(cfg: ExperimentConfig, lines: dict[str, int] | None = None) -> None:
    lines = lines or {}

    def fail(key: str, msg: str):
        where = f"line {lines[key]}: " if key in lines else ""
        raise ConfigError(f"{where}{msg}")

    v = cfg.values
    kinds = v["detector.kind"]
    if not kinds:
        fail("detector.kind", "detector.kind must name a detector")
    for k in kinds:
        if k not in DETECTORS:
            fail("detector.kind", f"unknown detector {k!r}; choose from {', '.join(DETECTORS)}")
    metric = v["metric.kind"]
    if metric not in ("classification", "auc"):
        fail("metric.kind", f"unknown metric {metric!r}")
    if metric == "classification":
        if len(kinds) != 1:
            fail("detector.kind", "a classification sweep takes exactly one detector")
        if kinds[0] not in SB_FAMILY:
            fail("detector.kind", f"{kinds[0]} is a ranking method; use metric.kind = auc")
    nb, ns = v["labels.benign"], v["labels.sybil"]
    for k in kinds:
        base = k.removesuffix("-N")
        if base in ("SR", "SB-B") and nb == 0:
            fail("detector.kind", f"{k} needs benign labels (labels.benign > 0)")
        if base == "CIA" and ns == 0:
            fail("detector.kind", f"{k} needs Sybil labels (labels.sybil > 0)")
        if base == "SB" and nb + ns == 0:
            fail("detector.kind", "SB needs at least one label")
        if k.endswith("-N") and v["labels.benign_flips"] + v["labels.sybil_flips"] == 0:
            fail("detector.kind", f"{k} needs label flips (labels.benign_flips / labels.sybil_flips)")
    if v["labels.benign_flips"] > nb or v["labels.sybil_flips"] > ns:
        fail("labels.benign_flips", "cannot flip more labels than are sampled")
    k_comm = v["scenario.communities"]
    if k_comm < 1 or v["scenario.benign_nodes"] % k_comm:
        fail("scenario.communities",
             "scenario.benign_nodes must split evenly into scenario.communities blocks")
    for key in ("scenario.benign", "scenario.sybil"):
        if v[key] not in ("PA", "ER", "file") or (key == "scenario.sybil" and v[key] == "file"):
            fail(key, f"unsupported generator {v[key]!r}")
    if v["scenario.benign"] == "file":
        p = v["scenario.benign_path"]
        if not p or not Path(p).exists():
            fail("scenario.benign_path", f"dataset file {p!r} does not exist")
    if not v["scenario.attack_edges"]:
        fail("scenario.attack_edges", "need at least one attack-edge count")
    if v["run.trials"] < 1:
        fail("run.trials", "run.trials must be positive")
    try:
        mrf_params(cfg)
    except ValueError as e:
        fail("sybilbelief.w", str(e))


def mrf_params(cfg: ExperimentConfig) -> MrfParams:
    return MrfParams(theta_default=cfg["sybilbelief.theta"], theta_labeled=cfg["sybilbelief.theta_labeled"],
                     w_default=cfg["sybilbelief.w"])


# -- scenario construction -------------------------------------------------

@dataclass(frozen=True)
class BenignFactory:
    """Builds the benign region for a trial seed (picklable for worker pools)."""

    kind: str
    nodes: int
    avg_degree: float
    communities: int = 1
    inter_edges: int = 10
    path: str = ""
    lcc: bool = True

    def __call__(self, seed: int) -> Graph:
        if self.kind == "file":
            return _load_dataset(self.path, self.lcc)
        spec = GeneratorSpec(self.kind, self.nodes // max(self.communities, 1), self.avg_degree, seed)
        if self.communities > 1:
            return gen_community_benign(self.communities, spec, self.inter_edges,
                                        derive_seed(seed, "joins"))
        return generate(spec)


_DATASETS: dict[tuple[str, bool], Graph] = {}


def _load_dataset(path: str, lcc: bool) -> Graph:
    key = (path, lcc)
    if key not in _DATASETS:
        with open(path) as f:
            g = load_edge_list(f)
        _DATASETS[key] = largest_connected_component(g)[0] if lcc else g
    return _DATASETS[key]


@dataclass(frozen=True)
class LabelPlan:
    n_benign: int
    n_sybil: int
    benign_site: str = "uniform"
    sybil_site: str = "uniform"
    benign_flips: int = 0
    sybil_flips: int = 0
    community_size: int = 0  # >0: at least one benign label per community block

    def clean(self, scenario, seed: int) -> LabelSet:
        groups = None
        if self.community_size:
            groups = np.arange(scenario.graph.node_count) // self.community_size
        return sample_labels(scenario, self.n_benign, self.n_sybil, self.benign_site, seed,
                             sybil_site_policy=self.sybil_site, benign_groups=groups)

    def noisy(self, labels: LabelSet, seed: int) -> LabelSet:
        return inject_noise(labels, self.benign_flips, self.sybil_flips, derive_seed(seed, "noise"))

    def __call__(self, scenario, seed: int) -> LabelSet:
        labels = self.clean(scenario, seed)
        if self.benign_flips or self.sybil_flips:
            labels = self.noisy(labels, seed)
        return labels


def benign_factory(cfg: ExperimentConfig) -> BenignFactory:
    return BenignFactory(cfg["scenario.benign"], cfg["scenario.benign_nodes"],
                         cfg["scenario.benign_avg_degree"], cfg["scenario.communities"],
                         cfg["scenario.inter_edges"], cfg["scenario.benign_path"], cfg["scenario.lcc"])


def label_plan(cfg: ExperimentConfig, noisy: bool) -> LabelPlan:
    k = cfg["scenario.communities"]
    comm = cfg["scenario.benign_nodes"] // k if k > 1 else 0
    return LabelPlan(cfg["labels.benign"], cfg["labels.sybil"], cfg["labels.benign_site"],
                     cfg["labels.sybil_site"],
                     cfg["labels.benign_flips"] if noisy else 0,
                     cfg["labels.sybil_flips"] if noisy else 0, comm)


def sybil_spec(cfg: ExperimentConfig) -> GeneratorSpec:
    return GeneratorSpec(cfg["scenario.sybil"], cfg["scenario.sybil_nodes"], cfg["scenario.sybil_avg_degree"])


def size_grid(cfg: ExperimentConfig) -> list[int]:
    if cfg["scenario.sybil_sizes"]:
        return list(cfg["scenario.sybil_sizes"])
    n_b = cfg["scenario.benign_nodes"]
    if cfg["scenario.benign"] == "file":
        n_b = _load_dataset(cfg["scenario.benign_path"], cfg["scenario.lcc"]).node_count
    return default_size_grid(n_b)


# -- detectors -------------------------------------------------------------

@dataclass(frozen=True)
class Detector:
    """One roster entry bound to its parameters."""

    kind: str
    params: MrfParams = MrfParams()
    max_iters: int = 10
    tol: float = 1e-3
    boost_trials: int = 10
    boost_samples: int = 10
    boost_include_labeled: bool = False
    sr_log_base: float = 2.0
    sr_iterations: int | None = None
    cia_alpha: float = 0.85
    cia_tol: float = 1e-6
    cia_max_iters: int = 1000

    @property
    def base(self) -> str:
        return self.kind.removesuffix("-N")

    def beliefs(self, scenario, labels: LabelSet, seed: int):
        if self.kind == "SB-B":
            benign = labels.only(False)
            return boost(scenario, benign, self.params, self.boost_trials,
                         min(self.boost_samples, len(benign)), seed,
                         include_labeled=self.boost_include_labeled,
                         max_iters=self.max_iters, tol=self.tol), None
        model = build_mrf(scenario, labels, self.params)
        return run_lbp(model, self.max_iters, self.tol), model

    def scores(self, scenario, labels: LabelSet, seed: int):
        """Reputation scores (higher = more benign) plus the raw result object."""
        if self.base in ("SB", "SB-B"):
            b, _ = self.beliefs(scenario, labels, seed)
            return b.p_benign, b
        if self.base == "SR":
            s = sybilrank(scenario, labels.only(False), self.sr_iterations, self.sr_log_base)
        elif self.base == "CIA":
            s = cia(scenario, labels.only(True), self.cia_alpha, self.cia_tol, self.cia_max_iters)
        else:
            s = random_rank(scenario, seed)
        return s.scores, s

    def __call__(self, scenario, labels: LabelSet, seed: int):
        """Predicted-Sybil mask for sweeps; SB-N also reports noisy-label recovery."""
        b, model = self.beliefs(scenario, labels, seed)
        pred = classify(b)
        if model is not None and labels.noisy.any():
            flagged = detect_noisy_labels(model, b)
            truth = np.sort(labels.noisy_nodes)
            return pred, {"noise_recovered": bool(np.array_equal(flagged, truth)),
                          "flagged": len(flagged)}
        return pred


def detector_for(cfg: ExperimentConfig, kind: str) -> Detector:
    return Detector(kind, mrf_params(cfg), cfg["sybilbelief.max_iters"], cfg["sybilbelief.tol"],
                    cfg["sybilbelief.boost_trials"], cfg["sybilbelief.boost_samples"],
                    cfg["sybilbelief.boost_include_labeled"], cfg["sybilrank.log_base"],
                    cfg["sybilrank.iterations"], cfg["cia.alpha"], cfg["cia.tol"], cfg["cia.max_iters"])


# -- cells -----------------------------------------------------------------

def x_seed(cfg: ExperimentConfig, attack_edges: int, seed: int | None = None) -> int:
    return derive_seed(cfg["run.seed"] if seed is None else seed, "attack_edges", attack_edges)


def build_cell(cfg: ExperimentConfig, attack_edges: int, trial: int, size: int | None = None,
               seed: int | None = None):
    """Scenario and labels exactly as the runner builds them for one cell.

    Returns ``(scenario, labels, noisy_labels)``; ``noisy_labels`` is None
    when no flips are configured.
    """
    xs = x_seed(cfg, attack_edges, seed)
    noisy = any(k.endswith("-N") for k in cfg.detectors)
    if cfg["metric.kind"] == "classification":
        size = cfg["scenario.sybil_nodes"] if size is None else size
        scenario, labels = sweep_cell(benign_factory(cfg), attack_edges, sybil_spec(cfg), size,
                                      label_plan(cfg, noisy), xs, trial)
        return scenario, labels, (labels if noisy else None)
    factory = benign_factory(cfg)
    base = factory(derive_seed(xs, trial, "benign"))
    if cfg["scenario.duplicate"]:
        scenario = duplicate_region_scenario(base, attack_edges, derive_seed(xs, trial, "attack"))
    else:
        size = cfg["scenario.sybil_nodes"] if size is None else size
        syb = generate(sybil_spec(cfg).with_nodes(size).with_seed(derive_seed(xs, trial, "sybil")))
        scenario = compose_regions(base, syb, attack_edges, derive_seed(xs, trial, "attack"))
    plan = label_plan(cfg, True)
    lseed = derive_seed(xs, trial, "labels")
    labels = plan.clean(scenario, lseed)
    return scenario, labels, (plan.noisy(labels, lseed) if noisy else None)


# -- runner ----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9f}"
    return str(x)


def _write_csv(path: Path | None, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    text = buf.getvalue()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


@dataclass
class ExperimentResult:
    results_csv: str
    curve_csv: str = ""
    sweeps: dict[int, SweepResult] = field(default_factory=dict)
    aucs: dict[int, dict[str, list[float]]] = field(default_factory=dict)


def run_experiment(cfg: ExperimentConfig, out: str | Path | None = None, jobs: int | None = None,
                   trials: int | None = None, seed: int | None = None) -> ExperimentResult:
    """Run the configured matrix and write ``results.csv`` (and ``curve.csv`` for sweeps)."""
    out = out if out is not None else (cfg["run.out"] or None)
    out_dir = Path(out) if out else None
    jobs = jobs or cfg["run.jobs"]
    trials = trials or cfg["run.trials"]
    seed = cfg["run.seed"] if seed is None else seed
    if cfg["metric.kind"] == "classification":
        return _run_sweep(cfg, out_dir, jobs, trials, seed)
    return _run_auc(cfg, out_dir, trials, seed)


def _run_sweep(cfg, out_dir, jobs, trials, seed) -> ExperimentResult:
    kind = cfg.detectors[0]
    det = detector_for(cfg, kind)
    plan = label_plan(cfg, kind.endswith("-N"))
    grid = size_grid(cfg)
    rows, curve = [], []
    sweeps = {}
    for x in cfg["scenario.attack_edges"]:
        try:
            res = sweep_accepted_sybils(benign_factory(cfg), x, sybil_spec(cfg), grid, det, plan,
                                        trials, x_seed(cfg, x, seed), jobs)
        except Exception as e:
            raise RuntimeError(f"cell detector={kind} attack_edges={x} failed: {e}") from e
        sweeps[x] = res
        for t in range(trials):
            rows.append([kind, x, t, float(res.false_negatives[t].max()), float(res.false_positives[t].max())])
        rows.append([kind, x, "mean", res.accepted_sybils, res.rejected_benign])
        for c in sorted(res.cells, key=lambda c: (c["trial"], c["size"])):
            rec = c.get("noise_recovered")
            curve.append([kind, x, c["size"], c["trial"], c["false_negatives"], c["false_positives"],
                          "" if rec is None else int(rec)])
    text = _write_csv(out_dir / "results.csv" if out_dir else None,
                      ["detector", "attack_edges", "trial", "accepted_sybils", "rejected_benign"], rows)
    ctext = _write_csv(out_dir / "curve.csv" if out_dir else None,
                       ["detector", "attack_edges", "sybil_size", "trial", "false_negatives",
                        "false_positives", "noise_recovered"], curve)
    return ExperimentResult(text, ctext, sweeps=sweeps)


def _run_auc(cfg, out_dir, trials, seed) -> ExperimentResult:
    kinds = cfg.detectors
    dets = {k: detector_for(cfg, k) for k in kinds}
    rows = []
    aucs: dict[int, dict[str, list[float]]] = {}
    for x in cfg["scenario.attack_edges"]:
        aucs[x] = {k: [] for k in kinds}
        for t in range(trials):
            try:
                scenario, labels, noisy = build_cell(cfg, x, t, seed=seed)
                row = [x, t]
                for k in kinds:
                    use = noisy if k.endswith("-N") else labels
                    s, _ = dets[k].scores(scenario, use, derive_seed(x_seed(cfg, x, seed), t, k))
                    a = auc(s, scenario, exclude=labels.nodes)
                    aucs[x][k].append(a)
                    row.append(a)
            except Exception as e:
                raise RuntimeError(f"cell attack_edges={x} trial={t} failed: {e}") from e
            rows.append(row)
        rows.append([x, "mean"] + [float(np.mean(aucs[x][k])) for k in kinds])
    text = _write_csv(out_dir / "results.csv" if out_dir else None,
                      ["attack_edges", "trial"] + [f"auc_{k}" for k in kinds], rows)
    return ExperimentResult(text, aucs=aucs)
