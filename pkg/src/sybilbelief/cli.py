"""Command-line experiment runner.

    sybilbelief synth   --config C --out DIR        scenario + labels files
    sybilbelief detect  --config C --scenario DIR   beliefs or scores
    sybilbelief eval    --scenario DIR --beliefs F | --scores F
    sybilbelief sweep   --config C --out DIR        accepted Sybils / rejected benign
    sybilbelief compare --config C --out DIR        AUC per detector
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io as fio
from .experiment import (ConfigError, ExperimentConfig, build_cell, detector_for, parse_config,
                         run_experiment)
from .metrics import auc, confusion
from .mrf import classify
from .seeding import derive_seed

log = logging.getLogger("sybilbelief")


def _load_config(args, metric: str | None = None) -> ExperimentConfig:
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    cfg = parse_config(text)
    updates = {}
    if args.seed is not None:
        updates["run__seed"] = args.seed
    if args.trials is not None:
        updates["run__trials"] = args.trials
    if args.jobs is not None:
        updates["run__jobs"] = args.jobs
    if metric is not None and cfg["metric.kind"] != metric:
        updates["metric__kind"] = metric
    return cfg.replace(**updates) if updates else cfg


def _out_dir(args, cfg: ExperimentConfig) -> Path:
    out = args.out or cfg["run.out"]
    if not out:
        raise ConfigError("no output directory: pass --out or set run.out")
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_synth(args) -> None:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    x = args.attack_edges if args.attack_edges is not None else cfg["scenario.attack_edges"][0]
    scenario, labels, noisy = build_cell(cfg, x, args.trial, args.size)
    fio.write_scenario(scenario, out)
    with open(out / fio.LABELS, "w") as f:
        fio.write_labels(noisy if noisy is not None else labels, f)
    if noisy is not None and cfg["metric.kind"] == "auc":
        with open(out / "labels_clean.txt", "w") as f:
            fio.write_labels(labels, f)
    log.info("wrote scenario with %d nodes, %d edges, %d attack edges to %s",
             scenario.graph.node_count, scenario.graph.m, len(scenario.attack_edges), out)


def cmd_detect(args) -> None:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    scenario = fio.read_scenario(args.scenario)
    with open(args.labels or Path(args.scenario) / fio.LABELS) as f:
        labels = fio.read_labels(f)
    det = detector_for(cfg, cfg.detectors[0])
    seed = derive_seed(cfg["run.seed"], "detect")
    if det.base in ("SB", "SB-B"):
        b, _ = det.beliefs(scenario, labels, seed)
        with open(out / "beliefs.txt", "w") as f:
            fio.write_beliefs(b, f)
    else:
        _, s = det.scores(scenario, labels, seed)
        with open(out / "scores.txt", "w") as f:
            fio.write_scores(s, f)


def cmd_eval(args) -> None:
    scenario = fio.read_scenario(args.scenario)
    with open(args.labels or Path(args.scenario) / fio.LABELS) as f:
        labels = fio.read_labels(f)
    lines = []
    if args.beliefs:
        with open(args.beliefs) as f:
            b = fio.read_beliefs(f)
        fn, fp = confusion(classify(b), scenario, exclude=labels.nodes)
        a = auc(b.p_benign, scenario, exclude=labels.nodes)
        lines = ["false_negatives,false_positives,auc", f"{fn},{fp},{a:.9f}"]
    elif args.scores:
        with open(args.scores) as f:
            s = fio.read_scores(f)
        lines = ["provenance,auc", f"{s.provenance},{auc(s, scenario, exclude=labels.nodes):.9f}"]
    else:
        raise ConfigError("eval needs --beliefs or --scores")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "eval.csv").write_text(text)
    sys.stdout.write(text)


def cmd_sweep(args) -> None:
    cfg = _load_config(args, "classification")
    res = run_experiment(cfg, _out_dir(args, cfg))
    sys.stdout.write(res.results_csv)


def cmd_compare(args) -> None:
    cfg = _load_config(args, "auc")
    res = run_experiment(cfg, _out_dir(args, cfg))
    sys.stdout.write(res.results_csv)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sybilbelief", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="experiment config file")
        sp.add_argument("--seed", type=int, help="master seed (overrides run.seed)")
        sp.add_argument("--out", help="output directory (overrides run.out)")
        sp.add_argument("--jobs", type=int, help="parallel workers for sweep cells")
        sp.add_argument("--trials", type=int, help="trials per cell (overrides run.trials)")
        return sp

    sp = common(sub.add_parser("synth", help="write one scenario and its labels"))
    sp.add_argument("--attack-edges", type=int)
    sp.add_argument("--trial", type=int, default=0)
    sp.add_argument("--size", type=int, help="Sybil region size (default scenario.sybil_nodes)")
    sp.set_defaults(func=cmd_synth)

    sp = common(sub.add_parser("detect", help="run the configured detector on a scenario"))
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--labels")
    sp.set_defaults(func=cmd_detect)

    sp = common(sub.add_parser("eval", help="metrics from dumped beliefs or scores"))
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--labels")
    sp.add_argument("--beliefs")
    sp.add_argument("--scores")
    sp.set_defaults(func=cmd_eval)

    sp = common(sub.add_parser("sweep", help="classification sweep over Sybil region sizes"))
    sp.set_defaults(func=cmd_sweep)
    sp = common(sub.add_parser("compare", help="AUC comparison across detectors"))
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
