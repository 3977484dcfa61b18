import csv
import io
import os

import pytest

from sybilbelief.cli import main
from sybilbelief.experiment import ConfigError, ExperimentConfig, parse_config, run_experiment

SMALL = """
scenario.benign_nodes = 200
scenario.sybil_sizes = 40,80
scenario.attack_edges = 50
labels.benign = 5
labels.sybil = 5
run.trials = 2
"""

AUC = """
scenario.benign_nodes = 200
scenario.duplicate = true
scenario.attack_edges = 50,100
labels.benign = 10
labels.sybil = 10
labels.benign_flips = 1
labels.sybil_flips = 1
detector.kind = SB, SB-N, SR, SR-N, CIA, CIA-N, Random
metric.kind = auc
run.trials = 2
"""


def test_minimal_config_gets_defaults():
    cfg = parse_config("scenario.benign_nodes = 1000\nlabels.benign = 1\n")
    assert cfg["sybilbelief.w"] == 0.9
    assert cfg["sybilbelief.theta"] == 0.5
    assert cfg["sybilbelief.boost_trials"] == 10
    assert cfg["cia.alpha"] == 0.85
    assert cfg["sybilbelief.tol"] == 1e-3
    assert cfg["sybilbelief.max_iters"] == 10
    assert cfg.detectors == ["SB"]


def test_cia_with_benign_labels_only_is_rejected():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("labels.benign = 10\nlabels.sybil = 0\ndetector.kind = CIA\nmetric.kind = auc\n")


def test_w_round_trips():
    cfg = parse_config("sybilbelief.w = 0.90\n")
    assert cfg["sybilbelief.w"] == 0.9
    assert parse_config(cfg.dumps()).values == cfg.values


@pytest.mark.parametrize("text, where", [
    ("bogus.key = 1\n", "line 1"),
    ("labels.benign = many\n", "line 1"),
    ("run.seed = 1\nrun.seed = 2\n", "line 2"),
    ("just words\n", "line 1"),
])
def test_config_errors_name_the_line(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config(text)


def test_missing_dataset_file():
    with pytest.raises(ConfigError):
        parse_config("scenario.benign = file\nscenario.benign_path = /nonexistent/edges.txt\n")


def test_communities_must_divide_region():
    with pytest.raises(ConfigError):
        parse_config("scenario.benign_nodes = 1000\nscenario.communities = 3\n")


def test_classification_csv_columns():
    res = run_experiment(parse_config(SMALL))
    rows = list(csv.DictReader(io.StringIO(res.results_csv)))
    assert list(rows[0]) == ["detector", "attack_edges", "trial", "accepted_sybils", "rejected_benign"]
    assert [r["trial"] for r in rows] == ["0", "1", "mean"]
    curve = list(csv.DictReader(io.StringIO(res.curve_csv)))
    assert len(curve) == 4


def test_auc_csv_has_column_per_detector():
    res = run_experiment(parse_config(AUC))
    header = res.results_csv.splitlines()[0].split(",")
    assert header == ["attack_edges", "trial", "auc_SB", "auc_SB-N", "auc_SR", "auc_SR-N",
                      "auc_CIA", "auc_CIA-N", "auc_Random"]
    assert len(res.results_csv.splitlines()) == 1 + 2 * 3


def test_rerun_is_byte_identical(tmp_path):
    cfg = parse_config(SMALL).replace(run__trials=1)
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    for name in ("results.csv", "curve.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_jobs_do_not_change_output():
    cfg = parse_config(SMALL)
    assert run_experiment(cfg, jobs=1).curve_csv == run_experiment(cfg, jobs=2).curve_csv


# -- command line ----------------------------------------------------------

def _cfg(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_synth_detect_eval_matches_sweep(tmp_path, capsys):
    text = SMALL.replace("scenario.sybil_sizes = 40,80", "scenario.sybil_sizes = 80") \
                .replace("run.trials = 2", "run.trials = 1")
    cfg = _cfg(tmp_path, text)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "sweep")]) == 0
    curve = list(csv.DictReader(open(tmp_path / "sweep" / "curve.csv")))
    capsys.readouterr()

    sc = str(tmp_path / "cell")
    assert main(["synth", "--config", cfg, "--out", sc, "--size", "80"]) == 0
    assert main(["detect", "--config", cfg, "--scenario", sc, "--out", sc]) == 0
    assert main(["eval", "--scenario", sc, "--beliefs", os.path.join(sc, "beliefs.txt")]) == 0
    out = capsys.readouterr().out.splitlines()
    fn, fp, _ = out[1].split(",")
    assert (fn, fp) == (curve[0]["false_negatives"], curve[0]["false_positives"])


def test_detect_sb_b_without_sybil_labels(tmp_path):
    text = SMALL.replace("labels.sybil = 5", "labels.sybil = 0") + "detector.kind = SB-B\n"
    cfg = _cfg(tmp_path, text)
    sc = str(tmp_path / "cell")
    assert main(["synth", "--config", cfg, "--out", sc]) == 0
    assert main(["detect", "--config", cfg, "--scenario", sc, "--out", sc]) == 0
    assert os.path.exists(os.path.join(sc, "beliefs.txt"))


def test_detect_sr_without_benign_labels_errors(tmp_path, capsys):
    synth_cfg = _cfg(tmp_path, SMALL.replace("labels.benign = 5", "labels.benign = 0"), "s.cfg")
    sc = str(tmp_path / "cell")
    assert main(["synth", "--config", synth_cfg, "--out", sc]) == 0
    sr_cfg = _cfg(tmp_path, "labels.benign = 0\ndetector.kind = SR\nmetric.kind = auc\n", "sr.cfg")
    assert main(["detect", "--config", sr_cfg, "--scenario", sc, "--out", sc]) == 1
    assert "SR needs benign labels" in capsys.readouterr().err


def test_detect_sr_with_empty_label_file_errors(tmp_path, capsys):
    synth_cfg = _cfg(tmp_path, SMALL.replace("labels.benign = 5", "labels.benign = 0"), "s.cfg")
    sc = str(tmp_path / "cell")
    main(["synth", "--config", synth_cfg, "--out", sc])
    sr_cfg = _cfg(tmp_path, "detector.kind = SR\nmetric.kind = auc\n", "sr.cfg")
    assert main(["detect", "--config", sr_cfg, "--scenario", sc, "--out", sc]) == 1
    assert "benign label" in capsys.readouterr().err


def test_compare_and_eval_scores(tmp_path, capsys):
    cfg = _cfg(tmp_path, AUC)
    assert main(["compare", "--config", cfg, "--out", str(tmp_path / "cmp"), "--trials", "1"]) == 0
    assert (tmp_path / "cmp" / "results.csv").exists()
    sc = str(tmp_path / "cell")
    assert main(["synth", "--config", cfg, "--out", sc]) == 0
    sr_cfg = _cfg(tmp_path, AUC.replace("SB, SB-N, SR, SR-N, CIA, CIA-N, Random", "SR"), "sr.cfg")
    assert main(["detect", "--config", sr_cfg, "--scenario", sc, "--labels",
                 os.path.join(sc, "labels_clean.txt"), "--out", sc]) == 0
    capsys.readouterr()
    assert main(["eval", "--scenario", sc, "--labels", os.path.join(sc, "labels_clean.txt"),
                 "--scores", os.path.join(sc, "scores.txt")]) == 0
    assert capsys.readouterr().out.startswith("provenance,auc\nSybilRank,")


def test_unknown_key_exits_nonzero(tmp_path, capsys):
    cfg = _cfg(tmp_path, "nope.key = 1\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_default_config_object():
    assert ExperimentConfig()["scenario.attack_edges"] == [500]
