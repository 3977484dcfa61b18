# %% [markdown]
# # How strong should the edge coupling be?
#
# `w` is the probability mass an edge puts on its endpoints agreeing. At 0.5
# edges carry no information; close to 1 the labels spread aggressively. This
# notebook runs the basic-setup sweep for several values through the config
# driven runner, the same path the command line uses.

# %%
from sybilbelief.experiment import parse_config, run_experiment

BASE = """
scenario.benign_nodes = 1000
scenario.attack_edges = 500
labels.benign = 1
labels.sybil = 1
run.trials = 3
"""

for w in (0.55, 0.65, 0.7, 0.8, 0.9, 0.95):
    res = run_experiment(parse_config(BASE + f"sybilbelief.w = {w}\n"))
    sweep = res.sweeps[500]
    print(f"w={w:.2f}  accepted {sweep.accepted_sybils:7.1f}  rejected {sweep.rejected_benign:7.1f}")

# %% [markdown]
# From about 0.7 upwards accepted Sybils level off. The rejected-benign column
# is dominated by whole trials in which the single Sybil label wins the race
# and the entire benign region is classified Sybil (999 rejections in one
# trial, averaged over three). The per-trial rows show it:
#
# The same runner writes CSV when given an output directory:

# %%
import tempfile
from pathlib import Path

with tempfile.TemporaryDirectory() as d:
    run_experiment(parse_config(BASE + "sybilbelief.w = 0.9\n"), out=d)
    print((Path(d) / "results.csv").read_text())
