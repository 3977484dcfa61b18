# %% [markdown]
# # Basic setup: one benign label, one Sybil label
#
# A 1000-node preferential-attachment benign region meets a PA Sybil region of
# growing size through 500 random attack edges. We label one node on each
# side, run loopy belief propagation and count mistakes among the unlabelled
# nodes.

# %%
import numpy as np

from sybilbelief import (GeneratorSpec, MrfParams, build_mrf, classify, compose_regions, confusion,
                         gen_pa, sample_labels, run_lbp)

benign = gen_pa(GeneratorSpec("PA", 1000, 10.0, rng_seed=1))
sybil = gen_pa(GeneratorSpec("PA", 1000, 10.0, rng_seed=2))
scenario = compose_regions(benign, sybil, attack_edge_count=500, rng_seed=3)
print(scenario.graph.node_count, "nodes,", scenario.graph.m, "edges,",
      len(scenario.attack_edges), "attack edges")

# %% [markdown]
# The model: uninformative node priors (theta = 0.5) and homophilic edges
# (w = 0.9). Labels clamp their node.

# %%
labels = sample_labels(scenario, 1, 1, rng_seed=4)
model = build_mrf(scenario, labels, MrfParams(w_default=0.9))
beliefs = run_lbp(model, max_iters=10, tol=1e-3)
print("iterations", beliefs.iterations_run, "converged", beliefs.converged)

fn, fp = confusion(classify(beliefs), scenario, exclude=labels.nodes)
print(f"Sybils accepted: {fn}, benign rejected: {fp}")

# %% [markdown]
# Posterior mass splits cleanly by region when propagation from the two
# labels reaches its own side first.

# %%
pb = beliefs.p_benign
print("mean P(benign) benign region", pb[~scenario.is_sybil].mean().round(3))
print("mean P(benign) Sybil region ", pb[scenario.is_sybil].mean().round(3))

# %% [markdown]
# ## Sweeping the Sybil region size
#
# Accepted Sybils is the worst false-negative count over Sybil sizes. Each trial
# draws a fresh benign region; small trial counts keep this quick.

# %%
from sybilbelief import default_size_grid, sweep_accepted_sybils


def sb(scenario, labels, seed):
    return classify(run_lbp(build_mrf(scenario, labels, MrfParams())))


def one_each(scenario, seed):
    return sample_labels(scenario, 1, 1, rng_seed=seed)


grid = default_size_grid(1000)
res = sweep_accepted_sybils(lambda s: gen_pa(GeneratorSpec("PA", 1000, 10.0, s)), 500,
                            GeneratorSpec("PA", 1000, 10.0), grid, sb, one_each,
                            trials_per_size=3, rng_seed=0)
for size, f, p in zip(grid, res.mean_fn, res.mean_fp):
    print(f"{size:5d} Sybils: FN {f:7.1f}  FP {p:7.1f}")
print("accepted", res.accepted_sybils, "rejected", res.rejected_benign)

# %% [markdown]
# With a single label per side the outcome is sensitive to which label's
# influence wins the race across the attack edges, and a trial can tip the
# whole graph one way. More labels make the sweep far more stable:

# %%
res100 = sweep_accepted_sybils(lambda s: gen_pa(GeneratorSpec("PA", 1000, 10.0, s)), 500,
                               GeneratorSpec("PA", 1000, 10.0), grid, sb,
                               lambda sc, s: sample_labels(sc, 100, 100, rng_seed=s),
                               trials_per_size=3, rng_seed=0)
print("100+100 labels: accepted", res100.accepted_sybils, "rejected", res100.rejected_benign)
print(np.round(res100.mean_fn, 1))
