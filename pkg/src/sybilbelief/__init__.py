"""Semi-supervised Sybil detection with pairwise MRFs and loopy belief propagation."""

from .baselines import ScoreVector, cia, random_rank, sybilrank
from .graph import (Graph, GraphError, ScenarioGraph, build_graph, degree,
                    largest_connected_component, load_edge_list, write_edge_list)
from .labels import LabelError, LabelSet, inject_noise, sample_labels
from .metrics import SweepResult, auc, confusion, default_size_grid, sweep_accepted_sybils
from .mrf import (Beliefs, MrfModel, MrfParams, boost, build_mrf, classify, detect_noisy_labels,
                  lbp_step, rank, run_lbp)
from .synth import (GeneratorSpec, compose_regions, duplicate_region_scenario,
                    gen_community_benign, gen_er, gen_pa)

__version__ = "0.1.0"
