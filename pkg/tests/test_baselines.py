import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_connected
from sybilbelief.baselines import cia, cia_residual, random_rank, sybilrank, walk_transpose
from sybilbelief.graph import ScenarioGraph, build_graph
from sybilbelief.labels import LabelError, LabelSet
from sybilbelief.synth import GeneratorSpec, duplicate_region_scenario, gen_pa

TRIANGLE = build_graph(3, [(0, 1), (1, 2), (0, 2)])


def test_sybilrank_triangle_by_hand():
    s = sybilrank(TRIANGLE, LabelSet.from_dict({0: "B"}))
    assert s.iterations == 2
    np.testing.assert_allclose(s.scores, [0.25, 0.125, 0.125])
    assert int(np.argmax(s.scores)) == 0


def test_sybilrank_unreachable_node_scores_zero():
    g = build_graph(3, [(0, 2)])
    s = sybilrank(g, LabelSet.from_dict({0: "B"}), iterations=7)
    assert s.scores[1] == 0.0


def test_sybilrank_disconnected_duplicate():
    base = gen_pa(GeneratorSpec("PA", 200, 10.0, 1))
    sc = duplicate_region_scenario(base, 0, 0)
    s = sybilrank(sc, LabelSet.from_dict({3: "B", 50: "B"}))
    assert (s.scores[sc.is_sybil] == 0).all()
    assert (s.scores[~sc.is_sybil] > 0).all()


def test_sybilrank_label_errors():
    with pytest.raises(LabelError):
        sybilrank(TRIANGLE, LabelSet.empty())
    with pytest.raises(LabelError):
        sybilrank(TRIANGLE, LabelSet.from_dict({0: "B", 1: "S"}))


def test_sybilrank_natural_log_option():
    s = sybilrank(gen_pa(GeneratorSpec("PA", 1000, 10.0, 1)), LabelSet.from_dict({0: "B"}),
                  log_base=np.e)
    assert s.iterations == 7


def test_cia_two_nodes_exact():
    g = build_graph(2, [(0, 1)])
    s = cia(g, LabelSet.from_dict({1: "S"}), tol=1e-12)
    pb = 0.15 / (1 - 0.85 ** 2)
    np.testing.assert_allclose(s.scores, [pb, 1 - pb], atol=1e-9)
    assert s.scores[0] == pytest.approx(0.540541, abs=1e-6)
    assert s.scores[1] == pytest.approx(0.459459, abs=1e-6)


def test_cia_alpha_zero_is_restart_vector():
    s = cia(TRIANGLE, LabelSet.from_dict({2: "S"}), alpha=0.0)
    np.testing.assert_allclose(1 - s.scores, [0, 0, 1])
    assert int(np.argmin(s.scores)) == 2


def test_cia_unreachable_node_reputation_one():
    g = build_graph(4, [(0, 1), (2, 3)])
    s = cia(g, LabelSet.from_dict({0: "S"}))
    assert s.scores[2] == 1.0 and s.scores[3] == 1.0


def test_cia_label_errors():
    with pytest.raises(LabelError):
        cia(TRIANGLE, LabelSet.empty())
    with pytest.raises(LabelError):
        cia(TRIANGLE, LabelSet.from_dict({0: "B"}))


def test_isolated_node_keeps_mass():
    wt = walk_transpose(build_graph(3, [(0, 1)]))
    assert wt[2, 2] == 1.0
    np.testing.assert_allclose(np.asarray(wt.sum(axis=0)).ravel(), 1.0)


def test_random_rank_properties():
    sc = build_graph(50, [])
    a, b = random_rank(sc, 3), random_rank(sc, 3)
    assert np.array_equal(a.scores, b.scores)
    assert ((a.scores >= 0) & (a.scores < 1)).all()


def test_random_rank_mean_auc_near_half():
    from sybilbelief.metrics import auc
    g = build_graph(200, [])
    sc = ScenarioGraph.from_regions(g, np.arange(200) >= 100)
    vals = [auc(random_rank(sc, s), sc) for s in range(200)]
    assert abs(np.mean(vals) - 0.5) < 0.01


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32), st.integers(1, 20))
def test_sybilrank_conserves_mass(n, seed, iters):
    r = np.random.default_rng(seed)
    g = build_graph(n, random_connected(r, n, n // 2))
    seeds = r.choice(n, size=int(r.integers(1, n + 1)), replace=False)
    s = sybilrank(g, LabelSet.from_dict({int(v): "B" for v in seeds}), iterations=iters)
    assert (s.scores * g.degrees).sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32), st.floats(0.0, 0.95))
def test_cia_fixed_point_residual(n, seed, alpha):
    r = np.random.default_rng(seed)
    g = build_graph(n, random_connected(r, n, n // 2))
    labels = LabelSet.from_dict({int(v): "S" for v in r.choice(n, size=2 if n > 2 else 1, replace=False)})
    s = cia(g, labels, alpha=alpha)
    assert s.converged
    assert cia_residual(g, labels, s, alpha) < 1e-6
    assert cia(g, labels, alpha=alpha).scores.tolist() == s.scores.tolist()
