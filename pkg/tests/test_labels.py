import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sybilbelief.graph import ScenarioGraph, build_graph
from sybilbelief.labels import LabelError, LabelSet, inject_noise, sample_labels
from sybilbelief.synth import GeneratorSpec, compose_regions, gen_pa


@pytest.fixture(scope="module")
def basic():
    b = gen_pa(GeneratorSpec("PA", 1000, 10.0, 1))
    s = gen_pa(GeneratorSpec("PA", 1000, 10.0, 2))
    return compose_regions(b, s, 500, 3)


def test_zero_labels_is_empty(basic):
    assert len(sample_labels(basic, 0, 0)) == 0


def test_single_cross_edge_sii_is_forced():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    sc = ScenarioGraph.from_regions(g, [False, False, True, True])
    labels = sample_labels(sc, 1, 1, "SII", 9)
    assert labels.as_dict() == {1: "B", 2: "S"}


def test_one_plus_one_uniform(basic):
    labels = sample_labels(basic, 1, 1, rng_seed=4)
    assert len(labels.benign_nodes) == 1 and len(labels.sybil_nodes) == 1
    assert not basic.is_sybil[labels.benign_nodes[0]]
    assert basic.is_sybil[labels.sybil_nodes[0]]


def test_site_policies(basic):
    ends = basic.attack_endpoints()
    si = sample_labels(basic, 50, 50, "SI", 1)
    sii = sample_labels(basic, 50, 50, "SII", 1)
    assert not ends[si.nodes].any()
    assert ends[sii.nodes].all()


def test_independent_sybil_policy(basic):
    labels = sample_labels(basic, 30, 30, "SI", 2, sybil_site_policy="SII")
    ends = basic.attack_endpoints()
    assert not ends[labels.benign_nodes].any()
    assert ends[labels.sybil_nodes].all()


def test_deficient_region_is_named():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    sc = ScenarioGraph.from_regions(g, [False, False, True, True])
    with pytest.raises(LabelError, match="Sybil region.*SII"):
        sample_labels(sc, 1, 2, "SII")


def test_groups_are_all_covered():
    b = gen_pa(GeneratorSpec("PA", 400, 10.0, 1))
    s = gen_pa(GeneratorSpec("PA", 100, 10.0, 2))
    sc = compose_regions(b, s, 20, 3)
    groups = np.arange(500) // 50
    labels = sample_labels(sc, 8, 1, rng_seed=5, benign_groups=groups)
    assert set(groups[labels.benign_nodes].tolist()) == set(range(8))


def test_flip_ten_of_hundred(basic):
    labels = sample_labels(basic, 100, 0, rng_seed=6)
    noisy = inject_noise(labels, 10, 0, 7)
    assert len(noisy.noisy_nodes) == 10
    assert noisy.sybil[noisy.noisy].all()
    assert noisy.sybil.sum() == 10


def test_flip_zero_is_identity(basic):
    labels = sample_labels(basic, 20, 20, rng_seed=6)
    assert inject_noise(labels, 0, 0, 1) == labels


def test_forty_nine_percent_noise(basic):
    labels = sample_labels(basic, 100, 100, rng_seed=8)
    noisy = inject_noise(labels, 49, 49, 9)
    assert len(noisy.noisy_nodes) == 98
    truth = basic.is_sybil[noisy.nodes]
    assert np.array_equal(noisy.sybil != truth, noisy.noisy)


def test_too_many_flips_errors(basic):
    labels = sample_labels(basic, 5, 5, rng_seed=1)
    with pytest.raises(LabelError):
        inject_noise(labels, 6, 0)


def test_label_set_rejects_duplicates():
    with pytest.raises(LabelError):
        LabelSet(np.array([1, 1]), np.array([False, True]), np.zeros(2, bool))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 2**32))
def test_sampling_properties(nb, ns, seed):
    b = gen_pa(GeneratorSpec("PA", 60, 6.0, 1))
    s = gen_pa(GeneratorSpec("PA", 60, 6.0, 2))
    sc = compose_regions(b, s, 30, 3)
    labels = sample_labels(sc, nb, ns, rng_seed=seed)
    assert len(np.unique(labels.nodes)) == nb + ns
    assert np.array_equal(labels.sybil, sc.is_sybil[labels.nodes])
    assert labels == sample_labels(sc, nb, ns, rng_seed=seed)
    assert labels.swapped().swapped() == labels
