"""Checks against the public Facebook edge list, run only when it is available.

Point ``SYBILBELIEF_FACEBOOK`` at the edge-list file to enable them.
"""

import os

import pytest

from sybilbelief.graph import largest_connected_component, load_edge_list
from sybilbelief.synth import duplicate_region_scenario

PATH = os.environ.get("SYBILBELIEF_FACEBOOK")
pytestmark = pytest.mark.skipif(not PATH, reason="SYBILBELIEF_FACEBOOK not set")


@pytest.fixture(scope="module")
def facebook():
    with open(PATH) as f:
        return largest_connected_component(load_edge_list(f))[0]


def test_dataset_statistics(facebook):
    assert facebook.node_count == 43953
    assert facebook.m == 182384
    # 8.2991..., reported truncated to two places
    assert int(200 * facebook.m / facebook.node_count) / 100 == 8.29


def test_duplicated_facebook_size(facebook):
    assert duplicate_region_scenario(facebook, 3000, 0).graph.node_count == 87906
