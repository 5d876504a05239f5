"""Tests for topology builders and source-rate profiles."""

import math

import pytest

from asuman_sim.topology import (
    build_clustered,
    build_complete,
    build_grid,
    build_partial,
    build_ring,
    rate_profile_clustered,
    rate_profile_power_law,
    rate_profile_uniform,
)
from asuman_sim.types import HeadLinks, InvalidArgumentError, TopologyKind
from tests.utils import clustered_spec, complete_spec, ring_spec


class TestFlatTopologies:
    def test_complete_degrees(self):
        topo = build_complete(6)
        assert topo.kind is TopologyKind.COMPLETE
        assert all(topo.degree(i) == 5 for i in range(6))
        assert topo.edge_count == 15

    def test_single_node_has_no_neighbors(self):
        assert build_complete(1).neighbors(0) == ()

    def test_partial_keeps_complete_adjacency(self):
        topo = build_partial(5, 0.5)
        assert topo.q == 0.5
        assert topo.neighbors(0) == (1, 2, 3, 4)

    @pytest.mark.parametrize("q", [0.0, 1.5, float("nan")])
    def test_partial_rejects_bad_q(self, q):
        with pytest.raises(InvalidArgumentError):
            build_partial(5, q)

    def test_ring(self):
        topo = build_ring(5)
        assert topo.neighbors(0) == (1, 4)
        assert all(topo.degree(i) == 2 for i in range(5))

    def test_ring_needs_three_nodes(self):
        with pytest.raises(InvalidArgumentError):
            build_ring(2)

    def test_torus_degrees(self):
        topo = build_grid(3, 4)
        assert topo.n == 12
        assert all(topo.degree(i) == 4 for i in range(12))

    def test_open_grid_corners(self):
        topo = build_grid(3, 3, wrap=False)
        assert topo.degree(0) == 2
        assert topo.degree(4) == 4
        assert topo.neighbors(0) == (1, 3)

    def test_adjacency_text(self):
        assert build_ring(3).to_adjacency_text() == "0: 1 2\n1: 0 2\n2: 0 1\n"


class TestClustered:
    def test_layout(self):
        topo = build_clustered(3, 4)
        assert topo.n == 15
        assert topo.heads == (4, 9, 14)
        assert topo.head_of_cluster(1) == 9
        assert topo.cluster_leaves(1) == (5, 6, 7, 8)
        assert topo.cluster_of(7) == 1
        assert topo.is_head(14) and not topo.is_head(13)

    def test_complete_head_links(self):
        topo = build_clustered(3, 4, HeadLinks.COMPLETE)
        assert topo.degree(4) == 4 + 2
        assert topo.degree(0) == 4

    def test_disconnected_heads(self):
        topo = build_clustered(3, 2, HeadLinks.NONE)
        assert all(topo.degree(h) == 2 for h in topo.heads)

    def test_ring_heads(self):
        topo = build_clustered(5, 2, HeadLinks.RING)
        assert all(topo.degree(h) == 4 for h in topo.heads)
        assert 14 in topo.neighbors(2)

    def test_ring_heads_need_three_clusters(self):
        with pytest.raises(InvalidArgumentError):
            build_clustered(2, 3, HeadLinks.RING)

    def test_needs_two_leaves(self):
        with pytest.raises(InvalidArgumentError):
            build_clustered(3, 1)

    def test_flat_topology_has_no_clusters(self):
        with pytest.raises(InvalidArgumentError):
            build_complete(4).head_of_cluster(0)


class TestRateProfiles:
    def test_uniform(self):
        profile = rate_profile_uniform(2.0, 4)
        assert profile.per_node_rates == (0.5, 0.5, 0.5, 0.5)
        assert profile.total == 2.0

    def test_power_law_sums_to_lambda(self):
        profile = rate_profile_power_law(1.0, 0.5, 10)
        assert math.isclose(profile.total, 1.0, rel_tol=1e-12)
        rates = profile.per_node_rates
        assert all(a > b for a, b in zip(rates, rates[1:]))
        assert math.isclose(rates[0] / rates[1], 2.0)

    def test_power_law_nu_one_is_uniform(self):
        assert rate_profile_power_law(1.0, 1.0, 4) == rate_profile_uniform(1.0, 4)

    def test_power_law_rejects_nu(self):
        with pytest.raises(InvalidArgumentError):
            rate_profile_power_law(1.0, 1.5, 4)

    def test_clustered_feeds_only_heads(self):
        topo = build_clustered(2, 3)
        profile = rate_profile_clustered(1.0, topo)
        assert profile.per_node_rates == (0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5)

    def test_clustered_needs_clusters(self):
        with pytest.raises(InvalidArgumentError):
            rate_profile_clustered(1.0, build_complete(4))


class TestSpecRendering:
    def test_summary_is_flat_text(self):
        summary = ring_spec(8).summary()
        assert summary == "ring n=8 policy=asuman lambda_e=1 lambda=1 B=8"

    def test_summary_names_cluster_shape(self):
        summary = clustered_spec(3, 3, HeadLinks.RING).summary()
        assert summary.startswith("clustered n=12 c=3 m=3 head_links=ring policy=hierarchical_ring ")

    def test_summary_usable_as_dict_key(self):
        spec = complete_spec(5)
        table = {spec.summary(): 1}
        assert table[complete_spec(5).summary()] == 1
        assert spec.summary() != complete_spec(6).summary()
