import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcast.errors import ConfigError, UsageError
from loopcast.neighborhoods import (build_all_neighborhoods,
                                    build_conditional, build_message_index,
                                    build_neighborhood,
                                    neighborhood_size_csv)

from conftest import make_net, random_connected_graph
import numpy as np


def test_r0_is_incident_edges(karate):
    for i in range(karate.node_count):
        nb = build_neighborhood(karate, i, 0)
        assert nb.edge_set == frozenset(int(e) for e in karate.incident_edges(i))


def test_triangle_r1_covers_everything(triangle):
    nb = build_neighborhood(triangle, 0, 1)
    assert nb.edge_set == frozenset(range(3))
    assert list(nb.node_set) == [0, 1, 2]


def test_c4_needs_r2(c4):
    # a 4-cycle is length r+2 only from r=2 onward
    nb1 = build_neighborhood(c4, 0, 1)
    assert nb1.edge_set == frozenset(int(e) for e in c4.incident_edges(0))
    nb2 = build_neighborhood(c4, 0, 2)
    assert nb2.edge_set == frozenset(range(4))


def test_bowtie_r1_keeps_far_triangle_out(bowtie):
    nb = build_neighborhood(bowtie, 0, 1)
    e34 = bowtie.edge_index(3, 4)
    assert e34 not in nb.edge_set
    assert bowtie.edge_index(0, 1) in nb.edge_set
    assert bowtie.edge_index(1, 2) in nb.edge_set
    # the hub sees both triangles
    hub = build_neighborhood(bowtie, 2, 1)
    assert hub.edge_set == frozenset(range(6))


def test_radius_validation(triangle):
    with pytest.raises(ConfigError):
        build_neighborhood(triangle, 0, 5, r_max=4)
    with pytest.raises(ConfigError):
        build_neighborhood(triangle, 0, -1)
    with pytest.raises(UsageError):
        build_neighborhood(triangle, 7, 1)


def test_conditional_difference(bowtie):
    nb2 = build_neighborhood(bowtie, 2, 1)
    nb0 = build_neighborhood(bowtie, 0, 1)
    cond = build_conditional(nb2, nb0)
    assert cond.edge_set == nb2.edge_set - nb0.edge_set
    with pytest.raises(UsageError):
        build_conditional(nb2, nb2)


def test_message_count_karate_r0(karate):
    mi = build_message_index(karate, 0)
    # one message per directed edge
    assert len(mi) == 2 * karate.edge_count == 156
    assert all(k != i for k, i in mi.pairs)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 3))
def test_neighborhoods_grow_with_radius(seed, r):
    net = random_connected_graph(np.random.default_rng(seed), n_max=12)
    for i in range(net.node_count):
        small = build_neighborhood(net, i, r).edge_set
        big = build_neighborhood(net, i, r + 1).edge_set
        assert small <= big
        assert frozenset(int(e) for e in net.incident_edges(i)) <= small


def test_size_csv(karate):
    text = neighborhood_size_csv(karate, 0)
    lines = text.strip().split("\n")
    assert lines[0] == "node,edges,nodes"
    assert len(lines) == 35
