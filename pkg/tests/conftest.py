import numpy as np
import pytest

from loopcast.graph import Network, karate_club


def make_net(n, edges, p):
    probs = np.full(len(edges), p) if np.isscalar(p) else np.asarray(p)
    return Network.from_edges(n, edges, probs)


TRIANGLE_EDGES = [(0, 1), (1, 2), (0, 2)]
C4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0)]
# two triangles sharing node 2
BOWTIE_EDGES = [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]
K4_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
PATH3_EDGES = [(0, 1), (1, 2)]


@pytest.fixture
def triangle():
    return make_net(3, TRIANGLE_EDGES, 0.5)


@pytest.fixture
def c4():
    return make_net(4, C4_EDGES, 0.5)


@pytest.fixture
def bowtie():
    return make_net(5, BOWTIE_EDGES, 0.5)


@pytest.fixture
def k4():
    return make_net(4, K4_EDGES, 0.5)


@pytest.fixture
def path3():
    return make_net(3, PATH3_EDGES, 1.0)


@pytest.fixture(scope="session")
def karate():
    return karate_club(0.15)


def random_connected_graph(rng, n_max=30, extra_edges=5, p_range=(0.1, 0.9)):
    """Random spanning tree plus a few chords; random per-edge probabilities."""
    n = int(rng.integers(3, n_max + 1))
    edges = set()
    order = rng.permutation(n)
    for j in range(1, n):
        u = int(order[int(rng.integers(0, j))])
        v = int(order[j])
        edges.add((min(u, v), max(u, v)))
    for _ in range(extra_edges):
        u, v = rng.integers(0, n, size=2)
        u, v = int(u), int(v)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)
    probs = rng.uniform(*p_range, size=len(edges))
    return Network.from_edges(n, edges, probs)


def random_tree(rng, n_max=50, p_range=(0.05, 0.95)):
    n = int(rng.integers(2, n_max + 1))
    edges = []
    order = rng.permutation(n)
    for j in range(1, n):
        u = int(order[int(rng.integers(0, j))])
        v = int(order[j])
        edges.append((min(u, v), max(u, v)))
    probs = rng.uniform(*p_range, size=len(edges))
    return Network.from_edges(n, sorted(edges), probs)
