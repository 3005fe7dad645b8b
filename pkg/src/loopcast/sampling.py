"""Percolation sampling over neighborhood edge sets.

Three interchangeable sample generators share the SampleSet container: plain
cascade-style sampling (independent Bernoulli edges, distances from BFS),
Newman-Ziff sweeps with binomial importance weights, and exact enumeration
of all 2^E configurations for small edge sets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import nz_reach, reach_dist_from_act
from .errors import ConfigError, UsageError
from .graph import Network, NodeSet

EXACT_EDGE_CAP = 20


@dataclass(frozen=True)
class PercolationSample:
    """One realization: active-edge flags, reachable set, and path lengths."""

    active_edges: np.ndarray
    reachable: NodeSet
    dist: dict
    weight: float


@dataclass
class SampleSet:
    """Frozen percolation realizations for one neighborhood owner.

    `nodes` lists the global ids of the neighborhood's nodes; `reach` and
    lazily computed distances are indexed by local node position.
    """

    focal: int
    sampler: str
    nodes: np.ndarray
    edge_ids: np.ndarray
    probs: np.ndarray
    act: np.ndarray
    weights: np.ndarray
    reach: np.ndarray
    _indptr: np.ndarray = field(repr=False)
    _nbr_node: np.ndarray = field(repr=False)
    _nbr_edge: np.ndarray = field(repr=False)
    _dist: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return self.act.shape[0]

    @property
    def focal_local(self):
        return int(np.searchsorted(self.nodes, self.focal))

    def dist(self):
        """(S, n_local) shortest active-path lengths from the focal node,
        -1 when unreachable.  Computed on first use and cached."""
        if self._dist is None:
            self._dist = reach_dist_from_act(
                self._indptr, self._nbr_node, self._nbr_edge,
                np.ascontiguousarray(self.act), self.focal_local,
                len(self.nodes))
        return self._dist

    def sample(self, m):
        dist_row = self.dist()[m]
        reachable = self.nodes[dist_row >= 0]
        return PercolationSample(
            active_edges=self.act[m].copy(),
            reachable=NodeSet(reachable),
            dist={int(self.nodes[j]): int(dist_row[j])
                  for j in range(len(self.nodes)) if dist_row[j] >= 0},
            weight=float(self.weights[m]),
        )


def _local_structure(net, edge_ids, focal):
    edge_ids = np.asarray(sorted(int(e) for e in edge_ids), dtype=np.int64)
    endpoints = {int(focal)}
    for e in edge_ids:
        endpoints.add(int(net.edge_u[e]))
        endpoints.add(int(net.edge_v[e]))
    nodes = np.asarray(sorted(endpoints), dtype=np.int64)
    loc = {int(v): j for j, v in enumerate(nodes)}
    eu = np.array([loc[int(net.edge_u[e])] for e in edge_ids], dtype=np.int64)
    ev = np.array([loc[int(net.edge_v[e])] for e in edge_ids], dtype=np.int64)
    n_loc = len(nodes)
    deg = np.zeros(n_loc, dtype=np.int64)
    for a, b in zip(eu, ev):
        deg[a] += 1
        deg[b] += 1
    indptr = np.zeros(n_loc + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    nbr_node = np.zeros(indptr[-1], dtype=np.int64)
    nbr_edge = np.zeros(indptr[-1], dtype=np.int64)
    cursor = indptr[:-1].copy()
    for j, (a, b) in enumerate(zip(eu, ev)):
        nbr_node[cursor[a]] = b
        nbr_edge[cursor[a]] = j
        cursor[a] += 1
        nbr_node[cursor[b]] = a
        nbr_edge[cursor[b]] = j
        cursor[b] += 1
    return edge_ids, nodes, eu, ev, indptr, nbr_node, nbr_edge


def _edge_probs(net, edge_ids, probs_override):
    if probs_override is None:
        return np.asarray(net.edge_p[edge_ids], dtype=np.float64)
    return np.asarray([probs_override[int(e)] for e in edge_ids], dtype=np.float64)


def sample_bfs(net: Network, edge_set, focal, M, rng, probs_override=None):
    """M percolation realizations via independent per-edge trials.

    Statistically identical to the early-stopping cascade exploration: each
    edge gets one Bernoulli(p) trial, and distances come from BFS restricted
    to the active edges.
    """
    if M < 1:
        raise ConfigError("M must be >= 1")
    edge_ids, nodes, eu, ev, indptr, nbr_node, nbr_edge = _local_structure(
        net, edge_set, focal)
    p = _edge_probs(net, edge_ids, probs_override)
    act = rng.random((M, len(edge_ids))) < p[None, :]
    dist = reach_dist_from_act(
        indptr, nbr_node, nbr_edge, np.ascontiguousarray(act),
        int(np.searchsorted(nodes, focal)), len(nodes))
    weights = np.full(M, 1.0 / M)
    return SampleSet(int(focal), "bfs", nodes, edge_ids, p, act, weights,
                     dist >= 0, indptr, nbr_node, nbr_edge, dist)


def newman_ziff_weight(E, e, p):
    """Binomial importance weight of an outcome with e of E edges active."""
    return math.comb(E, e) * p**e * (1.0 - p) ** (E - e)


def sample_newman_ziff(net: Network, edge_set, focal, M, rng,
                       probs_override=None):
    """M Newman-Ziff sweeps; each yields E+1 nested outcomes.

    Edges are added in random order with union-find cluster tracking; the
    outcome with e active edges carries weight C(E,e) p^e (1-p)^(E-e) / M.
    Requires a uniform edge probability.
    """
    if M < 1:
        raise ConfigError("M must be >= 1")
    edge_ids, nodes, eu, ev, indptr, nbr_node, nbr_edge = _local_structure(
        net, edge_set, focal)
    p_arr = _edge_probs(net, edge_ids, probs_override)
    E = len(edge_ids)
    if E and not np.all(p_arr == p_arr[0]):
        raise ConfigError(
            "Newman-Ziff sampling requires a uniform edge probability")
    p = float(p_arr[0]) if E else 0.0
    perms = np.argsort(rng.random((M, E)), axis=1) if E else \
        np.zeros((M, 0), dtype=np.int64)
    reach = nz_reach(eu, ev, perms, int(np.searchsorted(nodes, focal)),
                     len(nodes))
    # activation rows follow the sweep's nesting: row m*(E+1)+e activates
    # the first e edges of permutation m
    ranks = np.empty_like(perms)
    if E:
        rows = np.arange(M)[:, None]
        ranks[rows, perms] = np.arange(E)[None, :]
    act = (ranks[:, None, :] < np.arange(E + 1)[None, :, None]).reshape(
        M * (E + 1), E)
    w_row = np.array([newman_ziff_weight(E, e, p) for e in range(E + 1)])
    weights = np.tile(w_row / M, M)
    return SampleSet(int(focal), "nz", nodes, edge_ids, p_arr, act, weights,
                     reach, indptr, nbr_node, nbr_edge, None)


def enumerate_exact(net: Network, edge_set, focal, probs_override=None):
    """All 2^E configurations with their exact product-form weights."""
    edge_ids, nodes, eu, ev, indptr, nbr_node, nbr_edge = _local_structure(
        net, edge_set, focal)
    E = len(edge_ids)
    if E > EXACT_EDGE_CAP:
        raise ConfigError(
            f"exact enumeration capped at {EXACT_EDGE_CAP} edges, got {E}")
    p = _edge_probs(net, edge_ids, probs_override)
    cfgs = np.arange(1 << E, dtype=np.int64)
    act = ((cfgs[:, None] >> np.arange(E)[None, :]) & 1).astype(bool)
    weights = np.prod(np.where(act, p[None, :], 1.0 - p[None, :]), axis=1) \
        if E else np.ones(1)
    dist = reach_dist_from_act(
        indptr, nbr_node, nbr_edge, np.ascontiguousarray(act),
        int(np.searchsorted(nodes, focal)), len(nodes))
    return SampleSet(int(focal), "exact", nodes, edge_ids, p, act, weights,
                     dist >= 0, indptr, nbr_node, nbr_edge, dist)


SAMPLERS = {"bfs": sample_bfs, "nz": sample_newman_ziff}


def estimate_reachability(ss: SampleSet, k):
    """Weighted fraction of realizations in which node k is reachable."""
    j = np.searchsorted(ss.nodes, k)
    if j >= len(ss.nodes) or ss.nodes[j] != k:
        raise UsageError(f"node {k} is not in the neighborhood node set")
    total = ss.weights.sum()
    return float(np.dot(ss.weights, ss.reach[:, j]) / total)


_STREAM_KINDS = {"marginal": 0, "message": 1, "oracle": 2, "experiment": 3}


def owner_rng(master_seed, kind, a, b=0):
    """Counter-based per-owner stream: reproducible and order-independent."""
    return np.random.default_rng(np.random.SeedSequence(
        entropy=(int(master_seed), _STREAM_KINDS[kind], int(a), int(b))))


def reachability_json(sample_sets):
    """Debug dump: per-owner reachability estimates for every node."""
    out = {}
    for key, ss in sample_sets.items():
        out[str(key)] = {
            int(v): estimate_reachability(ss, int(v)) for v in ss.nodes}
    return json.dumps(out, sort_keys=True)
