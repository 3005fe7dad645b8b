"""Ground-truth engines for the independent cascade model.

Two routes to the same distribution: stochastic simulation of the temporal
process, and exact enumeration over the 2^E bond configurations (feasible on
tiny graphs).  Both report marginals, outbreak sizes, and the detection-time
distribution for a sentinel set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import exact_bond_enumeration, mc_cascades
from .errors import ConfigError, UsageError
from .graph import Network, NodeSet, bfs_distances

EXACT_EDGE_CAP = 20


@dataclass(frozen=True)
class CascadeTrace:
    """One realization: per-node infection times (absent = never infected)."""

    infection_time: dict
    final_size: int


@dataclass
class OracleEstimate:
    marginals: np.ndarray          # per-node P(ever infected)
    marginals_t: np.ndarray        # (n, horizon+1) cumulative P(infected by t)
    expected_size: float
    detection: np.ndarray | None   # (horizon+2,) mass; last entry = never
    n_sims: int | None
    std_err: np.ndarray
    size_se: float = 0.0           # standard error of the expected size


def simulate_cascade(net: Network, seeds, vaccinated=None, rng=None):
    """Single discrete-time cascade: every newly infected node attempts each
    susceptible neighbor once with the edge probability."""
    rng = rng or np.random.default_rng()
    vacc = set(int(v) for v in vaccinated) if vaccinated else set()
    seed_list = [int(v) for v in seeds]
    if vacc & set(seed_list):
        raise UsageError("seed and vaccinated sets overlap")
    times = {v: 0 for v in seed_list}
    frontier = list(seed_list)
    t = 0
    while frontier:
        t += 1
        nxt = []
        for u in frontier:
            for v, e in zip(net.neighbors(u), net.incident_edges(u)):
                v = int(v)
                if v in times or v in vacc:
                    continue
                if rng.random() < net.edge_p[e]:
                    times[v] = t
                    nxt.append(v)
        frontier = nxt
    return CascadeTrace(times, len(times))


def _seed_arrays(net, seeds, vaccinated, sentinels):
    vacc = np.zeros(net.node_count, dtype=np.bool_)
    if vaccinated is not None:
        vacc[[int(v) for v in vaccinated]] = True
    sent = np.asarray(sorted(int(v) for v in sentinels) if sentinels else [],
                      dtype=np.int64)
    return vacc, sent


def mc_estimate(net: Network, seeds=None, uniform_seed_over=None,
                vaccinated=None, sentinels=None, n_sims=10_000,
                horizon=None, seed=0):
    """Monte Carlo estimate of marginals, outbreak size, and detection times.

    Either `seeds` (a fixed set, infected at t=0) or `uniform_seed_over`
    (one seed per simulation, uniform over the given nodes) must be given.
    """
    if n_sims < 1:
        raise ConfigError("n_sims must be >= 1")
    if (seeds is None) == (uniform_seed_over is None):
        raise UsageError("give exactly one of seeds / uniform_seed_over")
    if horizon is None:
        horizon = default_horizon(net)
    vacc, sent = _seed_arrays(net, seeds, vaccinated, sentinels)
    if seeds is not None:
        seed_nodes = np.asarray(sorted(int(v) for v in seeds), dtype=np.int64)
        if np.any(vacc[seed_nodes]):
            raise UsageError("seed and vaccinated sets overlap")
        eligible = np.zeros(1, dtype=np.int64)
        uniform = False
    else:
        eligible = np.asarray(sorted(int(v) for v in uniform_seed_over),
                              dtype=np.int64)
        seed_nodes = np.zeros(1, dtype=np.int64)
        uniform = True
    time_counts, ever_counts, det_counts, size_sum, size_sq = mc_cascades(
        net.adj_indptr, net.adj_node, net.adj_edge,
        np.asarray(net.edge_p), net.node_count,
        seed_nodes, uniform, eligible, vacc, sent,
        int(n_sims), int(horizon), int(seed))
    marg = ever_counts / n_sims
    marg_t = np.cumsum(time_counts, axis=1) / n_sims
    mean_size = size_sum / n_sims
    var_size = max(size_sq / n_sims - mean_size**2, 0.0)
    detection = det_counts / n_sims if sentinels else None
    std_err = np.sqrt(np.maximum(marg * (1 - marg), 0.0) / n_sims)
    return OracleEstimate(marg, marg_t, float(mean_size), detection,
                          int(n_sims), std_err,
                          float(np.sqrt(var_size / n_sims)))


def exact_enumerate(net: Network, seeds=None, seed_probs=None,
                    vaccinated=None, sentinels=None, horizon=None):
    """Exact marginals by summing over all 2^E bond configurations.

    Seeds may be a node set (infected with probability 1) or an arbitrary
    vector of independent per-node seeding probabilities.
    """
    if (seeds is None) == (seed_probs is None):
        raise UsageError("give exactly one of seeds / seed_probs")
    work = net
    if vaccinated is not None and len(list(vaccinated)):
        work = net.with_zeroed_edges(vaccinated)
    # p = 0 edges can never be active; drop them to keep 2^E small
    live = np.nonzero(np.asarray(work.edge_p) > 0.0)[0]
    pruned = Network.from_edges(
        work.node_count,
        [(int(work.edge_u[e]), int(work.edge_v[e])) for e in live],
        np.asarray(work.edge_p)[live])
    if pruned.edge_count > EXACT_EDGE_CAP:
        raise ConfigError(
            f"exact enumeration capped at {EXACT_EDGE_CAP} edges, "
            f"got {pruned.edge_count}")
    if horizon is None:
        horizon = default_horizon(net)
    s = np.zeros(net.node_count)
    if seeds is not None:
        s[[int(v) for v in seeds]] = 1.0
    else:
        s = np.asarray(seed_probs, dtype=np.float64).copy()
    if vaccinated is not None:
        vacc_ids = [int(v) for v in vaccinated]
        if np.any(s[vacc_ids] > 0):
            raise UsageError("seed and vaccinated sets overlap")
    _, sent = _seed_arrays(net, None, None, sentinels)
    # active-path lengths can exceed the graph diameter, so enumerate far
    # enough out that the final column is the true t -> infinity marginal
    horizon_full = max(int(horizon), net.node_count - 1)
    marg_t, det_cum = exact_bond_enumeration(
        pruned.adj_indptr, pruned.adj_node, pruned.adj_edge,
        np.asarray(pruned.edge_p), pruned.node_count, pruned.edge_count,
        s, sent, int(horizon_full))
    detection = None
    if sentinels:
        detection = np.zeros(horizon + 2)
        detection[0] = det_cum[0]
        detection[1:horizon + 1] = np.diff(det_cum[:horizon + 1])
        detection[horizon + 1] = 1.0 - det_cum[horizon]
    marg = marg_t[:, -1]
    return OracleEstimate(marg, marg_t[:, :horizon + 1], float(marg.sum()),
                          detection, None, np.zeros(net.node_count))


def default_horizon(net):
    """Diameter plus slack when connected, else the node count."""
    dist = bfs_distances(net, 0)
    if np.any(dist < 0):
        return net.node_count
    span = max(int(bfs_distances(net, i).max()) for i in range(net.node_count))
    return span + 5


def detection_cumulative(est: OracleEstimate):
    """Cumulative detection probability curve from a detection distribution."""
    if est.detection is None:
        raise UsageError("estimate has no sentinel detection distribution")
    return np.cumsum(est.detection[:-1])
