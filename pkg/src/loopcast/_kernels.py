"""Numba kernels for the sampling, simulation, and enumeration hot loops.

All kernels work on local CSR adjacency arrays (indptr, nbr_node, nbr_edge)
so callers can pass either a whole network or a relabeled neighborhood
subgraph.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def reach_dist_from_act(indptr, nbr_node, nbr_edge, act, focal, n_nodes):
    """BFS distance from `focal` in each activation row of `act`.

    act : (S, E) bool, edge active flags per sample.
    Returns dist (S, n_nodes) int16 with -1 for unreachable nodes.
    """
    n_samples = act.shape[0]
    dist = np.full((n_samples, n_nodes), -1, dtype=np.int16)
    queue = np.empty(n_nodes, dtype=np.int64)
    for s in range(n_samples):
        dist[s, focal] = 0
        queue[0] = focal
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for idx in range(indptr[u], indptr[u + 1]):
                if not act[s, nbr_edge[idx]]:
                    continue
                v = nbr_node[idx]
                if dist[s, v] < 0:
                    dist[s, v] = dist[s, u] + 1
                    queue[tail] = v
                    tail += 1
    return dist


@njit(cache=True, nogil=True)
def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def nz_reach(eu, ev, perms, focal, n_nodes):
    """Incremental union-find reachability for Newman-Ziff sweeps.

    perms : (M, E) edge-addition orders.  Returns reach with M*(E+1) rows;
    row m*(E+1)+e flags the nodes in focal's cluster after adding the first
    e edges of sweep m.
    """
    n_sweeps, n_edges = perms.shape
    reach = np.zeros((n_sweeps * (n_edges + 1), n_nodes), dtype=np.bool_)
    parent = np.empty(n_nodes, dtype=np.int64)
    size = np.empty(n_nodes, dtype=np.int64)
    for m in range(n_sweeps):
        for v in range(n_nodes):
            parent[v] = v
            size[v] = 1
        base = m * (n_edges + 1)
        reach[base, focal] = True
        for e in range(n_edges):
            edge = perms[m, e]
            ra = _uf_find(parent, eu[edge])
            rb = _uf_find(parent, ev[edge])
            if ra != rb:
                if size[ra] < size[rb]:
                    ra, rb = rb, ra
                parent[rb] = ra
                size[ra] += size[rb]
            row = base + e + 1
            rf = _uf_find(parent, focal)
            for v in range(n_nodes):
                reach[row, v] = _uf_find(parent, v) == rf
    return reach


@njit(cache=True, nogil=True)
def mc_cascades(indptr, nbr_node, nbr_edge, edge_p, n_nodes,
                seed_nodes, uniform_seed, eligible,
                vaccinated, sentinels, n_sims, horizon, rng_seed):
    """Monte Carlo independent cascades.

    seed_nodes is used verbatim when uniform_seed is False; otherwise one
    seed per simulation is drawn uniformly from `eligible`.  Returns
      time_counts : (n, horizon+1) sims where node was first infected at t
      ever_counts : (n,) sims where node was ever infected
      det_counts  : (horizon+2,) first-sentinel-infection time histogram,
                    index horizon+1 meaning no detection within the horizon
      size_sum, size_sq_sum : accumulators for the final outbreak size.
    """
    np.random.seed(rng_seed)
    time_counts = np.zeros((n_nodes, horizon + 1), dtype=np.int64)
    ever_counts = np.zeros(n_nodes, dtype=np.int64)
    det_counts = np.zeros(horizon + 2, dtype=np.int64)
    size_sum = 0.0
    size_sq_sum = 0.0
    inf_time = np.empty(n_nodes, dtype=np.int64)
    frontier = np.empty(n_nodes, dtype=np.int64)
    nxt = np.empty(n_nodes, dtype=np.int64)
    for _ in range(n_sims):
        inf_time[:] = -1
        n_front = 0
        if uniform_seed:
            pick = eligible[int(np.random.random() * len(eligible)) % len(eligible)]
            inf_time[pick] = 0
            frontier[0] = pick
            n_front = 1
        else:
            for s in seed_nodes:
                inf_time[s] = 0
                frontier[n_front] = s
                n_front += 1
        t = 0
        size = n_front
        detected = -1
        for s in sentinels:
            if inf_time[s] == 0 and detected < 0:
                detected = 0
        while n_front > 0:
            t += 1
            n_next = 0
            for fi in range(n_front):
                u = frontier[fi]
                for idx in range(indptr[u], indptr[u + 1]):
                    v = nbr_node[idx]
                    if inf_time[v] >= 0 or vaccinated[v]:
                        continue
                    if np.random.random() < edge_p[nbr_edge[idx]]:
                        inf_time[v] = t
                        nxt[n_next] = v
                        n_next += 1
                        size += 1
            for fi in range(n_next):
                frontier[fi] = nxt[fi]
            n_front = n_next
        for v in range(n_nodes):
            tv = inf_time[v]
            if tv >= 0:
                ever_counts[v] += 1
                if tv <= horizon:
                    time_counts[v, tv] += 1
        dt = horizon + 1
        for s in sentinels:
            ts = inf_time[s]
            if 0 <= ts <= horizon and ts < dt:
                dt = ts
        det_counts[dt] += 1
        size_sum += size
        size_sq_sum += size * size
    return time_counts, ever_counts, det_counts, size_sum, size_sq_sum


@njit(cache=True, nogil=True)
def exact_bond_enumeration(indptr, nbr_node, nbr_edge, edge_p, n_nodes,
                           n_edges, seed_probs, sentinels, horizon):
    """Exact sum over all 2^E bond configurations.

    For each configuration, nodes within active-path distance t of a seed
    are infected by time t; seeds fire independently with probability
    seed_probs[k].  Returns cumulative marginals (n, horizon+1) and the
    cumulative detection probability (horizon+1,) for the sentinel set.
    """
    marg = np.zeros((n_nodes, horizon + 1), dtype=np.float64)
    det = np.zeros(horizon + 1, dtype=np.float64)
    surv = np.empty((n_nodes, horizon + 1), dtype=np.float64)
    surv_det = np.empty(horizon + 1, dtype=np.float64)
    dist = np.empty(n_nodes, dtype=np.int64)
    queue = np.empty(n_nodes, dtype=np.int64)
    seeds = np.nonzero(seed_probs > 0.0)[0]
    for cfg in range(1 << n_edges):
        w = 1.0
        for e in range(n_edges):
            if (cfg >> e) & 1:
                w *= edge_p[e]
            else:
                w *= 1.0 - edge_p[e]
        if w == 0.0:
            continue
        surv[:, :] = 1.0
        surv_det[:] = 1.0
        for k in seeds:
            # BFS from seed k over the active edges of this configuration
            dist[:] = -1
            dist[k] = 0
            queue[0] = k
            head, tail = 0, 1
            while head < tail:
                u = queue[head]
                head += 1
                for idx in range(indptr[u], indptr[u + 1]):
                    if not (cfg >> nbr_edge[idx]) & 1:
                        continue
                    v = nbr_node[idx]
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        queue[tail] = v
                        tail += 1
            q = 1.0 - seed_probs[k]
            for v in range(n_nodes):
                dv = dist[v]
                if 0 <= dv <= horizon:
                    for t in range(dv, horizon + 1):
                        surv[v, t] *= q
            dmin = horizon + 1
            for s in sentinels:
                if 0 <= dist[s] < dmin:
                    dmin = dist[s]
            if dmin <= horizon:
                for t in range(dmin, horizon + 1):
                    surv_det[t] *= q
        for v in range(n_nodes):
            for t in range(horizon + 1):
                marg[v, t] += w * (1.0 - surv[v, t])
        for t in range(horizon + 1):
            det[t] += w * (1.0 - surv_det[t])
    return marg, det
