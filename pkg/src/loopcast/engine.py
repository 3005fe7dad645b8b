"""Message-passing engines: classical pairwise MP and neighborhood MP.

Both engines run a synchronous (Jacobi) schedule and store the full time
history of every message and marginal; infection is absorbing, so all values
are monotone nondecreasing in t.  Values at negative times are 0 and the
t = 0 column carries the initial infection probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import json

import numpy as np

from .errors import ConfigError, UsageError
from .graph import Network, NodeSet, bfs_distances
from .neighborhoods import DEFAULT_R_MAX, build_message_index
from .sampling import (SampleSet, enumerate_exact, owner_rng, sample_bfs,
                       sample_newman_ziff)


@dataclass
class EngineConfig:
    r: int
    M: int = 1500
    T: int | None = None
    tol: float = 1e-6
    sampler: str = "bfs"  # bfs | nz | exact
    master_seed: int = 0
    r_max: int = DEFAULT_R_MAX

    def __post_init__(self):
        if self.r < 0 or self.r > self.r_max:
            raise ConfigError(f"r must lie in [0, r_max={self.r_max}]")
        if self.M < 1:
            raise ConfigError("M must be >= 1")
        if self.T is not None and self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be > 0")
        if self.sampler not in ("bfs", "nz", "exact"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")


@dataclass
class MarginalHistory:
    """Per-node infection marginals pi[i, t] for t = 0..T."""

    pi: np.ndarray

    @property
    def horizon(self):
        return self.pi.shape[1] - 1

    @property
    def final(self):
        return self.pi[:, -1]

    def to_json(self):
        return json.dumps({str(i): [float(x) for x in row]
                           for i, row in enumerate(self.pi)})


@dataclass
class MessageState:
    """Time-indexed message values, aligned with `pairs`."""

    pairs: tuple
    values: np.ndarray

    @property
    def horizon(self):
        return self.values.shape[1] - 1


def seed_vector(net: Network, nodes=None, uniform_over=None):
    """Initial-infection vector: indicator of `nodes`, or uniform mass
    1/len(uniform_over) on each eligible node."""
    s = np.zeros(net.node_count)
    if nodes is not None:
        s[[int(v) for v in nodes]] = 1.0
    if uniform_over is not None:
        elig = [int(v) for v in uniform_over]
        s[elig] = 1.0 / len(elig)
    return s


class _Compiled:
    """Flattened update schedule for one owner family (messages/marginals).

    For sample row q of owner o the incoming factors are the entries in
    [ptr[q], ptr[q+1]): each names an incoming message id and its active-path
    length.  Weighted per-sample values aggregate into owner values.
    """

    def __init__(self, owners):
        # owners: list of (sample_set, src_node, in_msg_of_local_col, drop_cols)
        sample_owner, sample_w, src_node = [], [], []
        ptrs = [0]
        entry_msg, entry_ell = [], []
        for o, (ss, src, col_msg, col_drop) in enumerate(owners):
            dist = ss.dist()
            mask = dist >= 1
            if col_drop is not None:
                mask &= ~col_drop[None, :]
            rows, cols = np.nonzero(mask)
            counts = np.bincount(rows, minlength=len(ss))
            entry_msg.append(col_msg[cols])
            entry_ell.append(dist[rows, cols].astype(np.int64))
            base = ptrs[-1]
            ptrs.extend((base + np.cumsum(counts)).tolist())
            w = ss.weights / ss.weights.sum()
            sample_w.append(w)
            sample_owner.append(np.full(len(ss), o, dtype=np.int64))
            src_node.append(np.full(len(ss), src, dtype=np.int64))
        self.n_owners = len(owners)
        self.sample_owner = np.concatenate(sample_owner)
        self.sample_w = np.concatenate(sample_w)
        self.sample_src = np.concatenate(src_node)
        self.ptr = np.asarray(ptrs, dtype=np.int64)
        self.entry_msg = np.concatenate(entry_msg) if entry_msg else \
            np.zeros(0, dtype=np.int64)
        self.entry_ell = np.concatenate(entry_ell) if entry_ell else \
            np.zeros(0, dtype=np.int64)
        self.empty = np.diff(self.ptr) == 0
        self.ell_max = int(self.entry_ell.max()) if len(self.entry_ell) else 0

    def sweep(self, msg_hist, t, s):
        """Owner values at time t from the message history before t."""
        tau = t - self.entry_ell
        vals = msg_hist[self.entry_msg, np.maximum(tau, 0)]
        vals[tau < 0] = 0.0
        f = np.empty(len(vals) + 1)
        f[:-1] = 1.0 - vals
        f[-1] = 1.0
        if len(self.ptr) > 1:
            prod = np.multiply.reduceat(f, self.ptr[:-1])
        else:
            prod = np.ones(0)
        prod[self.empty] = 1.0
        s_own = s[self.sample_src]
        value = s_own + (1.0 - s_own) * (1.0 - prod)
        return np.bincount(self.sample_owner, weights=self.sample_w * value,
                           minlength=self.n_owners)


class NmpSystem:
    """Frozen neighborhoods + percolation samples for one configuration.

    Samples are generated once at construction and reused for every run, so
    repeated runs with different seed vectors share the same realizations.
    With a `blocked` set, edges adjacent to blocked nodes (other than the
    sampling owner's own focal node) get p = 0 and blocked nodes contribute
    factor 1 to every product.
    """

    def __init__(self, net: Network, cfg: EngineConfig, blocked=None):
        self.net = net
        self.cfg = cfg
        self.blocked = frozenset(int(v) for v in blocked) if blocked else frozenset()
        self.mindex = build_message_index(net, cfg.r, cfg.r_max)
        nbhds = self.mindex.neighborhoods

        base_p = np.array(net.edge_p)
        if self.blocked:
            zeroed = base_p.copy()
            for e, (u, v) in enumerate(zip(net.edge_u, net.edge_v)):
                if int(u) in self.blocked or int(v) in self.blocked:
                    zeroed[e] = 0.0
        else:
            zeroed = base_p

        def probs_for(focal):
            if not self.blocked or focal not in self.blocked:
                return zeroed
            # keep the focal sentinel's own incident edges samplable so the
            # cascade can still reach it
            p = zeroed.copy()
            for v, e in zip(net.neighbors(focal), net.incident_edges(focal)):
                if int(v) not in self.blocked:
                    p[e] = base_p[e]
            return p

        def draw(edge_set, focal, kind, a, b=0):
            if cfg.sampler == "exact":
                return enumerate_exact(net, edge_set, focal,
                                       probs_override=probs_for(focal))
            rng = owner_rng(cfg.master_seed, kind, a, b)
            fn = sample_bfs if cfg.sampler == "bfs" else sample_newman_ziff
            return fn(net, edge_set, focal, cfg.M, rng,
                      probs_override=probs_for(focal))

        self.marg_sets = [draw(nbhds[i].edge_set, i, "marginal", i)
                          for i in range(net.node_count)]
        self.msg_sets = [
            draw(nbhds[k].edge_set - nbhds[i].edge_set, k, "message", k, i)
            for (k, i) in self.mindex.pairs]

        def owner_spec(ss, owner_node):
            col_msg = np.array(
                [self.mindex.index.get((int(g), owner_node), -1)
                 for g in ss.nodes], dtype=np.int64)
            col_drop = np.array([int(g) in self.blocked for g in ss.nodes]) \
                if self.blocked else None
            return ss, owner_node, col_msg, col_drop

        self._msg_compiled = _Compiled(
            [owner_spec(ss, k) for ss, (k, i) in
             zip(self.msg_sets, self.mindex.pairs)])
        self._marg_compiled = _Compiled(
            [owner_spec(ss, i) for i, ss in enumerate(self.marg_sets)])
        self.ell_max = max(self._msg_compiled.ell_max,
                           self._marg_compiled.ell_max)

    def default_horizon(self):
        dist = bfs_distances(self.net, 0)
        if np.all(dist >= 0):
            span = max(int(bfs_distances(self.net, i).max())
                       for i in range(self.net.node_count))
        else:
            span = self.net.node_count
        return max(1, span + self.ell_max + 5)

    def run(self, s):
        """Synchronous sweeps for t = 1..T; returns full histories."""
        s = np.asarray(s, dtype=np.float64)
        if s.shape != (self.net.node_count,):
            raise UsageError("seed vector length must equal node count")
        if np.any((s < 0) | (s > 1)):
            raise UsageError("seed probabilities must lie in [0,1]")
        T = self.cfg.T if self.cfg.T is not None else self.default_horizon()
        if T < self.ell_max:
            raise ConfigError(
                f"horizon T={T} too small for path-length lookback; "
                f"need T >= {self.ell_max}")
        n_msgs = len(self.mindex)
        msg_hist = np.zeros((n_msgs, T + 1))
        msg_hist[:, 0] = s[[k for (k, _) in self.mindex.pairs]] if n_msgs else 0.0
        marg_hist = np.zeros((self.net.node_count, T + 1))
        marg_hist[:, 0] = s
        for t in range(1, T + 1):
            msg_hist[:, t] = self._msg_compiled.sweep(msg_hist, t, s)
            marg_hist[:, t] = self._marg_compiled.sweep(msg_hist, t, s)
        return MarginalHistory(marg_hist), MessageState(self.mindex.pairs,
                                                        msg_hist)


def run_nmp(net, s, cfg, blocked=None):
    """One-shot NMP run; builds the sample system and sweeps to T."""
    return NmpSystem(net, cfg, blocked).run(s)


def classical_mp(net: Network, s, cfg: EngineConfig):
    """Classical pairwise message passing (exact products, no sampling)."""
    if cfg.r != 0:
        raise ConfigError("classical MP is the r=0 engine")
    s = np.asarray(s, dtype=np.float64)
    n, E = net.node_count, net.edge_count
    T = cfg.T if cfg.T is not None else net.node_count + 5
    # directed message ids: 2e is pi_{u\v}, 2e+1 is pi_{v\u} for edge e=(u,v)
    pairs = []
    for e in range(E):
        pairs.append((int(net.edge_u[e]), int(net.edge_v[e])))
        pairs.append((int(net.edge_v[e]), int(net.edge_u[e])))
    in_ids, out_ids, in_p = [], [], []
    for i in range(n):
        nbrs = net.neighbors(i)
        edges = net.incident_edges(i)
        in_ids.append(np.array(
            [2 * e if k == net.edge_u[e] else 2 * e + 1
             for k, e in zip(nbrs, edges)], dtype=np.int64))
        out_ids.append(np.array(
            [2 * e if i == net.edge_u[e] else 2 * e + 1
             for e in edges], dtype=np.int64))
        in_p.append(np.asarray(net.edge_p[edges]))
    msg_hist = np.zeros((2 * E, T + 1))
    msg_hist[:, 0] = [s[k] for (k, _) in pairs]
    marg_hist = np.zeros((n, T + 1))
    marg_hist[:, 0] = s
    for t in range(1, T + 1):
        prev = msg_hist[:, t - 1]
        for i in range(n):
            f = 1.0 - in_p[i] * prev[in_ids[i]]
            d = len(f)
            pre = np.ones(d + 1)
            np.cumprod(f, out=pre[1:])
            suf = np.ones(d + 1)
            suf[:-1] = np.cumprod(f[::-1])[::-1]
            si = s[i]
            marg_hist[i, t] = si + (1 - si) * (1.0 - pre[d])
            msg_hist[out_ids[i], t] = si + (1 - si) * (1.0 - pre[:d] * suf[1:])
    return MarginalHistory(marg_hist), MessageState(tuple(pairs), msg_hist)


def steady_state(hist: MarginalHistory, tol):
    """Final marginals plus a convergence flag on the last sweep delta."""
    if hist.horizon < 1:
        raise UsageError("history must contain at least one sweep")
    delta = np.max(np.abs(hist.pi[:, -1] - hist.pi[:, -2]))
    return hist.pi[:, -1], bool(delta < tol)
