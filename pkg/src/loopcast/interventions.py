"""Intervention specs and the three quality functions.

Q_influence: expected outbreak size when the set seeds the cascade.
Q_vaccination: negative expected outbreak size with the set immunized.
Q_sentinel: expected time to detection, with the network diameter charged
when the cascade is never detected; lower is better.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .engine import EngineConfig, NmpSystem, seed_vector, steady_state
from .errors import UsageError
from .graph import Network, NodeSet, diameter
from .oracle import (OracleEstimate, detection_cumulative, exact_enumerate,
                     mc_estimate)

KINDS = ("influence", "vaccination", "sentinel")


@dataclass(frozen=True)
class InterventionSpec:
    """An intervention set plus its implied background seeding.

    Influence sets seed the cascade themselves (s = indicator of the set);
    vaccination and sentinel sets are evaluated against outbreaks seeded
    uniformly on the remaining nodes.
    """

    kind: str
    nodes: NodeSet

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown intervention kind {self.kind!r}")
        if len(self.nodes) == 0:
            raise UsageError("intervention set must be nonempty")

    def eligible(self, net):
        others = [v for v in range(net.node_count) if v not in set(self.nodes)]
        return NodeSet(others, net.node_count)


@dataclass
class QualityReport:
    spec: InterventionSpec
    method: str
    Q: float
    detail: dict = field(default_factory=dict)
    runtime_ms: float = 0.0


def quality_influence(final_marginals):
    """Q = total expected outbreak size, the sum of final marginals."""
    return float(np.sum(final_marginals))


def quality_vaccination(final_marginals):
    """Q = negative total expected outbreak size under immunization."""
    return -float(np.sum(final_marginals))


def quality_sentinel_from_series(pi_s, diam):
    """Expected detection time from the cumulative detection curve pi_s(t).

    Q = (1 - pi_s(T)) * D + sum_t t * [pi_s(t) - pi_s(t-1)], where the first
    term charges the diameter for cascades that are never detected.
    """
    pi_s = np.asarray(pi_s, dtype=np.float64)
    delta = np.diff(pi_s)
    t = np.arange(1, len(pi_s))
    return float((1.0 - pi_s[-1]) * diam + np.sum(t * delta))


def sentinel_series_from_marginals(marg_hist, sentinel_nodes):
    """pi_S(t) = 1 - prod_{i in S} (1 - pi_i^{(S)}(t))."""
    rows = marg_hist[[int(v) for v in sentinel_nodes], :]
    return 1.0 - np.prod(1.0 - rows, axis=0)


def nmp_quality(net: Network, spec: InterventionSpec, cfg: EngineConfig,
                system: NmpSystem | None = None):
    """Evaluate a spec with the NMP engine.

    A prebuilt `system` (matching net/cfg and, for sentinels, the blocked
    set) can be supplied so one frozen sample draw serves many sets.
    """
    t0 = time.perf_counter()
    detail = {}
    if spec.kind == "influence":
        sys_ = system or NmpSystem(net, cfg)
        hist, _ = sys_.run(seed_vector(net, nodes=spec.nodes))
        final, converged = steady_state(hist, cfg.tol)
        q = quality_influence(final)
    elif spec.kind == "vaccination":
        if len(spec.nodes) == net.node_count:
            detail["warning"] = "every node vaccinated; Q is trivially 0"
            return QualityReport(spec, _nmp_tag(cfg), 0.0, detail,
                                 (time.perf_counter() - t0) * 1e3)
        sys_ = system or NmpSystem(net.with_zeroed_edges(spec.nodes), cfg)
        hist, _ = sys_.run(seed_vector(net, uniform_over=spec.eligible(net)))
        final, converged = steady_state(hist, cfg.tol)
        q = quality_vaccination(final)
    else:
        diam = diameter(net)
        sys_ = system or NmpSystem(net, cfg, blocked=spec.nodes)
        hist, _ = sys_.run(seed_vector(net, uniform_over=spec.eligible(net)))
        _, converged = steady_state(hist, cfg.tol)
        pi_s = sentinel_series_from_marginals(hist.pi, spec.nodes)
        detail["pi_s"] = pi_s
        q = quality_sentinel_from_series(pi_s, diam)
    detail["marginals"] = hist.pi[:, -1]
    detail["converged"] = converged
    return QualityReport(spec, _nmp_tag(cfg), q, detail,
                         (time.perf_counter() - t0) * 1e3)


def _nmp_tag(cfg):
    return f"nmp(r={cfg.r},M={cfg.M},{cfg.sampler})"


def mc_quality(net: Network, spec: InterventionSpec, n_sims, horizon=None,
               seed=0):
    """Evaluate a spec with Monte Carlo cascade simulation."""
    t0 = time.perf_counter()
    detail = {}
    if spec.kind == "influence":
        est = mc_estimate(net, seeds=spec.nodes, n_sims=n_sims,
                          horizon=horizon, seed=seed)
        q = quality_influence(est.marginals)
        detail["q_se"] = est.size_se
    elif spec.kind == "vaccination":
        est = mc_estimate(net, uniform_seed_over=spec.eligible(net),
                          vaccinated=spec.nodes, n_sims=n_sims,
                          horizon=horizon, seed=seed)
        q = quality_vaccination(est.marginals)
        detail["q_se"] = est.size_se
    else:
        diam = diameter(net)
        est = mc_estimate(net, uniform_seed_over=spec.eligible(net),
                          sentinels=spec.nodes, n_sims=n_sims,
                          horizon=horizon, seed=seed)
        pi_s = detection_cumulative(est)
        detail["pi_s"] = pi_s
        q = quality_sentinel_from_series(pi_s, diam)
        # per-simulation detection value is t, or the diameter when missed
        vals = np.concatenate([np.arange(len(est.detection) - 1), [diam]])
        second = float(np.dot(est.detection, vals**2))
        detail["q_se"] = float(np.sqrt(max(second - q * q, 0.0) / n_sims))
    detail["marginals"] = est.marginals
    detail["std_err"] = est.std_err
    return QualityReport(spec, f"mc(n={n_sims})", q, detail,
                         (time.perf_counter() - t0) * 1e3)


def exact_quality(net: Network, spec: InterventionSpec, horizon=None):
    """Evaluate a spec by exact bond enumeration (tiny graphs only).

    Vaccination and sentinel specs average over each eligible single seed,
    matching the simulation oracle's one-seed-per-run convention.
    """
    t0 = time.perf_counter()
    detail = {}
    if spec.kind == "influence":
        est = exact_enumerate(net, seeds=spec.nodes, horizon=horizon)
        q = quality_influence(est.marginals)
        detail["marginals"] = est.marginals
    elif spec.kind == "vaccination":
        eligible = list(spec.eligible(net))
        sizes = []
        for v in eligible:
            est = exact_enumerate(net, seeds=[v], vaccinated=spec.nodes,
                                  horizon=horizon)
            sizes.append(est.expected_size)
        q = -float(np.mean(sizes))
        detail["per_seed_size"] = np.asarray(sizes)
    else:
        diam = diameter(net)
        eligible = list(spec.eligible(net))
        curves = []
        for v in eligible:
            est = exact_enumerate(net, seeds=[v], sentinels=spec.nodes,
                                  horizon=horizon)
            curves.append(detection_cumulative(est))
        pi_s = np.mean(curves, axis=0)
        detail["pi_s"] = pi_s
        q = quality_sentinel_from_series(pi_s, diam)
    return QualityReport(spec, "exact", q, detail,
                         (time.perf_counter() - t0) * 1e3)


def error_eps(q_est: QualityReport, q_star: QualityReport):
    """Signed quality error of an estimate against a reference report."""
    if q_est.spec != q_star.spec:
        raise UsageError("reports describe different intervention specs")
    return q_est.Q - q_star.Q


def kendall_tau(ranking_a, ranking_b, lower_is_better=False):
    """Tie-corrected (tau-b) rank correlation between two quality rankings.

    Each ranking is a sequence of (set, Q) pairs over the same collection of
    sets.  A shared lower-is-better convention flips both inputs and leaves
    tau unchanged; the flag exists to make call sites explicit.
    """
    a = {frozenset(s): q for s, q in ranking_a}
    b = {frozenset(s): q for s, q in ranking_b}
    if set(a) != set(b):
        raise UsageError("rankings cover different set collections")
    if len(a) < 2:
        raise UsageError("kendall tau needs at least two sets")
    keys = sorted(a, key=sorted)
    xs = np.array([a[k] for k in keys])
    ys = np.array([b[k] for k in keys])
    if lower_is_better:
        xs, ys = -xs, -ys
    tau = stats.kendalltau(xs, ys, variant="b").statistic
    return float(tau)
