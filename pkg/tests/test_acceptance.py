"""End-to-end acceptance gate.

Each test covers one advertised guarantee and prints a single PASS/FAIL
line (visible in the pytest summary) with the measured numbers.
"""

import itertools
import time

import numpy as np
import pytest
from scipy import stats

import loopcast as lc
from loopcast.engine import (EngineConfig, NmpSystem, classical_mp, run_nmp,
                             seed_vector)
from loopcast.interventions import (InterventionSpec, kendall_tau, mc_quality,
                                    nmp_quality, quality_sentinel_from_series,
                                    sentinel_series_from_marginals)
from loopcast.neighborhoods import build_all_neighborhoods
from loopcast.oracle import exact_enumerate, detection_cumulative
from loopcast.sampling import (enumerate_exact, estimate_reachability,
                               owner_rng, sample_bfs, sample_newman_ziff)

from conftest import make_net, random_tree, random_connected_graph
from conftest import (TRIANGLE_EDGES, C4_EDGES, BOWTIE_EDGES, K4_EDGES,
                      PATH3_EDGES)


def report(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}: {name}" + (f" [{detail}]" if detail else "")
    print(line)
    assert ok, line


def exact_cfg(r, **kw):
    kw.setdefault("master_seed", 0)
    return EngineConfig(r=r, M=1, sampler="exact", **kw)


# ---------------------------------------------------------------- shared sweep

K1_SETS = [(i,) for i in range(34)]


@pytest.fixture(scope="module")
def karate_mc():
    """Per-p MC influence qualities (k=1, 1e5 sims), computed once."""
    cache = {}

    def get(p):
        if p not in cache:
            net = lc.karate_club(p)
            qs, ses = [], []
            for i in range(34):
                rep = mc_quality(net, InterventionSpec(
                    "influence", lc.NodeSet([i], 34)), 100_000, seed=1000 + i)
                qs.append(rep.Q)
                ses.append(rep.detail["q_se"])
            cache[p] = (np.array(qs), np.array(ses))
        return cache[p]

    return get


def nmp_k1_qualities(p, r, master_seed, M=1500):
    net = lc.karate_club(p)
    sys_ = NmpSystem(net, EngineConfig(r=r, M=M, sampler="bfs",
                                       master_seed=master_seed))
    return np.array([sys_.run(seed_vector(net, nodes=s))[0].final.sum()
                     for s in K1_SETS])


# ------------------------------------------------------------------ criteria


def test_tree_exactness():
    """Classical MP and NMP reproduce brute-force marginals on trees."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10):
        net = random_tree(rng, n_max=21)  # brute force caps at 20 edges
        seed = int(rng.integers(net.node_count))
        s = seed_vector(net, nodes=[seed])
        ref = exact_enumerate(net, seeds=[seed], horizon=net.node_count)
        h_cl, _ = classical_mp(net, s, exact_cfg(0))
        h_nmp, _ = run_nmp(net, s, exact_cfg(1))
        worst = max(worst,
                    float(np.max(np.abs(h_cl.final - ref.marginals))),
                    float(np.max(np.abs(h_nmp.final - ref.marginals))))
    dt = time.perf_counter() - t0
    report("tree exactness (10 random trees, 1e-9, <10 s)",
           worst < 1e-9 and dt < 10.0, f"max err {worst:.2e}, {dt:.1f} s")


def test_tiny_loop_exactness():
    """Full-coverage NMP is exact on the standard small loopy graphs."""
    t0 = time.perf_counter()
    cases = [(3, TRIANGLE_EDGES, 1), (4, C4_EDGES, 2),
             (5, BOWTIE_EDGES, 1), (4, K4_EDGES, 2)]
    worst = 0.0
    for n, edges, r in cases:
        for p in (0.2, 0.5, 0.8):
            net = make_net(n, edges, p)
            s = seed_vector(net, nodes=[0])
            hist, _ = run_nmp(net, s, exact_cfg(r))
            ref = exact_enumerate(net, seeds=[0], horizon=hist.horizon)
            worst = max(worst, float(np.max(np.abs(hist.final - ref.marginals))))
            for t in range(min(4, hist.horizon) + 1):
                worst = max(worst, float(np.max(
                    np.abs(hist.pi[:, t] - ref.marginals_t[:, t]))))
    dt = time.perf_counter() - t0
    report("tiny-loop exactness (triangle/C4/bowtie/K4, 1e-9, <10 s)",
           worst < 1e-9 and dt < 10.0, f"max err {worst:.2e}, {dt:.1f} s")


def test_r0_reduces_to_classical():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(20):
        net = random_connected_graph(rng, n_max=30)
        s = seed_vector(net, uniform_over=range(net.node_count))
        cfg = exact_cfg(0)
        hist, msgs = run_nmp(net, s, cfg)
        ref_hist, ref_msgs = classical_mp(net, s, cfg)
        T = min(hist.horizon, ref_hist.horizon)
        worst = max(worst, float(np.max(
            np.abs(hist.pi[:, :T + 1] - ref_hist.pi[:, :T + 1]))))
        ref = {pair: ref_msgs.values[m]
               for m, pair in enumerate(ref_msgs.pairs)}
        for m, pair in enumerate(msgs.pairs):
            worst = max(worst, float(np.max(
                np.abs(msgs.values[m, :T + 1] - ref[pair][:T + 1]))))
    report("r=0 reduction to classical MP (20 random graphs, 1e-12)",
           worst < 1e-12, f"max err {worst:.2e}")


def test_sampler_unbiasedness():
    t0 = time.perf_counter()
    net = lc.karate_club(0.15)
    nbs = build_all_neighborhoods(net, 1)
    n_pairs = n_ok = 0
    for i, nb in enumerate(nbs):
        if len(nb.edge_set) > 20:
            continue  # no brute-force reference above the enumeration cap
        ref = enumerate_exact(net, nb.edge_set, i)
        others = [v for v in nb.node_set if v != i]
        for fn in (sample_bfs, sample_newman_ziff):
            ests = {k: [] for k in others}
            for rep in range(50):
                ss = fn(net, nb.edge_set, i, 200,
                        owner_rng(rep, "marginal", i, 1))
                for k in others:
                    ests[k].append(estimate_reachability(ss, k))
            for k in others:
                arr = np.array(ests[k])
                se = arr.std(ddof=1) / np.sqrt(50)
                n_pairs += 1
                if abs(arr.mean() - estimate_reachability(ref, k)) \
                        <= 4 * se + 1e-12:
                    n_ok += 1
    dt = time.perf_counter() - t0
    frac = n_ok / n_pairs
    report("sampler unbiasedness (karate r=1, 4 SE, >=99% of pairs, <5 min)",
           frac >= 0.99 and dt < 300,
           f"{n_ok}/{n_pairs} = {frac:.3f}, {dt:.0f} s")


def test_sampler_variance_ordering():
    net = lc.karate_club(0.15)
    nbs = [nb for nb in build_all_neighborhoods(net, 1)
           if len(nb.edge_set) <= 20]

    # wall-clock calibration on a representative neighborhood
    cal = nbs[10]
    for fn in (sample_bfs, sample_newman_ziff):  # warm any lazy state
        fn(net, cal.edge_set, cal.focal, 50, owner_rng(0, "marginal", 0)).dist()
    # Interleave the timing reps so background load hits both samplers alike,
    # and materialize distances: the dynamic engine consumes dist() from every
    # sample set, so that lazy cost is part of the per-draw budget.
    per_draw = {"bfs": 0.0, "nz": 0.0}
    for rep in range(20):
        for fn, name in ((sample_bfs, "bfs"), (sample_newman_ziff, "nz")):
            t0 = time.perf_counter()
            ss = fn(net, cal.edge_set, cal.focal, 200,
                    owner_rng(rep, "marginal", 1))
            ss.dist()
            per_draw[name] += time.perf_counter() - t0
    m_bfs = 200
    m_nz = max(1, round(m_bfs * per_draw["bfs"] / per_draw["nz"]))

    stds = {"bfs": [], "nz": []}
    for nb in nbs:
        others = [v for v in nb.node_set if v != nb.focal]
        for name, fn, M in (("bfs", sample_bfs, m_bfs),
                            ("nz", sample_newman_ziff, m_nz)):
            ests = {k: [] for k in others}
            for rep in range(50):
                ss = fn(net, nb.edge_set, nb.focal, M,
                        owner_rng(rep, "marginal", nb.focal, 2))
                for k in others:
                    ests[k].append(estimate_reachability(ss, k))
            for k in others:
                stds[name].append(np.std(ests[k], ddof=1))
    b, z = np.array(stds["bfs"]), np.array(stds["nz"])
    pval = stats.wilcoxon(z, b, alternative="greater").pvalue
    report("sampler variance ordering (NZ > BFS at matched wall clock, p<0.01)",
           z.mean() > b.mean() and pval < 0.01,
           f"mean std nz {z.mean():.4f} vs bfs {b.mean():.4f}, "
           f"M_nz={m_nz}, p={pval:.1e}")


def test_error_onset(karate_mc):
    """Bias of NMP influence quality versus p and r on the karate club.

    Sub-check (i) is implemented at the stated tolerance (2 MC standard
    errors of the set-averaged quality, widened by the replicate scatter of
    the measured mean).  The r=0 and r=1 engines carry a real loop-induced
    bias at p=0.10 that is an order of magnitude above that tolerance, so
    (i) fails for them; see the measured numbers in the printed detail.
    """
    t0 = time.perf_counter()
    n_reps = 6
    mean_eps, tol = {}, {}
    for p in (0.10, 0.25, 0.30):
        q_mc, se_mc = karate_mc(p)
        se_mean = float(np.sqrt(np.sum(se_mc**2)) / 34)
        for r in (0, 1, 2):
            reps = [float(np.mean(nmp_k1_qualities(p, r, 100 * j + r) - q_mc))
                    for j in range(n_reps)]
            mean_eps[p, r] = float(np.mean(reps))
            rep_se = float(np.std(reps, ddof=1) / np.sqrt(n_reps))
            tol[p, r] = 2.0 * float(np.hypot(se_mean, rep_se))
    dt = time.perf_counter() - t0

    ok_i = all(abs(mean_eps[0.10, r]) <= tol[0.10, r] for r in (0, 1, 2))
    e25 = [abs(mean_eps[0.25, r]) for r in (0, 1, 2)]
    ok_ii = e25[0] > e25[1] > e25[2]
    ok_iii = mean_eps[0.30, 0] > mean_eps[0.10, 0]
    ok_time = dt < 1800
    detail = (f"(i) eps@p=0.10 r0..2 = "
              f"{[f'{mean_eps[0.10, r]:+.4f}/{tol[0.10, r]:.4f}' for r in (0, 1, 2)]} -> {ok_i}; "
              f"(ii) |eps|@p=0.25 = {[f'{v:.3f}' for v in e25]} -> {ok_ii}; "
              f"(iii) {mean_eps[0.30, 0]:.3f} > {mean_eps[0.10, 0]:.3f} -> {ok_iii}; "
              f"{dt:.0f} s")
    report("error onset (k=1 sweep, M=1500, 1e5 MC sims, <30 min)",
           ok_i and ok_ii and ok_iii and ok_time, detail)


def test_rank_agreement(karate_mc):
    taus = {}
    for p, r in ((0.05, 1), (0.10, 1), (0.15, 1), (0.15, 0), (0.35, 0)):
        q_mc, _ = karate_mc(p)
        q_nmp = nmp_k1_qualities(p, r, master_seed=2)
        taus[p, r] = kendall_tau(list(zip(K1_SETS, q_nmp)),
                                 list(zip(K1_SETS, q_mc)))
    ok_low_p = all(taus[p, 1] >= 0.8 for p in (0.05, 0.10, 0.15))
    ok_degrade = taus[0.35, 0] < taus[0.15, 0]
    report("rank agreement (tau >= 0.8 below threshold; degrades past p_c)",
           ok_low_p and ok_degrade,
           ", ".join(f"tau(p={p},r={r})={v:.3f}" for (p, r), v in taus.items()))


def test_coreness_bias_sign():
    net = lc.karate_club(0.30)
    core = lc.coreness(net)
    sets = list(itertools.combinations(range(34), 2))
    sys_ = NmpSystem(net, EngineConfig(r=1, M=300, sampler="bfs",
                                       master_seed=5))
    q_nmp = np.array([sys_.run(seed_vector(net, nodes=s))[0].final.sum()
                      for s in sets])
    q_mc = np.array([mc_quality(net, InterventionSpec(
        "influence", lc.NodeSet(s, 34)), 10_000, seed=j).Q
        for j, s in enumerate(sets)])
    eps = q_nmp - q_mc
    mean_core = [(core[a] + core[b]) / 2 for a, b in sets]
    tau = kendall_tau(list(zip(sets, mean_core)), list(zip(sets, eps)))
    report("coreness bias sign (k=2, p=0.30, tau(coreness, eps) < 0)",
           tau < 0.0, f"tau = {tau:.3f} over {len(sets)} sets")


def test_sentinel_machinery():
    worst = 0.0
    # fixed-seed chain and triangle cases against brute-force detection
    cases = [
        (make_net(3, PATH3_EDGES, 1.0), [0], [2]),
        (make_net(3, PATH3_EDGES, 0.5), [0], [2]),
        (make_net(3, TRIANGLE_EDGES, 0.5), [0], [2]),
        (make_net(3, TRIANGLE_EDGES, 0.0), [0], [2]),
    ]
    for net, seeds, S in cases:
        diam = lc.diameter(net)  # structural diameter, independent of p
        hist, _ = run_nmp(net, seed_vector(net, nodes=seeds), exact_cfg(1),
                          blocked=S)
        q_nmp = quality_sentinel_from_series(
            sentinel_series_from_marginals(hist.pi, S), diam)
        est = exact_enumerate(net, seeds=seeds, sentinels=S,
                              horizon=hist.horizon)
        q_ref = quality_sentinel_from_series(detection_cumulative(est), diam)
        worst = max(worst, abs(q_nmp - q_ref))
    ok_small = worst < 1e-9

    net = lc.karate_club(0.15)
    spec = InterventionSpec("sentinel", lc.NodeSet([0, 33], 34))
    rq = nmp_quality(net, spec, EngineConfig(r=1, M=1500, sampler="bfs",
                                             master_seed=3))
    rm = mc_quality(net, spec, 100_000, seed=4)
    pi_nmp, pi_mc = rq.detail["pi_s"], rm.detail["pi_s"]
    ok_shape = (np.all(np.diff(pi_nmp) >= -1e-12)
                and pi_nmp[-1] <= 1.0 + 1e-12)
    gap = max(abs(pi_nmp[t] - pi_mc[t]) for t in range(4))
    report("sentinel machinery (small-graph 1e-9; karate pi_S within 0.05)",
           ok_small and ok_shape and gap < 0.05,
           f"small-graph err {worst:.2e}, karate gap(t<=3) {gap:.4f}")


def test_experiment_determinism(tmp_path):
    from loopcast.cli import main
    args = ["--graph", "karate", "--intervention", "sentinel",
            "--sets", "0,33;5,24", "--p", "0.1,0.2", "--r", "0,1",
            "--samples", "120", "--mc-sims", "1000", "--replicates", "2",
            "--seed", "31"]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--threads", "1", "--out", str(f1)]) == 0
    assert main(args + ["--threads", "4", "--out", str(f2)]) == 0

    def strip(text):
        return [ln.rsplit(",", 1)[0] for ln in text.splitlines()]

    same = strip(f1.read_text()) == strip(f2.read_text())
    report("determinism (same master seed, thread count varied)",
           same, f"{len(f1.read_text().splitlines())} rows compared")
