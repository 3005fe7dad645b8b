"""Experiment runner CLI.

Sweeps intervention sets over infection probabilities and neighborhood
radii, evaluates each set with both the NMP engine and the Monte Carlo
oracle, and emits versioned CSV artifacts (raw rows, summaries, coreness
tables, or temporal detection curves).

Exit codes: 0 ok, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .engine import EngineConfig, NmpSystem, seed_vector
from .errors import ConfigError, EdgeListError, LoopcastError, UsageError
from .graph import NodeSet, coreness, karate_club, load_edge_list
from .interventions import (InterventionSpec, kendall_tau, mc_quality,
                            nmp_quality)

ROWS_SCHEMA = "loopcast-rows v1"
SUMMARY_SCHEMA = "loopcast-summary v1"
CORENESS_SCHEMA = "loopcast-coreness v1"
TEMPORAL_SCHEMA = "loopcast-temporal v1"

ROW_COLUMNS = ("intervention", "set", "p", "r", "M", "n_sims", "method",
               "replicate", "Q", "q_se", "mean_coreness", "runtime_ms")

# classical-MP critical point of the karate club, annotation only
KARATE_CLASSICAL_PC = 0.189


def fmt(x):
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def derived_seed(master, *path):
    ss = np.random.SeedSequence(entropy=(int(master), 3, *map(int, path)))
    return int(ss.generate_state(1)[0])


def parse_p_values(text):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("--p range must be start:stop:step")
        start, stop, step = (float(v) for v in parts)
        if step <= 0:
            raise ConfigError("--p step must be positive")
        vals = []
        v = start
        while v <= stop + 1e-12:
            vals.append(round(v, 12))
            v += step
        return vals
    vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise ConfigError("--p list is empty")
    for v in vals:
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"p={v} outside [0,1]")
    return vals


def parse_sets(text, n):
    sets = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        sets.append(tuple(sorted(int(v) for v in chunk.split(","))))
    if not sets:
        raise ConfigError("--sets is empty")
    for s in sets:
        if any(v < 0 or v >= n for v in s):
            raise ConfigError(f"set {s} has node ids outside [0,{n})")
    return sets


def build_parser():
    ap = argparse.ArgumentParser(
        prog="loopcast",
        description="Evaluate epidemiological interventions with "
                    "neighborhood message passing and Monte Carlo oracles.")
    ap.add_argument("--graph", required=True,
                    help="edge-list path, or 'karate' for the bundled network")
    ap.add_argument("--intervention", required=True,
                    choices=["influence", "vaccination", "sentinel"])
    ap.add_argument("--k", type=int, help="evaluate all node sets of this size")
    ap.add_argument("--sets", help="explicit sets, e.g. '0;1,2;3,4'")
    ap.add_argument("--p", default="0.15",
                    help="comma list or start:stop:step of infection probabilities")
    ap.add_argument("--r", default="1", help="comma list of neighborhood radii")
    ap.add_argument("--samples", type=int, default=1500,
                    help="percolation samples per neighborhood (M)")
    ap.add_argument("--mc-sims", type=int, default=100_000)
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--horizon", type=int, default=None)
    ap.add_argument("--sampler", default="bfs", choices=["bfs", "nz", "exact"])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="-", help="output path, '-' for stdout")
    ap.add_argument("--emit", default="rows",
                    choices=["rows", "summary", "coreness", "temporal"])
    ap.add_argument("--dump-marginals",
                    help="write the NMP marginal history JSON (single-run "
                         "configurations only)")
    ap.add_argument("--dump-neighborhood-sizes", action="store_true",
                    help="emit the per-node neighborhood size CSV and exit")
    return ap


def load_graph(arg, p=None):
    if arg == "karate":
        net = karate_club()
    else:
        try:
            with open(arg) as fh:
                net = load_edge_list(fh.read())
        except OSError as exc:
            raise EdgeListError(f"cannot read graph file: {exc}") from None
    if p is not None:
        return net.__class__.from_edges(
            net.node_count, list(zip(net.edge_u, net.edge_v)),
            np.full(net.edge_count, p))
    return net


class Experiment:
    def __init__(self, args):
        self.args = args
        self.net = load_graph(args.graph)
        n = self.net.node_count
        if (args.k is None) == (args.sets is None):
            raise ConfigError("give exactly one of --k / --sets")
        if args.k is not None:
            if not 1 <= args.k <= n:
                raise ConfigError(f"--k must lie in [1,{n}]")
            self.sets = list(itertools.combinations(range(n), args.k))
        else:
            self.sets = parse_sets(args.sets, n)
        self.p_values = parse_p_values(args.p)
        self.r_values = [int(v) for v in args.r.split(",")]
        for r in self.r_values:
            if r < 0:
                raise ConfigError("--r values must be >= 0")
        if args.replicates < 1:
            raise ConfigError("--replicates must be >= 1")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        self.core = coreness(self.net)
        self.kind = args.intervention

    def _cfg(self, r, p_idx, rep):
        return EngineConfig(
            r=r, M=self.args.samples, T=self.args.horizon,
            sampler=self.args.sampler,
            master_seed=derived_seed(self.args.seed, 0, p_idx, r, rep),
            r_max=max(4, max(self.r_values)))

    def _mean_core(self, s):
        return float(np.mean([self.core[v] for v in s]))

    def _nmp_item(self, p_idx, r, rep):
        """Rows for every set at one (p, r, replicate) grid point."""
        p = self.p_values[p_idx]
        net_p = load_graph(self.args.graph, p)
        cfg = self._cfg(r, p_idx, rep)
        rows = []
        shared = NmpSystem(net_p, cfg) if self.kind == "influence" else None
        for s in self.sets:
            spec = InterventionSpec(self.kind, NodeSet(s, net_p.node_count))
            rep_q = nmp_quality(net_p, spec, cfg, system=shared)
            rows.append(self._row(s, p, r, "nmp", rep, rep_q.Q, None,
                                  rep_q.runtime_ms, rep_q.detail))
        return rows

    def _mc_item(self, p_idx):
        p = self.p_values[p_idx]
        net_p = load_graph(self.args.graph, p)
        rows = []
        for si, s in enumerate(self.sets):
            spec = InterventionSpec(self.kind, NodeSet(s, net_p.node_count))
            rep_q = mc_quality(net_p, spec, self.args.mc_sims,
                               horizon=self.args.horizon,
                               seed=derived_seed(self.args.seed, 1, p_idx, si))
            rows.append(self._row(s, p, None, "mc", 0, rep_q.Q,
                                  rep_q.detail.get("q_se"),
                                  rep_q.runtime_ms, rep_q.detail))
        return rows

    def _row(self, s, p, r, method, rep, q, q_se, runtime_ms, detail):
        return {
            "intervention": self.kind,
            "set": "|".join(str(v) for v in s),
            "p": p,
            "r": r,
            "M": self.args.samples if method == "nmp" else None,
            "n_sims": self.args.mc_sims if method == "mc" else None,
            "method": method,
            "replicate": rep,
            "Q": q,
            "q_se": q_se,
            "mean_coreness": self._mean_core(s),
            "runtime_ms": runtime_ms,
            "pi_s": detail.get("pi_s"),
        }

    def run(self):
        items = []
        for p_idx in range(len(self.p_values)):
            for r in self.r_values:
                for rep in range(self.args.replicates):
                    items.append(("nmp", p_idx, r, rep))
            items.append(("mc", p_idx))
        if self.args.threads == 1:
            batches = [self._dispatch(it) for it in items]
        else:
            with ThreadPoolExecutor(max_workers=self.args.threads) as pool:
                futures = [pool.submit(self._dispatch, it) for it in items]
                batches = [f.result() for f in futures]
        rows = [row for batch in batches for row in batch]
        return rows

    def _dispatch(self, item):
        if item[0] == "nmp":
            return self._nmp_item(item[1], item[2], item[3])
        return self._mc_item(item[1])


def rows_csv(rows, out):
    out.write(f"# {ROWS_SCHEMA}\n")
    out.write(",".join(ROW_COLUMNS) + "\n")
    for row in rows:
        out.write(",".join(fmt(row[c]) for c in ROW_COLUMNS) + "\n")
        out.flush()


def temporal_csv(rows, out):
    out.write(f"# {TEMPORAL_SCHEMA}\n")
    out.write("intervention,set,p,r,M,n_sims,method,replicate,t,pi_s\n")
    for row in rows:
        if row["pi_s"] is None:
            continue
        head = ",".join(fmt(row[c]) for c in
                        ("intervention", "set", "p", "r", "M", "n_sims",
                         "method", "replicate"))
        for t, v in enumerate(row["pi_s"]):
            out.write(f"{head},{t},{fmt(float(v))}\n")
        out.flush()


def summarize(rows, out, k, lower_is_better):
    """Per (p, r): mean error over sets, replicate percentile band, and the
    Kendall tau between the NMP and MC rankings (one tau per replicate)."""
    mc = {}
    for row in rows:
        if row["method"] == "mc":
            mc[(row["set"], row["p"])] = row
    out.write(f"# {SUMMARY_SCHEMA} p_c={KARATE_CLASSICAL_PC}\n")
    out.write("k,p,r,n_sets,mean_eps,eps_lo,eps_hi,tau_mean,tau_lo,tau_hi,"
              "mc_se\n")
    grid = sorted({(row["p"], row["r"]) for row in rows
                   if row["method"] == "nmp"})
    for p, r in grid:
        by_rep = {}
        for row in rows:
            if row["method"] == "nmp" and row["p"] == p and row["r"] == r:
                by_rep.setdefault(row["replicate"], []).append(row)
        rep_means, taus = [], []
        missing = set()
        mc_var = 0.0
        n_sets = 0
        for rep, rrows in sorted(by_rep.items()):
            eps, rank_nmp, rank_mc = [], [], []
            for row in rrows:
                ref = mc.get((row["set"], p))
                if ref is None:
                    missing.add(row["set"])
                    continue
                eps.append(row["Q"] - ref["Q"])
                key = tuple(int(v) for v in row["set"].split("|"))
                rank_nmp.append((key, row["Q"]))
                rank_mc.append((key, ref["Q"]))
            if not eps:
                continue
            rep_means.append(float(np.mean(eps)))
            n_sets = len(eps)
            if rep == 0:
                mc_var = sum((mc[(row["set"], p)]["q_se"] or 0.0) ** 2
                             for row in rrows
                             if (row["set"], p) in mc) / max(len(eps), 1) ** 2
            if len(rank_nmp) >= 2:
                tau = kendall_tau(rank_nmp, rank_mc,
                                  lower_is_better=lower_is_better)
                taus.append(tau)
        if missing:
            print(f"warning: no MC pair for sets {sorted(missing)} at p={p}",
                  file=sys.stderr)
        if not rep_means:
            continue
        tau_vals = [t for t in taus if not np.isnan(t)]
        tau_cols = (
            (fmt(float(np.mean(tau_vals))),
             fmt(float(np.percentile(tau_vals, 2.5))),
             fmt(float(np.percentile(tau_vals, 97.5))))
            if tau_vals else ("", "", ""))
        out.write(",".join([
            str(k), fmt(p), fmt(r), str(n_sets),
            fmt(float(np.mean(rep_means))),
            fmt(float(np.percentile(rep_means, 2.5))),
            fmt(float(np.percentile(rep_means, 97.5))),
            *tau_cols,
            fmt(float(np.sqrt(mc_var))),
        ]) + "\n")


def coreness_csv(rows, out):
    """Per-set table: mean coreness, replicate-mean NMP quality, MC quality,
    and the signed error."""
    mc = {}
    for row in rows:
        if row["method"] == "mc":
            mc[(row["set"], row["p"])] = row
    out.write(f"# {CORENESS_SCHEMA}\n")
    out.write("intervention,set,p,r,mean_coreness,q_nmp,q_mc,eps\n")
    acc = {}
    for row in rows:
        if row["method"] != "nmp":
            continue
        acc.setdefault((row["set"], row["p"], row["r"]), []).append(row)
    for (s, p, r), group in sorted(acc.items()):
        ref = mc.get((s, p))
        if ref is None:
            continue
        q_nmp = float(np.mean([g["Q"] for g in group]))
        out.write(",".join([
            group[0]["intervention"], s, fmt(p), fmt(r),
            fmt(group[0]["mean_coreness"]), fmt(q_nmp), fmt(ref["Q"]),
            fmt(q_nmp - ref["Q"]),
        ]) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.dump_neighborhood_sizes:
            from .neighborhoods import neighborhood_size_csv
            net = load_graph(args.graph)
            text = neighborhood_size_csv(net, int(args.r.split(",")[0]))
            _write(args.out, lambda out: out.write(text))
            return 0
        exp = Experiment(args)
        rows = exp.run()
        if args.dump_marginals:
            _dump_single_marginals(exp, args)
        k = args.k if args.k is not None else len(exp.sets[0])
        if args.emit == "rows":
            _write(args.out, lambda out: rows_csv(rows, out))
        elif args.emit == "temporal":
            if exp.kind != "sentinel":
                raise ConfigError("--emit temporal requires --intervention sentinel")
            _write(args.out, lambda out: temporal_csv(rows, out))
        elif args.emit == "summary":
            _write(args.out, lambda out: summarize(
                rows, out, k, lower_is_better=exp.kind == "sentinel"))
        else:
            _write(args.out, lambda out: coreness_csv(rows, out))
        return 0
    except EdgeListError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, UsageError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LoopcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dump_single_marginals(exp, args):
    if (len(exp.sets), len(exp.p_values), len(exp.r_values),
            args.replicates) != (1, 1, 1, 1):
        raise ConfigError("--dump-marginals needs a single-run configuration")
    net_p = load_graph(args.graph, exp.p_values[0])
    cfg = exp._cfg(exp.r_values[0], 0, 0)
    s = exp.sets[0]
    spec = InterventionSpec(exp.kind, NodeSet(s, net_p.node_count))
    if exp.kind == "influence":
        hist, _ = NmpSystem(net_p, cfg).run(seed_vector(net_p, nodes=s))
    elif exp.kind == "vaccination":
        hist, _ = NmpSystem(net_p.with_zeroed_edges(s), cfg).run(
            seed_vector(net_p, uniform_over=spec.eligible(net_p)))
    else:
        hist, _ = NmpSystem(net_p, cfg, blocked=s).run(
            seed_vector(net_p, uniform_over=spec.eligible(net_p)))
    with open(args.dump_marginals, "w") as fh:
        fh.write(hist.to_json())


def _write(path, writer):
    if path == "-":
        writer(sys.stdout)
    else:
        with open(path, "w") as fh:
            writer(fh)


if __name__ == "__main__":
    sys.exit(main())
