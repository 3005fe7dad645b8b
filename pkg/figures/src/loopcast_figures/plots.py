"""Figure families for loopcast sweep output.

Every renderer returns (figure, plotted) where `plotted` maps a series
label to the exact (x, y) arrays handed to matplotlib — the round-trip
harness compares those against the CSV without tolerance.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DEFAULT_PC = 0.189


def _pc_line(ax, pc):
    if pc is not None:
        ax.axvline(float(pc), color="0.4", linestyle=":", linewidth=1,
                   label=f"$p_c={float(pc):g}$")


def _finish(fig):
    fig.tight_layout()
    return fig


def error_curves(summary_rows, pc=DEFAULT_PC, ax=None, title=None):
    """Mean signed error vs p, one curve per r, replicate percentile band."""
    fig, ax = (ax.figure, ax) if ax is not None else plt.subplots()
    plotted = {}
    for r in sorted({row["r"] for row in summary_rows}):
        sub = sorted((row for row in summary_rows if row["r"] == r),
                     key=lambda row: row["p"])
        x = np.array([row["p"] for row in sub])
        y = np.array([row["mean_eps"] for row in sub])
        lo = np.array([row["eps_lo"] for row in sub])
        hi = np.array([row["eps_hi"] for row in sub])
        ax.plot(x, y, marker="o", label=f"r={r}")
        ax.fill_between(x, lo, hi, alpha=0.2)
        plotted[f"r={r}"] = (x, y)
        plotted[f"r={r}:band"] = (x, lo, hi)
    _pc_line(ax, pc)
    ax.axhline(0.0, color="0.7", linewidth=0.8)
    ax.set_xlabel("$p$")
    ax.set_ylabel(r"mean $\epsilon(S)$")
    ax.set_title(title or "NMP error vs infection probability")
    ax.legend(fontsize="small")
    return _finish(fig), plotted


def tau_curves(summary_rows, pc=DEFAULT_PC, ax=None, title=None):
    """Kendall tau between NMP and MC rankings vs p, one curve per r."""
    fig, ax = (ax.figure, ax) if ax is not None else plt.subplots()
    plotted = {}
    for r in sorted({row["r"] for row in summary_rows}):
        sub = sorted((row for row in summary_rows
                      if row["r"] == r and row["tau_mean"] is not None),
                     key=lambda row: row["p"])
        if not sub:
            continue
        x = np.array([row["p"] for row in sub])
        y = np.array([row["tau_mean"] for row in sub])
        lo = np.array([row["tau_lo"] for row in sub])
        hi = np.array([row["tau_hi"] for row in sub])
        ax.plot(x, y, marker="s", label=f"r={r}")
        ax.fill_between(x, lo, hi, alpha=0.2)
        plotted[f"r={r}"] = (x, y)
    _pc_line(ax, pc)
    ax.set_xlabel("$p$")
    ax.set_ylabel(r"Kendall $\tau$")
    ax.set_ylim(-1.05, 1.05)
    ax.set_title(title or "rank agreement vs infection probability")
    ax.legend(fontsize="small")
    return _finish(fig), plotted


def quality_scatter(coreness_rows, ax=None, title=None):
    """NMP vs MC quality, points colored by the set's mean coreness."""
    fig, ax = (ax.figure, ax) if ax is not None else plt.subplots()
    x = np.array([row["q_mc"] for row in coreness_rows])
    y = np.array([row["q_nmp"] for row in coreness_rows])
    c = np.array([row["mean_coreness"] for row in coreness_rows])
    sc = ax.scatter(x, y, c=c, s=14, cmap="viridis")
    span = [min(x.min(), y.min()), max(x.max(), y.max())]
    ax.plot(span, span, color="0.6", linewidth=0.8, linestyle="--")
    ax.figure.colorbar(sc, ax=ax, label="mean coreness")
    ax.set_xlabel("$Q$ (Monte Carlo)")
    ax.set_ylabel("$Q$ (NMP)")
    ax.set_title(title or "per-set quality, NMP vs MC")
    return _finish(fig), {"scatter": (x, y, c)}


def temporal_curves(temporal_rows, ax=None, title=None):
    """Cumulative detection probability over time, per set and method."""
    fig, ax = (ax.figure, ax) if ax is not None else plt.subplots()
    plotted = {}
    groups = {}
    for row in temporal_rows:
        key = (row["set"], row["method"], row["replicate"])
        groups.setdefault(key, []).append(row)
    styles = {"nmp": "-", "mc": "--"}
    for (s, method, rep), rows in sorted(groups.items()):
        rows = sorted(rows, key=lambda row: row["t"])
        x = np.array([row["t"] for row in rows])
        y = np.array([row["pi_s"] for row in rows])
        label = f"S={{{s}}} {method}" + (f" #{rep}" if method == "nmp" else "")
        ax.plot(x, y, styles.get(method, "-"), label=label, alpha=0.8)
        plotted[label] = (x, y)
    ax.set_xlabel("$t$")
    ax.set_ylabel(r"$\pi_S(t)$")
    ax.set_ylim(0, 1.02)
    ax.set_title(title or "cumulative detection probability")
    ax.legend(fontsize="x-small")
    return _finish(fig), plotted


def sampler_comparison(rows_a, rows_b, labels=("bfs", "nz"), ax=None,
                       title=None):
    """Replicate spread of NMP quality per set, one sweep per sampler.

    Both inputs are rows CSVs from the same experiment run with different
    samplers; the panel compares the per-set standard deviation of Q over
    replicates.
    """
    fig, ax = (ax.figure, ax) if ax is not None else plt.subplots()
    plotted = {}

    def per_set_std(rows):
        acc = {}
        for row in rows:
            if row["method"] != "nmp":
                continue
            acc.setdefault((row["set"], row["p"], row["r"]), []).append(row["Q"])
        keys = sorted(acc)
        return keys, np.array([np.std(acc[k], ddof=1) for k in keys])

    keys_a, std_a = per_set_std(rows_a)
    keys_b, std_b = per_set_std(rows_b)
    if keys_a != keys_b:
        raise ValueError("sampler sweeps cover different (set, p, r) grids")
    ax.scatter(std_a, std_b, s=14)
    span = [0, max(std_a.max(), std_b.max()) * 1.05]
    ax.plot(span, span, color="0.6", linewidth=0.8, linestyle="--")
    plotted["std"] = (std_a, std_b)
    ax.set_xlabel(f"std of $Q$ ({labels[0]})")
    ax.set_ylabel(f"std of $Q$ ({labels[1]})")
    ax.set_title(title or "per-set replicate spread by sampler")
    return _finish(fig), plotted


def panel_grid(rows_by_intervention, pc=DEFAULT_PC):
    """3x3 grid: one row per intervention, columns = error curve, tau
    curve, and NMP-vs-MC scatter at the largest swept p.

    Input maps intervention name -> raw rows (rows schema); the summary
    and scatter aggregates are recomputed here so a single rows CSV per
    intervention is enough to rebuild the whole figure.
    """
    interventions = sorted(rows_by_intervention)
    fig, axes = plt.subplots(len(interventions), 3,
                             figsize=(12, 3.2 * len(interventions)),
                             squeeze=False)
    plotted = {}
    for i, kind in enumerate(interventions):
        rows = rows_by_intervention[kind]
        summary = summarize_rows(rows)
        _, pl = error_curves(summary, pc=pc, ax=axes[i][0], title=f"{kind}: error")
        plotted.update({f"{kind}/err/{k}": v for k, v in pl.items()})
        _, pl = tau_curves(summary, pc=pc, ax=axes[i][1], title=f"{kind}: tau")
        plotted.update({f"{kind}/tau/{k}": v for k, v in pl.items()})
        scatter_rows = scatter_at_max_p(rows)
        _, pl = quality_scatter(scatter_rows, ax=axes[i][2],
                                title=f"{kind}: quality")
        plotted.update({f"{kind}/scatter/{k}": v for k, v in pl.items()})
    fig.tight_layout()
    return fig, plotted


def summarize_rows(rows):
    """Aggregate raw rows into summary-schema records (same statistics as
    the experiment runner's summary emit)."""
    mc = {(row["set"], row["p"]): row["Q"] for row in rows
          if row["method"] == "mc"}
    out = []
    grid = sorted({(row["p"], row["r"]) for row in rows
                   if row["method"] == "nmp"})
    for p, r in grid:
        by_rep = {}
        for row in rows:
            if row["method"] == "nmp" and row["p"] == p and row["r"] == r:
                by_rep.setdefault(row["replicate"], []).append(row)
        rep_means, taus = [], []
        n_sets = 0
        for rep, rrows in sorted(by_rep.items()):
            pairs = [(row["Q"], mc[(row["set"], p)]) for row in rrows
                     if (row["set"], p) in mc]
            if not pairs:
                continue
            eps = [a - b for a, b in pairs]
            rep_means.append(float(np.mean(eps)))
            n_sets = len(eps)
            if len(pairs) >= 2:
                taus.append(_tau([a for a, _ in pairs], [b for _, b in pairs]))
        if not rep_means:
            continue
        tau_vals = [t for t in taus if not np.isnan(t)]
        out.append({
            "k": None, "p": p, "r": r, "n_sets": n_sets,
            "mean_eps": float(np.mean(rep_means)),
            "eps_lo": float(np.percentile(rep_means, 2.5)),
            "eps_hi": float(np.percentile(rep_means, 97.5)),
            "tau_mean": float(np.mean(tau_vals)) if tau_vals else None,
            "tau_lo": float(np.percentile(tau_vals, 2.5)) if tau_vals else None,
            "tau_hi": float(np.percentile(tau_vals, 97.5)) if tau_vals else None,
            "mc_se": None,
        })
    return out


def _tau(xs, ys):
    """Tau-b over two equal-length value lists."""
    xs, ys = np.asarray(xs), np.asarray(ys)
    n = len(xs)
    conc = disc = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = xs[i] - xs[j], ys[i] - ys[j]
            if dx == 0:
                tx += 1
            if dy == 0:
                ty += 1
            if dx * dy > 0:
                conc += 1
            elif dx * dy < 0:
                disc += 1
    n0 = n * (n - 1) / 2
    denom = np.sqrt((n0 - tx) * (n0 - ty))
    return (conc - disc) / denom if denom else float("nan")


def scatter_at_max_p(rows):
    """Coreness-schema records at the sweep's largest p, replicate-averaged."""
    p_max = max(row["p"] for row in rows if row["method"] == "nmp")
    mc = {row["set"]: row["Q"] for row in rows
          if row["method"] == "mc" and row["p"] == p_max}
    acc = {}
    for row in rows:
        if row["method"] == "nmp" and row["p"] == p_max:
            acc.setdefault((row["set"], row["r"]), []).append(row)
    out = []
    for (s, r), group in sorted(acc.items()):
        if s not in mc:
            continue
        q_nmp = float(np.mean([g["Q"] for g in group]))
        out.append({
            "intervention": group[0]["intervention"], "set": s, "p": p_max,
            "r": r, "mean_coreness": group[0]["mean_coreness"],
            "q_nmp": q_nmp, "q_mc": mc[s], "eps": q_nmp - mc[s],
        })
    return out


def save(fig, out_base):
    """Write SVG and PNG next to each other; returns the two paths."""
    paths = [f"{out_base}.svg", f"{out_base}.png"]
    for path in paths:
        fig.savefig(path, dpi=150)
    return paths
