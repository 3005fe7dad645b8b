"""One entry point per figure family; each takes --in/--out."""

from __future__ import annotations

import argparse
import sys

from . import plots
from .io import SchemaError, read_csv


def _parser(desc, extra_inputs=0):
    ap = argparse.ArgumentParser(description=desc)
    ap.add_argument("--in", dest="inputs", action="append", required=True,
                    help="input CSV (repeatable where the family needs more)")
    ap.add_argument("--out", required=True,
                    help="output basename; .svg and .png are written")
    ap.add_argument("--pc", type=float, default=plots.DEFAULT_PC,
                    help="critical-point annotation; negative disables")
    return ap


def _pc(args):
    return None if args.pc < 0 else args.pc


def _run(render):
    try:
        fig, _ = render()
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main_error(argv=None):
    args = _parser("mean error vs p with percentile bands").parse_args(argv)

    def render():
        rows, meta = read_csv(args.inputs[0], "summary")
        pc = float(meta["p_c"]) if "p_c" in meta and args.pc == plots.DEFAULT_PC \
            else _pc(args)
        fig, plotted = plots.error_curves(rows, pc=pc)
        plots.save(fig, args.out)
        return fig, plotted

    return _run(render)


def main_tau(argv=None):
    args = _parser("Kendall tau vs p").parse_args(argv)

    def render():
        rows, meta = read_csv(args.inputs[0], "summary")
        pc = float(meta["p_c"]) if "p_c" in meta and args.pc == plots.DEFAULT_PC \
            else _pc(args)
        fig, plotted = plots.tau_curves(rows, pc=pc)
        plots.save(fig, args.out)
        return fig, plotted

    return _run(render)


def main_scatter(argv=None):
    args = _parser("NMP vs MC quality scatter").parse_args(argv)

    def render():
        rows, _ = read_csv(args.inputs[0], "coreness")
        fig, plotted = plots.quality_scatter(rows)
        plots.save(fig, args.out)
        return fig, plotted

    return _run(render)


def main_temporal(argv=None):
    args = _parser("cumulative detection curves").parse_args(argv)

    def render():
        rows, _ = read_csv(args.inputs[0], "temporal")
        fig, plotted = plots.temporal_curves(rows)
        plots.save(fig, args.out)
        return fig, plotted

    return _run(render)


def main_sampler(argv=None):
    ap = _parser("per-set replicate spread, sampler A vs sampler B")
    ap.add_argument("--labels", default="bfs,nz")
    args = ap.parse_args(argv)

    def render():
        if len(args.inputs) != 2:
            raise ValueError("this family needs exactly two --in rows CSVs")
        rows_a, _ = read_csv(args.inputs[0], "rows")
        rows_b, _ = read_csv(args.inputs[1], "rows")
        fig, plotted = plots.sampler_comparison(
            rows_a, rows_b, labels=tuple(args.labels.split(",")))
        plots.save(fig, args.out)
        return fig, plotted

    return _run(render)


def main_grid(argv=None):
    args = _parser("panel grid: error / tau / scatter per intervention"
                   ).parse_args(argv)

    def render():
        by_kind = {}
        for path in args.inputs:
            rows, _ = read_csv(path, "rows")
            for row in rows:
                by_kind.setdefault(row["intervention"], []).append(row)
        fig, plotted = plots.panel_grid(by_kind, pc=_pc(args))
        plots.save(fig, args.out)
        return fig, plotted

    return _run(render)
