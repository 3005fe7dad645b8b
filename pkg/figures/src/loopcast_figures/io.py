"""Versioned CSV readers for the loopcast experiment schemas."""

from __future__ import annotations

import csv
import io

SCHEMAS = {
    "rows": ("loopcast-rows v1",
             ["intervention", "set", "p", "r", "M", "n_sims", "method",
              "replicate", "Q", "q_se", "mean_coreness", "runtime_ms"]),
    "summary": ("loopcast-summary v1",
                ["k", "p", "r", "n_sets", "mean_eps", "eps_lo", "eps_hi",
                 "tau_mean", "tau_lo", "tau_hi", "mc_se"]),
    "coreness": ("loopcast-coreness v1",
                 ["intervention", "set", "p", "r", "mean_coreness",
                  "q_nmp", "q_mc", "eps"]),
    "temporal": ("loopcast-temporal v1",
                 ["intervention", "set", "p", "r", "M", "n_sims", "method",
                  "replicate", "t", "pi_s"]),
}

FLOAT_COLUMNS = {"p", "Q", "q_se", "mean_coreness", "runtime_ms", "mean_eps",
                 "eps_lo", "eps_hi", "tau_mean", "tau_lo", "tau_hi", "mc_se",
                 "pi_s", "q_nmp", "q_mc", "eps"}
INT_COLUMNS = {"r", "M", "n_sims", "replicate", "k", "n_sets", "t"}


class SchemaError(Exception):
    pass


def read_csv(path, family):
    """Parse one of the versioned CSVs into a list of per-row dicts.

    Numeric columns come back as float/int (None when empty); everything
    else stays a string.  The schema tag and column set must match.
    """
    tag, columns = SCHEMAS[family]
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SchemaError(f"{path}: missing schema header line")
    header_meta = lines[0].lstrip("# ").strip()
    if not header_meta.startswith(tag):
        raise SchemaError(
            f"{path}: schema mismatch: expected {tag!r}, found {header_meta!r}")
    reader = csv.DictReader(io.StringIO("\n".join(lines[1:])))
    got = list(reader.fieldnames or [])
    if got != columns:
        missing = [c for c in columns if c not in got]
        extra = [c for c in got if c not in columns]
        raise SchemaError(
            f"{path}: column mismatch (missing {missing}, unexpected {extra})")
    rows = []
    for raw in reader:
        row = {}
        for key, val in raw.items():
            if val == "" or val is None:
                row[key] = None
            elif key in FLOAT_COLUMNS:
                row[key] = float(val)
            elif key in INT_COLUMNS:
                row[key] = int(float(val))
            else:
                row[key] = val
        rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no rows")
    meta = {}
    for token in header_meta.split()[2:]:
        if "=" in token:
            k, v = token.split("=", 1)
            meta[k] = v
    return rows, meta
