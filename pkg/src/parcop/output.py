"""Deterministic text serialization for data files.

All numeric cells render with 17 significant digits so that re-running a
command with identical configuration produces byte-identical files.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["fmt", "write_csv", "samples_rows", "summary_rows", "write_meta", "ensure_dir"]

ARTIFACT_VERSION = "0.1.0"

SAMPLES_HEADER = "x,y,z,u_x,u_y"
SUMMARY_HEADER = "pair,spearman,kendall,kdd,n"


def fmt(x) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def write_csv(path, header: str, rows) -> None:
    """Write a header plus an iterable of pre-formatted row strings."""
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def samples_rows(x, y, z, u_x, u_y):
    """Row strings for a samples CSV (columns x,y,z,u_x,u_y)."""
    cols = [np.asarray(c, dtype=float) for c in (x, y, z, u_x, u_y)]
    for i in range(len(cols[0])):
        yield ",".join(fmt(c[i]) for c in cols)


def summary_rows(labeled_summaries):
    """Row strings for (pair label, DependenceSummary) pairs."""
    for label, s in labeled_summaries:
        yield ",".join([label, fmt(s.spearman), fmt(s.kendall), fmt(s.kdd), str(s.n)])


def write_meta(path, entries: dict) -> None:
    """Write key=value metadata lines (resolved config, RNG name, version)."""
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key}={value}\n")


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
