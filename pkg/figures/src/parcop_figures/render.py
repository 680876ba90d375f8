"""Render per-scenario scatter panels from simulation sample CSVs.

Input files follow the simulator's schemas: `samples_<id>.csv` with columns
x,y,z,u_x,u_y and optional `summary_<id>.csv` with pair,spearman,kendall,kdd,n
rows. Panel annotations are recomputed from the raw columns and must agree
with the summary file within 1e-9.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy import stats

SAMPLE_COLUMNS = ("x", "y", "z", "u_x", "u_y")
_SAMPLES_RE = re.compile(r"^samples_(.+)\.csv$")

# Fixed rendering constants so identical inputs give identical images.
_FIGSIZE_PER_PANEL = 4.0
_FIG_HEIGHT = 4.2
_DPI = 110
_CMAP = "viridis"
_POINT_SIZE = 4.0


class RenderError(Exception):
    """Raised for missing inputs or schema mismatches."""


@dataclass(frozen=True)
class PanelSpec:
    """One scenario's rendering job."""

    scenario_id: str
    samples_path: str
    output_path: str
    panels: tuple[str, ...] = field(default=("marginal", "partial"))

    @classmethod
    def for_scenario(cls, scenario_id: str, samples_path: str, output_path: str) -> "PanelSpec":
        if scenario_id.startswith("11c"):
            panels = ("split_low", "split_high", "partial")
        else:
            panels = ("marginal", "partial")
        return cls(scenario_id, samples_path, output_path, panels)


def load_samples(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise RenderError(f"{path}: empty file")
        if tuple(header) != SAMPLE_COLUMNS:
            raise RenderError(
                f"{path}: expected columns {','.join(SAMPLE_COLUMNS)}, got {','.join(header)}"
            )
        rows = [[float(v) for v in row] for row in reader]
    if not rows:
        raise RenderError(f"{path}: no data rows")
    data = np.asarray(rows)
    return {name: data[:, i] for i, name in enumerate(SAMPLE_COLUMNS)}


def load_summary(path: str) -> dict[str, dict[str, float]]:
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out[row["pair"]] = {
                "spearman": float(row["spearman"]),
                "kendall": float(row["kendall"]),
            }
    return out


def rank_stats(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Spearman's rho and Kendall's tau-b recomputed from raw columns."""
    rho = float(stats.spearmanr(a, b).statistic)
    tau = float(stats.kendalltau(a, b).statistic)
    return rho, tau


def _panel_data(panel: str, cols: dict[str, np.ndarray]):
    if panel == "marginal":
        return cols["x"], cols["y"], cols["z"], "marginal (x, y)"
    if panel == "partial":
        return cols["u_x"], cols["u_y"], cols["z"], "partial (u_x, u_y)"
    if panel == "split_low":
        mask = cols["z"] < 0.5
        return cols["u_x"][mask], cols["u_y"][mask], cols["z"][mask], "conditional z < 0.5"
    if panel == "split_high":
        mask = cols["z"] >= 0.5
        return cols["u_x"][mask], cols["u_y"][mask], cols["z"][mask], "conditional z >= 0.5"
    raise RenderError(f"unknown panel kind {panel!r}")


def panel_annotations(spec: PanelSpec, cols: dict[str, np.ndarray]) -> dict[str, tuple[float, float]]:
    """Recomputed (rho, tau) per panel; checked against the summary CSV."""
    out = {}
    for panel in spec.panels:
        a, b, _, _ = _panel_data(panel, cols)
        out[panel] = rank_stats(a, b)
    return out


def check_against_summary(spec: PanelSpec, annotations, summary, tol: float = 1e-9):
    """Compare marginal/partial annotations against the summary rows."""
    pairs = {"marginal": "marginal", "partial": "partial"}
    for panel, pair in pairs.items():
        if panel not in annotations or pair not in summary:
            continue
        rho, tau = annotations[panel]
        for name, value in (("spearman", rho), ("kendall", tau)):
            ref = summary[pair][name]
            if abs(value - ref) > tol:
                raise RenderError(
                    f"{spec.scenario_id}: recomputed {panel} {name} {value!r} "
                    f"disagrees with summary {ref!r} beyond {tol}"
                )


def render_scenario(spec: PanelSpec, summary: dict | None = None) -> str:
    """Render one scenario to a raster image; returns the output path."""
    cols = load_samples(spec.samples_path)
    annotations = panel_annotations(spec, cols)
    if summary is not None:
        check_against_summary(spec, annotations, summary)

    n_panels = len(spec.panels)
    fig, axes = plt.subplots(
        1,
        n_panels,
        figsize=(_FIGSIZE_PER_PANEL * n_panels, _FIG_HEIGHT),
        squeeze=False,
        layout="constrained",
    )
    for ax, panel in zip(axes[0], spec.panels):
        a, b, z, title = _panel_data(panel, cols)
        rho, tau = annotations[panel]
        sc = ax.scatter(a, b, c=z, cmap=_CMAP, s=_POINT_SIZE, vmin=0.0, vmax=1.0)
        ax.set_title(f"{title}\nrho={rho:.3f}, tau={tau:.3f}", fontsize=9)
        ax.tick_params(labelsize=7)
    fig.colorbar(sc, ax=axes[0], label="z", fraction=0.03)
    fig.suptitle(f"scenario {spec.scenario_id}", fontsize=11)
    # Empty metadata keeps the PNG free of writer/timestamp chunks.
    fig.savefig(spec.output_path, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)
    return spec.output_path


def discover_scenarios(in_dir: str) -> list[tuple[str, str]]:
    """(scenario id, samples path) for every samples CSV in the directory."""
    if not os.path.isdir(in_dir):
        raise RenderError(f"input directory not found: {in_dir}")
    found = []
    for name in sorted(os.listdir(in_dir)):
        match = _SAMPLES_RE.match(name)
        if match:
            found.append((match.group(1), os.path.join(in_dir, name)))
    if not found:
        raise RenderError(f"no samples_<id>.csv files in {in_dir}")
    return found
