"""Command line for the figure renderer: `render --in DIR --out DIR [--scenario id]`."""

from __future__ import annotations

import argparse
import os
import sys

from .render import PanelSpec, RenderError, discover_scenarios, load_summary, render_scenario

__all__ = ["main"]


def _matches(scenario_id: str, wanted: str) -> bool:
    return scenario_id == wanted or scenario_id.split("_")[0] == wanted


def cmd_render(args) -> int:
    jobs = discover_scenarios(args.in_dir)
    if args.scenario is not None:
        jobs = [(sid, path) for sid, path in jobs if _matches(sid, args.scenario)]
        if not jobs:
            raise RenderError(f"no samples CSV matches scenario {args.scenario!r}")
    os.makedirs(args.out_dir, exist_ok=True)
    for sid, samples_path in jobs:
        summary_path = os.path.join(args.in_dir, f"summary_{sid}.csv")
        summary = load_summary(summary_path) if os.path.exists(summary_path) else None
        spec = PanelSpec.for_scenario(sid, samples_path, os.path.join(args.out_dir, f"scenario_{sid}.png"))
        render_scenario(spec, summary=summary)
        print(f"rendered scenario_{sid}.png")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="parcop-figures", description="Render scatter panels from simulation CSVs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one image per scenario")
    p.add_argument("--in", dest="in_dir", required=True, help="directory with samples CSVs")
    p.add_argument("--out", dest="out_dir", required=True, help="directory for images")
    p.add_argument("--scenario", help="render only this scenario id (e.g. 11c or 7_gaussian)")
    args = parser.parse_args(argv)
    try:
        return cmd_render(args)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
