"""Scatter-panel figure renderer for partial-copula simulation CSVs."""

from .render import PanelSpec, discover_scenarios, render_scenario

__version__ = "0.1.0"
