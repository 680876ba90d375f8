import numpy as np
import pytest
from scipy import stats

from parcop_figures.cli import main
from parcop_figures.render import (
    PanelSpec,
    RenderError,
    discover_scenarios,
    load_samples,
    load_summary,
    panel_annotations,
    render_scenario,
)


def _fmt(x):
    return format(float(x), ".17g")


def _write_scenario(tmp_path, scenario_id, n=200, seed=0):
    """Synthesize a samples/summary pair matching the simulator's schemas."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.random(n)
    x = np.clip(0.6 * z + 0.4 * rng.random(n), 0.0, 1.0)
    y = np.clip(0.6 * z + 0.4 * rng.random(n), 0.0, 1.0)
    u_x = rng.random(n)
    # Opposing dependence across the z-split, as in the cancellation scenario.
    u_y = np.clip(np.where(z < 0.5, 0.7 * u_x, 0.7 * (1.0 - u_x)) + 0.3 * rng.random(n), 0.0, 1.0)

    samples = tmp_path / f"samples_{scenario_id}.csv"
    lines = ["x,y,z,u_x,u_y"]
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in (x, y, z, u_x, u_y)))
    samples.write_text("\n".join(lines) + "\n")

    summary = tmp_path / f"summary_{scenario_id}.csv"
    rows = ["pair,spearman,kendall,kdd,n"]
    for pair, (a, b) in (("marginal", (x, y)), ("partial", (u_x, u_y))):
        rho = stats.spearmanr(a, b).statistic
        tau = stats.kendalltau(a, b).statistic
        rows.append(f"{pair},{_fmt(rho)},{_fmt(tau)},0,{n}")
    summary.write_text("\n".join(rows) + "\n")
    return samples, summary


class TestLoading:
    def test_load_samples_round_trip(self, tmp_path):
        samples, _ = _write_scenario(tmp_path, "2_gaussian")
        cols = load_samples(str(samples))
        assert set(cols) == {"x", "y", "z", "u_x", "u_y"}
        assert len(cols["x"]) == 200

    def test_schema_mismatch_names_columns(self, tmp_path):
        bad = tmp_path / "samples_bad.csv"
        bad.write_text("x,y,z\n0.1,0.2,0.3\n")
        with pytest.raises(RenderError, match="u_x"):
            load_samples(str(bad))

    def test_empty_file(self, tmp_path):
        bad = tmp_path / "samples_empty.csv"
        bad.write_text("")
        with pytest.raises(RenderError):
            load_samples(str(bad))

    def test_discover_scenarios(self, tmp_path):
        _write_scenario(tmp_path, "2_gaussian")
        _write_scenario(tmp_path, "11c_gaussian")
        found = discover_scenarios(str(tmp_path))
        assert [sid for sid, _ in found] == ["11c_gaussian", "2_gaussian"]

    def test_discover_empty_dir(self, tmp_path):
        with pytest.raises(RenderError, match="no samples"):
            discover_scenarios(str(tmp_path))


class TestPanelSpec:
    def test_default_two_panels(self, tmp_path):
        spec = PanelSpec.for_scenario("2_gaussian", "in.csv", "out.png")
        assert spec.panels == ("marginal", "partial")

    def test_11c_three_panels(self):
        spec = PanelSpec.for_scenario("11c_gaussian", "in.csv", "out.png")
        assert spec.panels == ("split_low", "split_high", "partial")


class TestRender:
    def test_renders_image_and_matches_summary(self, tmp_path):
        samples, summary = _write_scenario(tmp_path, "2_gaussian")
        out = tmp_path / "scenario_2_gaussian.png"
        spec = PanelSpec.for_scenario("2_gaussian", str(samples), str(out))
        path = render_scenario(spec, summary=load_summary(str(summary)))
        assert out.exists() and path == str(out)
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_deterministic_output(self, tmp_path):
        samples, _ = _write_scenario(tmp_path, "3_frank")
        out1 = tmp_path / "a.png"
        out2 = tmp_path / "b.png"
        for out in (out1, out2):
            render_scenario(PanelSpec.for_scenario("3_frank", str(samples), str(out)))
        assert out1.read_bytes() == out2.read_bytes()

    def test_mismatched_summary_rejected(self, tmp_path):
        samples, summary = _write_scenario(tmp_path, "2_gaussian")
        loaded = load_summary(str(summary))
        loaded["partial"]["spearman"] += 1e-6
        spec = PanelSpec.for_scenario(
            "2_gaussian", str(samples), str(tmp_path / "out.png")
        )
        with pytest.raises(RenderError, match="disagrees with summary"):
            render_scenario(spec, summary=loaded)

    def test_11c_split_panels_oppose(self, tmp_path):
        samples, _ = _write_scenario(tmp_path, "11c_gaussian")
        spec = PanelSpec.for_scenario(
            "11c_gaussian", str(samples), str(tmp_path / "out.png")
        )
        ann = panel_annotations(spec, load_samples(str(samples)))
        assert ann["split_low"][0] > 0.2
        assert ann["split_high"][0] < -0.2
        render_scenario(spec)
        assert (tmp_path / "out.png").exists()


class TestCli:
    def test_render_all(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        _write_scenario(in_dir, "2_gaussian")
        _write_scenario(in_dir, "11c_gaussian")
        out_dir = tmp_path / "out"
        rc = main(["render", "--in", str(in_dir), "--out", str(out_dir)])
        assert rc == 0
        assert (out_dir / "scenario_2_gaussian.png").exists()
        assert (out_dir / "scenario_11c_gaussian.png").exists()

    def test_scenario_filter(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        _write_scenario(in_dir, "2_gaussian")
        _write_scenario(in_dir, "11c_gaussian")
        out_dir = tmp_path / "out"
        rc = main(["render", "--in", str(in_dir), "--out", str(out_dir), "--scenario", "11c"])
        assert rc == 0
        assert not (out_dir / "scenario_2_gaussian.png").exists()
        assert (out_dir / "scenario_11c_gaussian.png").exists()

    def test_empty_input_dir_clean_error(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        out_dir = tmp_path / "out"
        rc = main(["render", "--in", str(in_dir), "--out", str(out_dir)])
        assert rc == 2
        assert not out_dir.exists()

    def test_unknown_scenario_filter(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        _write_scenario(in_dir, "2_gaussian")
        rc = main(["render", "--in", str(in_dir), "--out", str(tmp_path / "out"), "--scenario", "99"])
        assert rc == 2
