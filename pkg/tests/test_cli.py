import numpy as np
import pytest

from parcop.cli import main
from parcop.verify import CheckResult


def _read_csv(path):
    lines = path.read_text().strip().split("\n")
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def _summary_values(path):
    header, rows = _read_csv(path)
    out = {}
    for row in rows:
        out[row[0]] = dict(zip(header[1:], row[1:]))
    return out


class TestSimulate:
    def test_writes_expected_files(self, tmp_path):
        rc = main(["simulate", "--scenario", "2", "--n", "500", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "samples_2_gaussian.csv").exists()
        assert (tmp_path / "summary_2_gaussian.csv").exists()
        assert (tmp_path / "meta_2_gaussian.txt").exists()
        header, rows = _read_csv(tmp_path / "samples_2_gaussian.csv")
        assert header == ["x", "y", "z", "u_x", "u_y"]
        assert len(rows) == 500

    def test_conditional_independence_scenario_values(self, tmp_path):
        main(["simulate", "--scenario", "2", "--out", str(tmp_path)])
        summary = _summary_values(tmp_path / "summary_2_gaussian.csv")
        assert float(summary["marginal"]["spearman"]) >= 0.2
        assert abs(float(summary["partial"]["spearman"])) <= 0.035

    def test_scenario_10_marginal_equals_partial(self, tmp_path):
        main(["simulate", "--scenario", "10", "--family", "frank", "--out", str(tmp_path)])
        summary = _summary_values(tmp_path / "summary_10_frank.csv")
        diff = abs(
            float(summary["marginal"]["spearman"]) - float(summary["partial"]["spearman"])
        )
        assert diff <= 0.045

    def test_scenario_11c_partial_near_zero(self, tmp_path):
        main(["simulate", "--scenario", "11c", "--out", str(tmp_path)])
        summary = _summary_values(tmp_path / "summary_11c_gaussian.csv")
        assert abs(float(summary["partial"]["spearman"])) <= 0.035

    def test_unknown_scenario_usage_error(self, tmp_path, capsys):
        rc = main(["simulate", "--scenario", "99", "--out", str(tmp_path)])
        assert rc == 2
        assert "valid scenarios" in capsys.readouterr().err

    def test_byte_reproducible(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        for out in (out1, out2):
            main(["simulate", "--scenario", "3", "--family", "clayton", "--n", "300", "--out", str(out)])
        assert (out1 / "samples_3_clayton.csv").read_bytes() == (
            out2 / "samples_3_clayton.csv"
        ).read_bytes()
        assert (out1 / "summary_3_clayton.csv").read_bytes() == (
            out2 / "summary_3_clayton.csv"
        ).read_bytes()

    def test_meta_records_resolved_config(self, tmp_path):
        main(["simulate", "--scenario", "2", "--n", "100", "--seed", "7", "--out", str(tmp_path)])
        meta = (tmp_path / "meta_2_gaussian.txt").read_text()
        assert "rng=philox4x64" in meta
        assert "n=100" in meta
        assert "family=gaussian" in meta


class TestConfigFile:
    def test_file_values_used_and_flags_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("scenario=2\nn=200\nseed=5\n")
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(cfg), "--n", "150", "--out", str(out)])
        assert rc == 0
        _, rows = _read_csv(out / "samples_2_gaussian.csv")
        assert len(rows) == 150  # flag wins over file
        meta = (out / "meta_2_gaussian.txt").read_text()
        assert "seed=5" in meta  # file wins over default

    def test_bad_config_line(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("scenario 2\n")
        with pytest.raises(Exception):
            main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])


class TestEval:
    def test_fgm_cancellation(self, tmp_path):
        rc = main(
            ["eval", "--family", "fgm", "--theta-fn", "one-minus-2z", "--out", str(tmp_path)]
        )
        assert rc == 0
        header, rows = _read_csv(tmp_path / "eval.csv")
        assert header == ["record", "u", "v", "value"]
        grid = [r for r in rows if r[0] == "cdf"]
        assert len(grid) == 441
        for r in grid:
            u, v, c = float(r[1]), float(r[2]), float(r[3])
            assert abs(c - u * v) <= 1e-8
        scalars = {r[0]: r[3] for r in rows if r[0] != "cdf"}
        assert float(scalars["cert_k"]) == pytest.approx(0.25, abs=1e-3)
        assert scalars["cert_passed"] == "true"

    def test_clayton_constant_tau(self, tmp_path):
        main(["eval", "--family", "clayton", "--theta-fn", "const:2", "--out", str(tmp_path)])
        _, rows = _read_csv(tmp_path / "eval.csv")
        scalars = {r[0]: r[3] for r in rows if r[0] != "cdf"}
        assert float(scalars["partial_tau"]) == pytest.approx(0.5, abs=1e-5)

    def test_independence_all_zero(self, tmp_path):
        main(["eval", "--family", "indep", "--out", str(tmp_path)])
        _, rows = _read_csv(tmp_path / "eval.csv")
        scalars = {r[0]: r[3] for r in rows if r[0] != "cdf"}
        for key in ("partial_rho", "partial_tau", "conditional_kdd_sup"):
            assert float(scalars[key]) == 0.0

    def test_invalid_pairing_reports_constraint(self, tmp_path, capsys):
        rc = main(["eval", "--family", "clayton", "--theta-fn", "negexp", "--out", str(tmp_path)])
        assert rc == 2
        assert "domain" in capsys.readouterr().err

    def test_missing_theta_fn(self, tmp_path, capsys):
        rc = main(["eval", "--family", "frank", "--out", str(tmp_path)])
        assert rc == 2


class TestPitfall:
    def test_default_four_sigmas(self, tmp_path):
        rc = main(["pitfall", "--n", "2000", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "pitfall.csv")
        assert header == [
            "sigma",
            "pearson_marginal",
            "partial_correlation",
            "theory",
            "partial_copula_rho",
        ]
        assert [float(r[0]) for r in rows] == [0.1, 0.5, 1.0, 2.0]

    def test_values_track_theory(self, tmp_path):
        main(["pitfall", "--out", str(tmp_path)])
        _, rows = _read_csv(tmp_path / "pitfall.csv")
        for r in rows:
            sigma, _, partial, theory, cop_rho = (float(v) for v in r)
            assert theory == pytest.approx(2.0 / (2.0 + sigma * sigma), abs=1e-12)
            assert partial == pytest.approx(theory, abs=0.03)
            assert abs(cop_rho) <= 0.035

    def test_single_sigma_flag(self, tmp_path):
        main(["pitfall", "--sigma", "0.5", "--n", "1000", "--out", str(tmp_path)])
        _, rows = _read_csv(tmp_path / "pitfall.csv")
        assert len(rows) == 1
        assert float(rows[0][0]) == 0.5

    def test_nonpositive_sigma_rejected(self, tmp_path, capsys):
        rc = main(["pitfall", "--sigma", "-1", "--out", str(tmp_path)])
        assert rc == 2


class TestVerifyCommand:
    def test_report_written_and_exit_zero_on_pass(self, tmp_path, monkeypatch):
        fake = [CheckResult("alpha", True, 0.0, 1e-6), CheckResult("beta", True, 0.5, 1.0)]
        monkeypatch.setattr("parcop.cli.run_all", lambda **kw: fake)
        rc = main(["verify", "--out", str(tmp_path)])
        assert rc == 0
        report = (tmp_path / "verify_report.txt").read_text()
        assert "PASS alpha" in report and "PASS beta" in report

    def test_exit_nonzero_on_fail(self, tmp_path, monkeypatch):
        fake = [CheckResult("alpha", True, 0.0, 1e-6), CheckResult("beta", False, 2.0, 1.0)]
        monkeypatch.setattr("parcop.cli.run_all", lambda **kw: fake)
        rc = main(["verify", "--out", str(tmp_path)])
        assert rc == 1
        assert "FAIL beta" in (tmp_path / "verify_report.txt").read_text()

    def test_mutation_flag_forwarded(self, tmp_path, monkeypatch):
        seen = {}

        def fake_run_all(mutate_gumbel_h2=False):
            seen["mutate"] = mutate_gumbel_h2
            return [CheckResult("alpha", True, 0.0, 1e-6)]

        monkeypatch.setattr("parcop.cli.run_all", fake_run_all)
        main(["verify", "--mutate-gumbel-h2", "--out", str(tmp_path)])
        assert seen["mutate"] is True


class TestSweepSmall:
    def test_small_sweep_structure(self, tmp_path):
        rc = main(["sweep", "--n", "200", "--workers", "2", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "sweep.csv")
        assert header[0] == "scenario" and header[-1] == "status"
        assert len(rows) == 43
        assert all(r[-1] == "ok" for r in rows)
        # Per-scenario files exist for the figure renderer.
        assert (tmp_path / "samples_11c_gaussian.csv").exists()
        assert (tmp_path / "summary_11c_gaussian.csv").exists()
