"""Command-line surface: scenario simulation, full sweeps, analytic evaluation,
the verification suite, and the regression-residual pitfall demo.

Configuration resolution order: built-in defaults, then a key=value config
file (--config), then explicit flags. Every run writes the fully resolved
configuration into its metadata so outputs are self-describing.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ParcopError
from .measures import DependenceSummary, partial_correlation, pearson, spearman_emp
from .output import (
    ARTIFACT_VERSION,
    SAMPLES_HEADER,
    SUMMARY_HEADER,
    ensure_dir,
    fmt,
    samples_rows,
    summary_rows,
    write_csv,
    write_meta,
)
from .pair_copulas import CLAYTON, FGM, FRANK, GAUSSIAN, GUMBEL, INDEPENDENCE
from .partial import (
    ConditionalFamily,
    ThetaFunction,
    certify_bounds,
    conditional_kdd_sup,
    partial_cdf,
    partial_rho,
    partial_tau,
    pseudo_observations,
)
from .sampler import (
    RNG_NAME,
    ScenarioConfig,
    sample_cvine,
    sample_pitfall,
    scenario_table,
)
from .verify import report_lines, run_all

__all__ = ["main"]

_DEFAULT_N = 5000
_DEFAULT_SEED = 42
_DEFAULT_WORKERS = 4
_PITFALL_SIGMAS = (0.1, 0.5, 1.0, 2.0)

SWEEP_HEADER = (
    "scenario,family,params,marginal_rho,marginal_tau,partial_rho,partial_tau,"
    "analytic_partial_rho,analytic_partial_tau,status"
)
PITFALL_HEADER = "sigma,pearson_marginal,partial_correlation,theory,partial_copula_rho"
EVAL_HEADER = "record,u,v,value"


def _read_config_file(path: str) -> dict:
    """Parse key=value lines; blank lines and #-comments ignored."""
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParcopError(f"bad config line (expected key=value): {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _resolve(args, key, cast, default):
    """flags > config file > default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    file_values = getattr(args, "_file_values", {})
    if key in file_values:
        return cast(file_values[key])
    return default


def _meta_entries(command: str, resolved: dict) -> dict:
    entries = {"command": command, "rng": RNG_NAME, "version": ARTIFACT_VERSION}
    entries.update(resolved)
    entries["magnitudes"] = "artifact-chosen defaults (not prescribed by the study design)"
    return entries


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _find_scenario(table: list[ScenarioConfig], scenario: str, family: str | None):
    sub = ""
    sid_text = scenario
    if scenario and scenario[-1] in "abc":
        sid_text, sub = scenario[:-1], scenario[-1]
    try:
        sid = int(sid_text)
    except ValueError:
        sid = -1
    matches = [c for c in table if c.scenario_id == sid and c.sub_case == sub]
    if not matches:
        valid = sorted({f"{c.scenario_id}{c.sub_case}" for c in table}, key=lambda s: (len(s), s))
        raise ParcopError(f"unknown scenario {scenario!r}; valid scenarios: {', '.join(valid)}")
    if family is None:
        family = GAUSSIAN if sub == "" else matches[0].family
    picked = [c for c in matches if c.family == family]
    if not picked:
        valid = ", ".join(c.family for c in matches)
        raise ParcopError(f"family {family!r} not available for scenario {scenario}; valid: {valid}")
    return picked[0]


def _simulate_one(config: ScenarioConfig):
    """Sample one scenario; return (samples, pseudo pairs, marginal/partial summaries)."""
    samples = sample_cvine(config.model, config.n, config.seed)
    pairs = pseudo_observations(samples, config.model.c_xz, config.model.c_yz)
    marginal = DependenceSummary.from_columns(samples.x, samples.y)
    partial = DependenceSummary.from_columns(pairs.u_x, pairs.u_y)
    return samples, pairs, marginal, partial


def _write_scenario_files(
    out_dir: str, base_seed: int, config: ScenarioConfig, samples, pairs, marginal, partial
):
    cid = config.config_id
    write_csv(
        os.path.join(out_dir, f"samples_{cid}.csv"),
        SAMPLES_HEADER,
        samples_rows(samples.x, samples.y, samples.z, pairs.u_x, pairs.u_y),
    )
    write_csv(
        os.path.join(out_dir, f"summary_{cid}.csv"),
        SUMMARY_HEADER,
        summary_rows([("marginal", marginal), ("partial", partial)]),
    )
    write_meta(
        os.path.join(out_dir, f"meta_{cid}.txt"),
        _meta_entries(
            "simulate",
            {
                "scenario": f"{config.scenario_id}{config.sub_case}",
                "family": config.family,
                "params": config.params_label(),
                "n": config.n,
                "seed": base_seed,
                "substream_seed": config.seed,
            },
        ),
    )


def cmd_simulate(args) -> int:
    n = _resolve(args, "n", int, _DEFAULT_N)
    seed = _resolve(args, "seed", int, _DEFAULT_SEED)
    scenario = _resolve(args, "scenario", str, None)
    family = _resolve(args, "family", str, None)
    out_dir = ensure_dir(_resolve(args, "out", str, "."))
    if scenario is None:
        raise ParcopError("simulate requires --scenario")
    config = _find_scenario(scenario_table(n=n, seed=seed), scenario, family)
    samples, pairs, marginal, partial = _simulate_one(config)
    _write_scenario_files(out_dir, seed, config, samples, pairs, marginal, partial)
    print(f"wrote samples_{config.config_id}.csv, summary_{config.config_id}.csv in {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _analytic_measures(cond: ConditionalFamily) -> tuple[float, float]:
    return partial_rho(cond), partial_tau(cond)


def _sweep_row(config: ScenarioConfig):
    """Worker: everything for one sweep row, computed but not written."""
    try:
        samples, pairs, marginal, partial = _simulate_one(config)
        rho_a, tau_a = _analytic_measures(config.model.cond)
        row = ",".join(
            [
                f"{config.scenario_id}{config.sub_case}",
                config.family,
                f'"{config.params_label()}"',
                fmt(marginal.spearman),
                fmt(marginal.kendall),
                fmt(partial.spearman),
                fmt(partial.kendall),
                fmt(rho_a),
                fmt(tau_a),
                "ok",
            ]
        )
        return row, (config, samples, pairs, marginal, partial), None
    except Exception as exc:  # FAIL-but-continue: record, keep sweeping
        row = ",".join(
            [
                f"{config.scenario_id}{config.sub_case}",
                config.family,
                f'"{config.params_label()}"',
                *([""] * 6),
                f"error: {exc}".replace(",", ";"),
            ]
        )
        return row, None, exc


def cmd_sweep(args) -> int:
    n = _resolve(args, "n", int, _DEFAULT_N)
    seed = _resolve(args, "seed", int, _DEFAULT_SEED)
    workers = _resolve(args, "workers", int, _DEFAULT_WORKERS)
    out_dir = ensure_dir(_resolve(args, "out", str, "."))
    table = scenario_table(n=n, seed=seed)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(_sweep_row, table))

    # Single collector writes everything in table order for byte-stable output.
    failures = 0
    rows = []
    for row, payload, exc in results:
        rows.append(row)
        if exc is not None:
            failures += 1
            continue
        _write_scenario_files(out_dir, seed, *payload)
    write_csv(os.path.join(out_dir, "sweep.csv"), SWEEP_HEADER, rows)
    write_meta(
        os.path.join(out_dir, "meta_sweep.txt"),
        _meta_entries("sweep", {"n": n, "seed": seed, "workers": workers, "rows": len(rows)}),
    )
    print(f"sweep: {len(rows)} rows, {failures} failed, wrote {out_dir}/sweep.csv")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

_THETA_FN_NAMES = {"exp": "exp_z", "negexp": "neg_exp_z", "one-minus-2z": "one_minus_2z"}
_EVAL_FAMILIES = (INDEPENDENCE, GAUSSIAN, FRANK, CLAYTON, GUMBEL, FGM)


def _parse_theta_fn(text: str | None) -> ThetaFunction | None:
    if text is None:
        return None
    if text.startswith("const:"):
        return ThetaFunction("constant", value=float(text.split(":", 1)[1]))
    if text in _THETA_FN_NAMES:
        return ThetaFunction(_THETA_FN_NAMES[text])
    raise ParcopError(
        f"bad --theta-fn {text!r}; expected const:<v>, exp, negexp, or one-minus-2z"
    )


def cmd_eval(args) -> int:
    family = _resolve(args, "family", str, None)
    theta_text = _resolve(args, "theta_fn", str, None)
    rotation = _resolve(args, "rotation", int, 0)
    out_dir = ensure_dir(_resolve(args, "out", str, "."))
    if family is None:
        raise ParcopError(f"eval requires --family; valid: {', '.join(_EVAL_FAMILIES)}")
    if family == INDEPENDENCE:
        cond = ConditionalFamily(INDEPENDENCE)
    else:
        theta_fn = _parse_theta_fn(theta_text)
        if theta_fn is None:
            raise ParcopError("eval requires --theta-fn for parametric families")
        cond = ConditionalFamily(family, theta_fn, rotation)

    g = np.linspace(0.0, 1.0, 21)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    grid = partial_cdf(cond, uu, vv)
    rows = [
        ",".join(["cdf", fmt(u), fmt(v), fmt(c)])
        for u, v, c in zip(uu.ravel(), vv.ravel(), np.asarray(grid).ravel())
    ]
    rows.append(f"partial_rho,,,{fmt(partial_rho(cond))}")
    rows.append(f"partial_tau,,,{fmt(partial_tau(cond))}")
    rows.append(f"conditional_kdd_sup,,,{fmt(conditional_kdd_sup(cond))}")
    cert = certify_bounds(cond)
    rows.append(f"cert_k,,,{fmt(cert.k)}")
    rows.append(f"cert_rho_partial,,,{fmt(cert.rho_partial)}")
    rows.append(f"cert_tau_partial,,,{fmt(cert.tau_partial)}")
    rows.append(f"cert_kdd_partial,,,{fmt(cert.kdd_partial)}")
    rows.append(f"cert_qpd_class,,,{cert.qpd_class}")
    rows.append(f"cert_passed,,,{str(cert.passed).lower()}")
    write_csv(os.path.join(out_dir, "eval.csv"), EVAL_HEADER, rows)
    write_meta(
        os.path.join(out_dir, "meta_eval.txt"),
        _meta_entries("eval", {"cond": cond.label(), "grid": "21x21"}),
    )
    print(f"wrote {out_dir}/eval.csv ({cond.label()})")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    out_dir = ensure_dir(_resolve(args, "out", str, "."))
    mutate = bool(getattr(args, "mutate_gumbel_h2", False))
    results = run_all(mutate_gumbel_h2=mutate)
    lines = report_lines(results)
    with open(os.path.join(out_dir, "verify_report.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# pitfall
# ---------------------------------------------------------------------------


def _pitfall_row(sigma: float, n: int, seed: int) -> str:
    sample = sample_pitfall(sigma, n, seed)
    return ",".join(
        [
            fmt(sigma),
            fmt(pearson(sample.x, sample.y)),
            fmt(partial_correlation(sample.x, sample.y, sample.z)),
            fmt(2.0 / (2.0 + sigma * sigma)),
            fmt(spearman_emp(sample.u_x, sample.u_y)),
        ]
    )


def cmd_pitfall(args) -> int:
    n = _resolve(args, "n", int, _DEFAULT_N)
    seed = _resolve(args, "seed", int, _DEFAULT_SEED)
    sigma = _resolve(args, "sigma", float, None)
    out_dir = ensure_dir(_resolve(args, "out", str, "."))
    if sigma is not None and not sigma > 0.0:
        raise ParcopError(f"sigma must be positive, got {sigma}")
    sigmas = (sigma,) if sigma is not None else _PITFALL_SIGMAS
    rows = [_pitfall_row(s, n, seed) for s in sigmas]
    write_csv(os.path.join(out_dir, "pitfall.csv"), PITFALL_HEADER, rows)
    write_meta(
        os.path.join(out_dir, "meta_pitfall.txt"),
        _meta_entries(
            "pitfall", {"sigmas": ";".join(fmt(s) for s in sigmas), "n": n, "seed": seed}
        ),
    )
    print(f"wrote {out_dir}/pitfall.csv ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parcop", description="Partial-copula simulation and analysis toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file (flags override it)")
        p.add_argument("--out", help="output directory (default: current directory)")

    p = sub.add_parser("simulate", help="sample one scenario and summarize it")
    common(p)
    p.add_argument("--scenario", help="scenario id, e.g. 2 or 11c")
    p.add_argument("--family", choices=[GAUSSIAN, FRANK, CLAYTON, GUMBEL])
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("sweep", help="run the full scenario matrix")
    common(p)
    p.add_argument("--workers", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("eval", help="analytic partial-copula measures for one model")
    common(p)
    p.add_argument("--family", choices=list(_EVAL_FAMILIES))
    p.add_argument("--theta-fn", dest="theta_fn", help="const:<v> | exp | negexp | one-minus-2z")
    p.add_argument("--rotation", type=int, choices=[0, 90, 180, 270])

    p = sub.add_parser("verify", help="run the invariant suite, write verify_report.txt")
    common(p)
    p.add_argument(
        "--mutate-gumbel-h2", action="store_true", help=argparse.SUPPRESS
    )  # dev-mode mutation hook for testing the suite itself

    p = sub.add_parser("pitfall", help="conditional-independence pitfall demo")
    common(p)
    p.add_argument("--sigma", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)

    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "verify": cmd_verify,
    "pitfall": cmd_pitfall,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args._file_values = _read_config_file(args.config) if args.config else {}
    try:
        return _COMMANDS[args.command](args)
    except ParcopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
