"""Self-verification suite: every structural property of the library as a
named PASS/FAIL check, plus the certificate sweep over a fixed config matrix.

The report format is one line per check:
    PASS <name> value=<measured> tol=<tolerance>
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import kdd_emp, kendall_emp, spearman_emp
from .pair_copulas import (
    CLAYTON,
    FGM,
    FRANK,
    GAUSSIAN,
    GUMBEL,
    INDEPENDENCE,
    PairCopulaSpec,
    cdf,
    h1,
    h1_inv,
    h2,
    h2_inv,
    kdd_analytic,
    rho_s_analytic,
)
from .partial import (
    ConditionalFamily,
    ThetaFunction,
    certify_bounds,
    partial_cdf,
    partial_rho,
    partial_rho_from_cdf,
    pseudo_observations,
)
from .sampler import VineModel, sample_cvine

__all__ = ["CheckResult", "verify_configs", "run_all", "report_lines"]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named invariant check."""

    name: str
    passed: bool
    value: float
    tol: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} value={self.value:.6g} tol={self.tol:.6g}"


def report_lines(results) -> list[str]:
    lines = [r.line() for r in results]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"# {len(results)} checks, {n_fail} failed")
    return lines


# ---------------------------------------------------------------------------
# The certificate config matrix: every family, every theta-function kind that
# its parameter domain admits, both signs, and rotated variants. 22 configs.
# ---------------------------------------------------------------------------


def verify_configs() -> list[tuple[str, ConditionalFamily]]:
    c = ConditionalFamily
    t = ThetaFunction
    return [
        ("indep", c(INDEPENDENCE)),
        ("gaussian_const_pos", c(GAUSSIAN, t("constant", value=0.6))),
        ("gaussian_const_neg", c(GAUSSIAN, t("constant", value=-0.6))),
        ("gaussian_one_minus_2z", c(GAUSSIAN, t("one_minus_2z"))),
        ("gaussian_table", c(GAUSSIAN, t("table", table=((0.0, -0.5), (0.5, 0.0), (1.0, 0.8))))),
        ("frank_const_pos", c(FRANK, t("constant", value=5.0))),
        ("frank_const_neg", c(FRANK, t("constant", value=-5.0))),
        ("frank_exp_z", c(FRANK, t("exp_z"))),
        ("frank_neg_exp_z", c(FRANK, t("neg_exp_z"))),
        ("frank_table", c(FRANK, t("table", table=((0.0, -4.0), (0.5, 1.0), (1.0, 6.0))))),
        ("clayton_const", c(CLAYTON, t("constant", value=2.0))),
        ("clayton_const_weak", c(CLAYTON, t("constant", value=0.5))),
        ("clayton_exp_z", c(CLAYTON, t("exp_z"))),
        ("clayton_rot90", c(CLAYTON, t("constant", value=2.0), rotation=90)),
        ("gumbel_const", c(GUMBEL, t("constant", value=2.0))),
        ("gumbel_const_weak", c(GUMBEL, t("constant", value=1.5))),
        ("gumbel_exp_z", c(GUMBEL, t("exp_z"))),
        ("gumbel_rot90", c(GUMBEL, t("constant", value=2.0), rotation=90)),
        ("fgm_const_pos", c(FGM, t("constant", value=0.7))),
        ("fgm_const_neg", c(FGM, t("constant", value=-0.7))),
        ("fgm_one_minus_2z", c(FGM, t("one_minus_2z"))),
        ("fgm_table", c(FGM, t("table", table=((0.0, 0.8), (1.0, -0.8))))),
    ]


# Representative concrete specs exercised by the structural checks.
def _representative_specs() -> list[PairCopulaSpec]:
    return [
        PairCopulaSpec(INDEPENDENCE),
        PairCopulaSpec(GAUSSIAN, 0.6),
        PairCopulaSpec(GAUSSIAN, -0.8),
        PairCopulaSpec(FRANK, 5.0),
        PairCopulaSpec(FRANK, -3.0),
        PairCopulaSpec(CLAYTON, 2.0),
        PairCopulaSpec(CLAYTON, 2.0, 90),
        PairCopulaSpec(CLAYTON, 0.7, 180),
        PairCopulaSpec(GUMBEL, 2.0),
        PairCopulaSpec(GUMBEL, 1.5, 270),
        PairCopulaSpec(FGM, 0.7),
        PairCopulaSpec(FGM, -1.0),
    ]


def _grid(n: int = 19) -> np.ndarray:
    return np.linspace(0.05, 0.95, n)


def _check_axioms() -> CheckResult:
    g = _grid()
    worst = 0.0
    for spec in _representative_specs():
        worst = max(worst, np.max(np.abs(cdf(spec, g, np.zeros_like(g)))))
        worst = max(worst, np.max(np.abs(cdf(spec, g, np.ones_like(g)) - g)))
        worst = max(worst, np.max(np.abs(cdf(spec, np.zeros_like(g), g))))
        worst = max(worst, np.max(np.abs(cdf(spec, np.ones_like(g), g) - g)))
        # 2-increasing rectangle mass on the grid must be nonnegative.
        uu, vv = np.meshgrid(g, g, indexing="ij")
        c = cdf(spec, uu, vv)
        mass = c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1]
        worst = max(worst, float(np.max(np.maximum(0.0, -mass))))
    return CheckResult("copula_axioms", worst <= 1e-10, float(worst), 1e-10)


def _check_h2_fd(mutate_gumbel_h2: bool = False) -> CheckResult:
    """h2 = dC/dv against central differences of the CDF."""
    g = _grid()
    eps = 1e-5
    worst = 0.0
    for spec in _representative_specs():
        uu, vv = np.meshgrid(g, g, indexing="ij")
        fd = (cdf(spec, uu, vv + eps) - cdf(spec, uu, vv - eps)) / (2.0 * eps)
        hv = h2(spec, uu, vv)
        if mutate_gumbel_h2 and spec.family == GUMBEL:
            hv = hv + 1e-3
        worst = max(worst, float(np.max(np.abs(hv - fd))))
    return CheckResult("h2_central_difference", worst <= 1e-6, worst, 1e-6)


def _check_round_trips() -> CheckResult:
    g = _grid()
    worst = 0.0
    for spec in _representative_specs():
        ww, vv = np.meshgrid(g, g, indexing="ij")
        worst = max(worst, float(np.max(np.abs(h2(spec, h2_inv(spec, ww, vv), vv) - ww))))
        worst = max(worst, float(np.max(np.abs(h1(spec, ww, h1_inv(spec, vv, ww)) - vv))))
    return CheckResult("h_round_trips", worst <= 1e-8, worst, 1e-8)


def _check_constant_theta_equivalence(configs) -> CheckResult:
    """Constant-theta mixtures collapse to the conditional copula itself."""
    g = np.linspace(0.0, 1.0, 21)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    worst = 0.0
    for _, cond in configs:
        if cond.family != INDEPENDENCE and cond.theta_fn.kind != "constant":
            continue
        mix = partial_cdf(cond, uu, vv)
        fixed = cdf(cond.at(0.5), uu, vv)
        worst = max(worst, float(np.max(np.abs(mix - fixed))))
    return CheckResult("constant_theta_mixture_equivalence", worst <= 1e-8, worst, 1e-8)


def _check_fgm_cancellation() -> list[CheckResult]:
    cond = ConditionalFamily(FGM, ThetaFunction("one_minus_2z"))
    g = np.linspace(0.0, 1.0, 21)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    dev = float(np.max(np.abs(partial_cdf(cond, uu, vv) - uu * vv)))
    kdd_ends = max(
        abs(kdd_analytic(cond.at(0.0)) - 0.25), abs(kdd_analytic(cond.at(1.0)) - 0.25)
    )
    return [
        CheckResult("fgm_cancellation_grid", dev <= 1e-8, dev, 1e-8),
        CheckResult("fgm_endpoint_kdd", kdd_ends <= 1e-3, float(kdd_ends), 1e-3),
    ]


def _check_expected_rho(configs) -> list[CheckResult]:
    worst = 0.0
    for _, cond in configs:
        worst = max(worst, abs(partial_rho(cond) - partial_rho_from_cdf(cond)))
    odd = abs(partial_rho(ConditionalFamily(GAUSSIAN, ThetaFunction("one_minus_2z"))))
    return [
        CheckResult("expected_rho_vs_mixture_cdf", worst <= 1e-6, worst, 1e-6),
        CheckResult("gaussian_odd_theta_zero_rho", odd <= 1e-7, odd, 1e-7),
    ]


def _check_certificates(configs) -> list[CheckResult]:
    results = []
    n_fail = 0
    fgm_band_worst = 0.0
    for config_id, cond in configs:
        cert = certify_bounds(cond, config_id=config_id)
        if not cert.passed:
            n_fail += 1
        if cond.family == FGM and cond.theta_fn is not None and cond.theta_fn.kind == "constant":
            fgm_band_worst = max(fgm_band_worst, abs(cert.rho_partial) - 0.75)
    results.append(
        CheckResult(f"bound_certificates_{len(configs)}_configs", n_fail == 0, float(n_fail), 0.0)
    )
    results.append(
        CheckResult("fgm_constant_rho_band", fgm_band_worst <= 0.0, fgm_band_worst, 0.0)
    )
    return results


def _check_sampler_consistency() -> CheckResult:
    """Empirical Spearman of pseudo-observations vs the analytic value."""
    worst = 0.0
    cases = [
        (GAUSSIAN, 0.6, 0),
        (FRANK, 5.0, 0),
        (CLAYTON, 2.0, 0),
        (GUMBEL, 2.0, 90),
    ]
    margins = PairCopulaSpec(GAUSSIAN, 0.5)
    for i, (family, theta, rotation) in enumerate(cases):
        cond = ConditionalFamily(family, ThetaFunction("constant", value=theta), rotation)
        model = VineModel(c_xz=margins, c_yz=margins, cond=cond)
        samples = sample_cvine(model, n=5000, seed=777 + i)
        pairs = pseudo_observations(samples, margins, margins)
        emp = spearman_emp(pairs.u_x, pairs.u_y)
        worst = max(worst, abs(emp - rho_s_analytic(cond.at(0.5))))
    return CheckResult("sampler_vs_analytic_spearman", worst <= 0.045, worst, 0.045)


def _kendall_brute(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = np.sign(a[:, None] - a[None, :])
    db = np.sign(b[:, None] - b[None, :])
    iu = np.triu_indices(len(a), k=1)
    s = float(np.sum(da[iu] * db[iu]))
    n1 = float(np.sum(da[iu] == 0))
    n2 = float(np.sum(db[iu] == 0))
    n0 = len(iu[0])
    return s / np.sqrt((n0 - n1) * (n0 - n2))


def _kdd_brute(a, b) -> float:
    from .measures import average_ranks

    n = len(a)
    ra = average_ranks(a) / (n + 1.0)
    rb = average_ranks(b) / (n + 1.0)
    best = 0.0
    for u in ra:
        for v in rb:
            c = np.sum((ra <= u) & (rb <= v)) / n
            best = max(best, abs(c - u * v))
    return min(1.0, 4.0 * best)


def _check_kendall_fast_vs_brute() -> CheckResult:
    rng = np.random.Generator(np.random.Philox(key=2024))
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(10, 201))
        a = rng.random(n)
        b = rng.random(n)
        if rng.random() < 0.3:
            a = np.round(a, 1)  # force ties
            b = np.round(b, 1)
        worst = max(worst, abs(kendall_emp(a, b) - _kendall_brute(a, b)))
    return CheckResult("kendall_fast_vs_brute", worst <= 1e-12, worst, 1e-12)


def _check_kdd_fast_vs_brute() -> CheckResult:
    rng = np.random.Generator(np.random.Philox(key=2025))
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(5, 51))
        a = rng.random(n)
        b = rng.random(n)
        worst = max(worst, abs(kdd_emp(a, b) - _kdd_brute(a, b)))
    return CheckResult("kdd_fast_vs_brute", worst <= 1e-12, worst, 1e-12)


def run_all(mutate_gumbel_h2: bool = False) -> list[CheckResult]:
    """Run the full invariant suite; a failure is reported, never raised."""
    configs = verify_configs()
    results: list[CheckResult] = []
    results.append(_check_axioms())
    results.append(_check_h2_fd(mutate_gumbel_h2=mutate_gumbel_h2))
    results.append(_check_round_trips())
    results.append(_check_constant_theta_equivalence(configs))
    results.extend(_check_fgm_cancellation())
    results.extend(_check_expected_rho(configs))
    results.extend(_check_certificates(configs))
    results.append(_check_sampler_consistency())
    results.append(_check_kendall_fast_vs_brute())
    results.append(_check_kdd_fast_vs_brute())
    return results
