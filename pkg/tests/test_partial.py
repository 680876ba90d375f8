import numpy as np
import pytest

from parcop.errors import DomainError, InputError
from parcop.pair_copulas import (
    CLAYTON,
    FGM,
    FRANK,
    GAUSSIAN,
    GUMBEL,
    INDEPENDENCE,
    PairCopulaSpec,
    cdf,
    kdd_analytic,
    rho_s_analytic,
    tau_analytic,
)
from parcop.partial import (
    ConditionalFamily,
    PseudoPairs,
    ThetaFunction,
    certify_bounds,
    conditional_kdd_sup,
    partial_cdf,
    partial_rho,
    partial_rho_from_cdf,
    partial_tau,
    pseudo_observations,
)
from parcop.sampler import VineModel, sample_cvine


class TestThetaFunction:
    def test_constant(self):
        fn = ThetaFunction("constant", value=2.5)
        assert fn(0.3) == 2.5
        assert np.all(fn(np.linspace(0, 1, 5)) == 2.5)

    def test_exp_kinds(self):
        assert ThetaFunction("exp_z")(1.0) == pytest.approx(np.e)
        assert ThetaFunction("neg_exp_z")(0.0) == pytest.approx(-1.0)

    def test_one_minus_2z(self):
        fn = ThetaFunction("one_minus_2z")
        assert fn(0.0) == 1.0 and fn(1.0) == -1.0 and fn(0.5) == 0.0

    def test_table_interpolation(self):
        fn = ThetaFunction("table", table=((0.0, -1.0), (0.5, 0.0), (1.0, 2.0)))
        assert fn(0.25) == pytest.approx(-0.5)
        assert fn(0.75) == pytest.approx(1.0)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            ThetaFunction("cosine")

    def test_constant_requires_value(self):
        with pytest.raises(DomainError):
            ThetaFunction("constant")

    def test_table_knots_must_cover_unit_interval(self):
        with pytest.raises(DomainError):
            ThetaFunction("table", table=((0.1, 0.0), (1.0, 1.0)))

    def test_table_knots_must_increase(self):
        with pytest.raises(DomainError):
            ThetaFunction("table", table=((0.0, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0)))


class TestConditionalFamily:
    def test_domain_checked_over_z(self):
        # exp(z) exceeds the FGM domain [-1, 1] for z > 0.
        with pytest.raises(DomainError, match="fgm"):
            ConditionalFamily(FGM, ThetaFunction("exp_z"))

    def test_clayton_rejects_sign_changing_theta(self):
        with pytest.raises(DomainError):
            ConditionalFamily(CLAYTON, ThetaFunction("one_minus_2z"))

    def test_independence_takes_no_theta(self):
        with pytest.raises(DomainError):
            ConditionalFamily(INDEPENDENCE, ThetaFunction("constant", value=1.0))

    def test_at_returns_concrete_spec(self):
        cond = ConditionalFamily(GAUSSIAN, ThetaFunction("one_minus_2z"))
        spec = cond.at(0.25)
        assert spec.family == GAUSSIAN and spec.theta == pytest.approx(0.5)

    def test_rotation_carried_to_conditionals(self):
        cond = ConditionalFamily(GUMBEL, ThetaFunction("constant", value=2.0), rotation=90)
        assert cond.at(0.5).rotation == 90


class TestPartialCdf:
    def test_constant_theta_equals_conditional(self):
        g = np.linspace(0.0, 1.0, 21)
        uu, vv = np.meshgrid(g, g, indexing="ij")
        for cond in (
            ConditionalFamily(GAUSSIAN, ThetaFunction("constant", value=0.6)),
            ConditionalFamily(FRANK, ThetaFunction("constant", value=-4.0)),
            ConditionalFamily(CLAYTON, ThetaFunction("constant", value=2.0)),
            ConditionalFamily(GUMBEL, ThetaFunction("constant", value=2.0), rotation=90),
        ):
            mix = partial_cdf(cond, uu, vv)
            assert np.max(np.abs(mix - cdf(cond.at(0.5), uu, vv))) <= 1e-8

    def test_fgm_antisymmetric_theta_cancels_to_independence(self):
        cond = ConditionalFamily(FGM, ThetaFunction("one_minus_2z"))
        g = np.linspace(0.0, 1.0, 21)
        uu, vv = np.meshgrid(g, g, indexing="ij")
        assert np.max(np.abs(partial_cdf(cond, uu, vv) - uu * vv)) <= 1e-8

    def test_mixture_is_a_copula_51_grid(self):
        cond = ConditionalFamily(FRANK, ThetaFunction("exp_z"))
        g = np.linspace(0.0, 1.0, 51)
        uu, vv = np.meshgrid(g, g, indexing="ij")
        c = partial_cdf(cond, uu, vv)
        assert np.max(np.abs(c[:, 0])) <= 1e-8
        assert np.max(np.abs(c[0, :])) <= 1e-8
        assert np.max(np.abs(c[:, -1] - g)) <= 1e-8
        assert np.max(np.abs(c[-1, :] - g)) <= 1e-8
        mass = c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1]
        assert mass.min() >= -1e-8

    def test_independence_fast_path(self):
        cond = ConditionalFamily(INDEPENDENCE)
        assert partial_cdf(cond, 0.3, 0.7) == pytest.approx(0.21, abs=1e-15)

    def test_arguments_validated(self):
        cond = ConditionalFamily(FRANK, ThetaFunction("constant", value=2.0))
        with pytest.raises(DomainError):
            partial_cdf(cond, -0.2, 0.5)


class TestPartialMeasures:
    def test_constant_theta_matches_spec_measures(self):
        cond = ConditionalFamily(CLAYTON, ThetaFunction("constant", value=2.0))
        assert partial_rho(cond) == pytest.approx(rho_s_analytic(cond.at(0.5)), abs=1e-9)
        assert partial_tau(cond) == pytest.approx(tau_analytic(cond.at(0.5)), abs=1e-9)

    def test_fgm_constant_is_theta_over_three(self):
        cond = ConditionalFamily(FGM, ThetaFunction("constant", value=0.9))
        assert partial_rho(cond) == pytest.approx(0.3, abs=1e-8)

    def test_fgm_antisymmetric_rho_zero(self):
        cond = ConditionalFamily(FGM, ThetaFunction("one_minus_2z"))
        assert abs(partial_rho(cond)) <= 1e-9

    def test_gaussian_odd_theta_rho_zero(self):
        cond = ConditionalFamily(GAUSSIAN, ThetaFunction("one_minus_2z"))
        assert abs(partial_rho(cond)) <= 1e-7

    def test_two_rho_routes_agree(self):
        for cond in (
            ConditionalFamily(FRANK, ThetaFunction("exp_z")),
            ConditionalFamily(GAUSSIAN, ThetaFunction("table", table=((0.0, -0.5), (1.0, 0.9)))),
            ConditionalFamily(GUMBEL, ThetaFunction("constant", value=3.0)),
        ):
            assert abs(partial_rho(cond) - partial_rho_from_cdf(cond)) <= 1e-6

    def test_independence_measures_zero(self):
        cond = ConditionalFamily(INDEPENDENCE)
        assert partial_rho(cond) == 0.0
        assert partial_tau(cond) == 0.0
        assert conditional_kdd_sup(cond) == 0.0


class TestConditionalKddSup:
    def test_constant_equals_pointwise_kdd(self):
        cond = ConditionalFamily(FRANK, ThetaFunction("constant", value=5.0))
        assert conditional_kdd_sup(cond) == pytest.approx(
            kdd_analytic(cond.at(0.5)), abs=1e-12
        )

    def test_fgm_antisymmetric_attains_quarter(self):
        cond = ConditionalFamily(FGM, ThetaFunction("one_minus_2z"))
        assert conditional_kdd_sup(cond) == pytest.approx(0.25, abs=1e-3)
        assert kdd_analytic(cond.at(0.0)) == pytest.approx(0.25, abs=1e-3)
        assert kdd_analytic(cond.at(1.0)) == pytest.approx(0.25, abs=1e-3)


class TestCertificates:
    def test_independence_certificate(self):
        cert = certify_bounds(ConditionalFamily(INDEPENDENCE))
        assert cert.passed
        assert cert.k == 0.0
        assert cert.rho_partial == 0.0 and cert.tau_partial == 0.0

    def test_fgm_antisymmetric_certificate(self):
        cert = certify_bounds(ConditionalFamily(FGM, ThetaFunction("one_minus_2z")))
        assert cert.passed
        assert cert.k == pytest.approx(0.25, abs=1e-3)
        assert abs(cert.rho_partial) <= 1e-8
        assert cert.kdd_partial <= 1e-8

    def test_fgm_positive_constant_qpd_preserved(self):
        cert = certify_bounds(ConditionalFamily(FGM, ThetaFunction("constant", value=1.0)))
        assert cert.passed
        assert cert.conditional_qpd == "QPD" and cert.qpd_class == "QPD"

    def test_qnd_preserved(self):
        cert = certify_bounds(ConditionalFamily(FRANK, ThetaFunction("constant", value=-5.0)))
        assert cert.passed
        assert cert.conditional_qpd == "QND" and cert.qpd_class == "QND"

    def test_csv_row_shape(self):
        cert = certify_bounds(ConditionalFamily(FGM, ThetaFunction("constant", value=0.5)))
        row = cert.to_csv_row()
        assert len(row.split(",")) == len(cert.csv_header.split(","))
        assert row.endswith("true")


class TestPseudoObservations:
    def test_recovers_vine_internals(self):
        margins = PairCopulaSpec(GAUSSIAN, 0.6)
        cond = ConditionalFamily(FRANK, ThetaFunction("constant", value=4.0))
        model = VineModel(c_xz=margins, c_yz=margins, cond=cond)
        samples = sample_cvine(model, n=500, seed=11)
        pairs = pseudo_observations(samples, margins, margins)
        assert np.max(np.abs(pairs.u_x - samples.internals["w_x"])) <= 1e-10
        assert np.max(np.abs(pairs.u_y - samples.internals["u_y"])) <= 1e-10

    def test_uniformity_at_n5000(self):
        margins = PairCopulaSpec(CLAYTON, 2.0)
        cond = ConditionalFamily(GUMBEL, ThetaFunction("constant", value=2.0))
        model = VineModel(c_xz=margins, c_yz=margins, cond=cond)
        samples = sample_cvine(model, n=5000, seed=3)
        pairs = pseudo_observations(samples, margins, margins)
        for u in (pairs.u_x, pairs.u_y):
            assert abs(u.mean() - 0.5) <= 0.02
            assert abs(u.var() - 1.0 / 12.0) <= 0.01

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            PseudoPairs(u_x=np.zeros(3), u_y=np.zeros(4))
