"""Partial-copula machinery: pseudo-observations, the z-mixture representation,
expected conditional Spearman, and bound certificates.

The covariate lives in pseudo space: Z is uniform on [0, 1], so the mixture
weight in every z-integral is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError
from .numerics import QuadratureRule, clamp_prob, integrate_01
from .pair_copulas import (
    FAMILIES,
    GAUSSIAN,
    FGM,
    FRANK,
    INDEPENDENCE,
    PairCopulaSpec,
    ROTATIONS,
    _cdf_rot,
    _h1_rot,
    _h2_rot,
    _kdd_on_grid,
    _qpd_class,
    h2,
    kdd_analytic,
    qpd_check,
    rho_s_analytic,
    validate_theta,
)

__all__ = [
    "ThetaFunction",
    "ConditionalFamily",
    "PseudoPairs",
    "BoundCertificate",
    "pseudo_observations",
    "partial_cdf",
    "partial_rho",
    "partial_rho_from_cdf",
    "partial_tau",
    "conditional_kdd_sup",
    "certify_bounds",
]

THETA_KINDS = ("constant", "exp_z", "neg_exp_z", "one_minus_2z", "table")

_Z_GRID_POINTS = 257
_Z_RULE = QuadratureRule.gauss_legendre(64)
_CERT_TOL = 1e-6
# Quadrature error budget when classifying quadrant dependence of the mixture.
_PARTIAL_QPD_TOL = 1e-9


@dataclass(frozen=True)
class ThetaFunction:
    """Map z -> conditional-copula parameter on [0, 1]."""

    kind: str
    value: float | None = None
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in THETA_KINDS:
            raise DomainError(f"theta kind must be one of {THETA_KINDS}, got {self.kind!r}")
        if self.kind == "constant":
            if self.value is None or not np.isfinite(self.value):
                raise DomainError("constant theta function requires a finite value")
        elif self.kind == "table":
            if not self.table or len(self.table) < 2:
                raise DomainError("table theta function requires at least two knots")
            zs = np.array([z for z, _ in self.table], dtype=float)
            if np.any(np.diff(zs) <= 0.0):
                raise DomainError("table knots must be strictly increasing in z")
            if zs[0] != 0.0 or zs[-1] != 1.0:
                raise DomainError("table knots must cover [0, 1]")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "constant":
            out = np.full(z.shape, self.value)
        elif self.kind == "exp_z":
            out = np.exp(z)
        elif self.kind == "neg_exp_z":
            out = -np.exp(z)
        elif self.kind == "one_minus_2z":
            out = 1.0 - 2.0 * z
        else:
            zs = np.array([p[0] for p in self.table])
            ts = np.array([p[1] for p in self.table])
            out = np.interp(z, zs, ts)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        if self.kind == "constant":
            return f"const:{self.value:g}"
        if self.kind == "table":
            return "table:" + ";".join(f"{z:g},{t:g}" for z, t in self.table)
        return self.kind


@dataclass(frozen=True)
class ConditionalFamily:
    """A pair-copula family whose parameter varies with the covariate.

    Rotation is fixed to 0; sign changes are carried by theta(z).
    Instantiating at any z in [0, 1] must yield a valid PairCopulaSpec.
    """

    family: str
    theta_fn: ThetaFunction | None = None
    rotation: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; valid: {FAMILIES}")
        if self.rotation not in ROTATIONS:
            raise DomainError(f"rotation must be one of {ROTATIONS}, got {self.rotation}")
        if self.family == INDEPENDENCE:
            if self.theta_fn is not None:
                raise DomainError("independence conditional takes no theta function")
            if self.rotation != 0:
                raise DomainError("independence conditional admits only rotation 0")
            return
        if self.theta_fn is None:
            raise DomainError(f"{self.family} conditional requires a theta function")
        for z in np.linspace(0.0, 1.0, _Z_GRID_POINTS):
            try:
                validate_theta(self.family, float(self.theta_fn(z)))
            except DomainError as exc:
                raise DomainError(
                    f"theta(z) leaves the {self.family} domain at z={z:.6g}: {exc}"
                ) from exc

    def theta(self, z):
        return self.theta_fn(z) if self.theta_fn is not None else None

    def at(self, z: float) -> PairCopulaSpec:
        """The conditional copula C_{X,Y|Z=z} as a concrete spec."""
        if self.family == INDEPENDENCE:
            return PairCopulaSpec(INDEPENDENCE)
        return PairCopulaSpec(self.family, float(self.theta_fn(z)), self.rotation)

    def label(self) -> str:
        if self.family == INDEPENDENCE:
            return "indep"
        rot = f"@{self.rotation}" if self.rotation else ""
        return f"{self.family}[{self.theta_fn.describe()}]{rot}"


@dataclass(frozen=True)
class PseudoPairs:
    """Partial-copula pseudo-observations (U_X, U_Y)."""

    u_x: np.ndarray
    u_y: np.ndarray

    def __post_init__(self):
        if len(self.u_x) != len(self.u_y):
            raise InputError("u_x and u_y must have equal length")

    @property
    def n(self) -> int:
        return len(self.u_x)


def pseudo_observations(samples, c_xz: PairCopulaSpec, c_yz: PairCopulaSpec) -> PseudoPairs:
    """Rosenblatt pseudo-observations from uniform-margin triples (oracle mode).

    u_x[i] = h2(c_xz, x[i], z[i]), u_y[i] = h2(c_yz, y[i], z[i]).
    """
    x = np.asarray(samples.x, dtype=float)
    y = np.asarray(samples.y, dtype=float)
    z = np.asarray(samples.z, dtype=float)
    if not (len(x) == len(y) == len(z)):
        raise InputError("x, y, z must have equal length")
    zi = clamp_prob(z)
    u_x = clamp_prob(h2(c_xz, x, zi))
    u_y = clamp_prob(h2(c_yz, y, zi))
    return PseudoPairs(u_x=u_x, u_y=u_y)


def _cond_cdf_at(cond: ConditionalFamily, z: float, u, v):
    if cond.family == INDEPENDENCE:
        return np.asarray(u, dtype=float) * np.asarray(v, dtype=float)
    return _cdf_rot(cond.family, float(cond.theta_fn(z)), cond.rotation, u, v)


def partial_cdf(cond: ConditionalFamily, u, v, tol: float = 1e-9):
    """The partial copula: integral over z of the conditional copula CDF."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0.0) | (u > 1.0)) or np.any((v < 0.0) | (v > 1.0)):
        raise DomainError("u and v must lie in [0, 1]")
    if cond.family == INDEPENDENCE:
        out = u * v
        return float(out) if out.ndim == 0 else out
    out = integrate_01(lambda z: _cond_cdf_at(cond, z, u, v), tol=tol)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _partial_cdf_fixed(cond: ConditionalFamily, u, v):
    """Mixture CDF by a fixed 64-node z-rule; used for grid-heavy functionals."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if cond.family == INDEPENDENCE:
        return u * v
    acc = np.zeros(np.broadcast(u, v).shape)
    for z, w in zip(_Z_RULE.nodes, _Z_RULE.weights):
        acc = acc + w * _cond_cdf_at(cond, z, u, v)
    return np.clip(acc, 0.0, 1.0)


def partial_rho(cond: ConditionalFamily, tol: float = 1e-7) -> float:
    """Expected conditional Spearman's rho: integral of rho(z) over z."""
    if cond.family == INDEPENDENCE:
        return 0.0
    return float(integrate_01(lambda z: rho_s_analytic(cond.at(z)), tol=tol))


def partial_rho_from_cdf(cond: ConditionalFamily) -> float:
    """Independent route: 12 * double-integral of the partial copula minus 3.

    The (u, v) integral uses the fixed tensor rule; the z-mixture integral is
    adaptive so that kinked theta(z) profiles (table knots) stay resolved.
    """
    if cond.family == INDEPENDENCE:
        return 0.0
    t = _Z_RULE.nodes
    w = _Z_RULE.weights
    uu, vv = np.meshgrid(t, t, indexing="ij")
    ww = np.outer(w, w)
    return float(
        integrate_01(
            lambda z: 12.0 * np.sum(ww * _cond_cdf_at(cond, z, uu, vv)) - 3.0, tol=1e-8
        )
    )


def partial_tau(cond: ConditionalFamily) -> float:
    """Kendall's tau of the partial copula via its partial derivatives.

    The u- and v-partials of the mixture are the z-integrals of the
    conditional h1/h2; tau = 1 - 4 * double-integral of their product.
    """
    if cond.family == INDEPENDENCE:
        return 0.0
    t = _Z_RULE.nodes
    w = _Z_RULE.weights
    uu, vv = np.meshgrid(t, t, indexing="ij")
    d1 = integrate_01(
        lambda z: _h1_rot(cond.family, float(cond.theta_fn(z)), cond.rotation, uu, vv),
        tol=1e-8,
    )
    d2 = integrate_01(
        lambda z: _h2_rot(cond.family, float(cond.theta_fn(z)), cond.rotation, uu, vv),
        tol=1e-8,
    )
    return float(1.0 - 4.0 * np.sum(np.outer(w, w) * d1 * d2))


def _kdd_cache_key(cond: ConditionalFamily, z: float):
    theta = round(float(cond.theta_fn(z)), 15)
    # Gaussian/Frank/FGM are radially symmetric: negating theta reflects the
    # copula through v -> 1-v, and the symmetric grid scheme gives the exact
    # same KDD value, so the cache can key on |theta|.
    if cond.family in (GAUSSIAN, FRANK, FGM) and cond.rotation == 0:
        return abs(theta)
    return theta


def _qpd_cache_key(cond: ConditionalFamily, z: float):
    return round(float(cond.theta_fn(z)), 15)


def conditional_kdd_sup(cond: ConditionalFamily) -> float:
    """Max conditional KDD over a 257-point z-grid (the artifact's k)."""
    if cond.family == INDEPENDENCE:
        return 0.0
    cache: dict[float, float] = {}
    best = 0.0
    for z in np.linspace(0.0, 1.0, _Z_GRID_POINTS):
        key = _kdd_cache_key(cond, z)
        if key not in cache:
            cache[key] = kdd_analytic(cond.at(z))
        best = max(best, cache[key])
    return best


@dataclass(frozen=True)
class BoundCertificate:
    """Checked consequences of conditional-copula properties for the mixture."""

    config_id: str
    k: float
    rho_partial: float
    tau_partial: float
    kdd_partial: float
    qpd_class: str
    conditional_qpd: str
    kdd_ok: bool
    rho_ok: bool
    tau_ok: bool
    qpd_ok: bool
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.kdd_ok and self.rho_ok and self.tau_ok and self.qpd_ok

    csv_header = (
        "config_id,k,rho_partial,tau_partial,kdd_partial,qpd_class,"
        "kdd_ok,rho_ok,tau_ok,qpd_ok,passed"
    )

    def to_csv_row(self) -> str:
        from .output import fmt

        return ",".join(
            [
                self.config_id,
                fmt(self.k),
                fmt(self.rho_partial),
                fmt(self.tau_partial),
                fmt(self.kdd_partial),
                self.qpd_class,
                str(self.kdd_ok).lower(),
                str(self.rho_ok).lower(),
                str(self.tau_ok).lower(),
                str(self.qpd_ok).lower(),
                str(self.passed).lower(),
            ]
        )


def certify_bounds(cond: ConditionalFamily, config_id: str | None = None) -> BoundCertificate:
    """Evaluate the KDD / Spearman / Kendall bounds and QPD preservation.

    Violations are reported in the certificate, never silently passed.
    """
    config_id = config_id or cond.label()
    k = conditional_kdd_sup(cond)
    rho_p = partial_rho(cond)
    tau_p = partial_tau(cond)
    d_p = _kdd_on_grid(lambda u, v: _partial_cdf_fixed(cond, u, v))
    partial_class = _qpd_class(
        lambda u, v: _partial_cdf_fixed(cond, u, v), tol=_PARTIAL_QPD_TOL
    )

    if cond.family == INDEPENDENCE:
        classes = {"QPD"}
    else:
        cache: dict[float, str] = {}
        classes = set()
        for z in np.linspace(0.0, 1.0, _Z_GRID_POINTS):
            key = _qpd_cache_key(cond, z)
            if key not in cache:
                cache[key] = qpd_check(cond.at(z))
            classes.add(cache[key])
    if classes == {"QPD"}:
        conditional_qpd = "QPD"
    elif classes == {"QND"}:
        conditional_qpd = "QND"
    else:
        conditional_qpd = "mixed"

    violations = []
    kdd_ok = d_p <= k + _CERT_TOL
    if not kdd_ok:
        violations.append(f"kdd_partial {d_p:.8g} > k {k:.8g}")
    rho_ok = abs(rho_p) <= min(1.0, 3.0 * k) + _CERT_TOL
    if not rho_ok:
        violations.append(f"|rho_partial| {abs(rho_p):.8g} > min(1, 3k) {min(1.0, 3.0 * k):.8g}")
    tau_ok = abs(tau_p) <= min(1.0, 2.0 * k) + _CERT_TOL
    if not tau_ok:
        violations.append(f"|tau_partial| {abs(tau_p):.8g} > min(1, 2k) {min(1.0, 2.0 * k):.8g}")
    qpd_ok = True
    if conditional_qpd in ("QPD", "QND") and partial_class != conditional_qpd:
        qpd_ok = False
        violations.append(
            f"all conditionals {conditional_qpd} but partial classified {partial_class}"
        )

    return BoundCertificate(
        config_id=config_id,
        k=k,
        rho_partial=rho_p,
        tau_partial=tau_p,
        kdd_partial=d_p,
        qpd_class=partial_class,
        conditional_qpd=conditional_qpd,
        kdd_ok=kdd_ok,
        rho_ok=rho_ok,
        tau_ok=tau_ok,
        qpd_ok=qpd_ok,
        violations=tuple(violations),
    )
