"""Bivariate copula families: CDFs, h-functions, inverses, rotations, analytics.

All formulas are written with numpy ufuncs so that u, v, and the family
parameter broadcast together; the internal ``_*_base`` helpers are reused by
the partial-copula module with z-dependent parameter arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError, InversionError
from .numerics import PROB_EPS, QuadratureRule, bvn_cdf, clamp_prob

__all__ = [
    "INDEPENDENCE",
    "GAUSSIAN",
    "FRANK",
    "CLAYTON",
    "GUMBEL",
    "FGM",
    "FAMILIES",
    "ROTATIONS",
    "PairCopulaSpec",
    "cdf",
    "h1",
    "h2",
    "h1_inv",
    "h2_inv",
    "rho_s_analytic",
    "tau_analytic",
    "kdd_analytic",
    "qpd_check",
]

INDEPENDENCE = "indep"
GAUSSIAN = "gaussian"
FRANK = "frank"
CLAYTON = "clayton"
GUMBEL = "gumbel"
FGM = "fgm"

FAMILIES = (INDEPENDENCE, GAUSSIAN, FRANK, CLAYTON, GUMBEL, FGM)
ROTATIONS = (0, 90, 180, 270)

# Frank degenerates to independence as theta -> 0; reject the unstable band.
_FRANK_MIN_ABS_THETA = 1e-5
# Keep sqrt(1 - rho^2) well-conditioned.
_GAUSSIAN_MAX_ABS_RHO = 0.9999

_GRID_RULE = QuadratureRule.gauss_legendre(64)
_KDD_GRID = 201
_KDD_ZOOM = 21
_QPD_GRID = 101


def _cap_rho(theta):
    return np.clip(theta, -_GAUSSIAN_MAX_ABS_RHO, _GAUSSIAN_MAX_ABS_RHO)


def validate_theta(family: str, theta) -> None:
    """Raise DomainError unless theta is admissible for the family."""
    if family == INDEPENDENCE:
        if theta is not None:
            raise DomainError("independence copula takes no parameter")
        return
    if theta is None or not np.all(np.isfinite(theta)):
        raise DomainError(f"{family} copula requires a finite parameter")
    theta = np.asarray(theta, dtype=float)
    if family == GAUSSIAN:
        # |rho| up to 1 is accepted and capped at 0.9999 where evaluated.
        ok = np.all(np.abs(theta) <= 1.0)
        bound = "|rho| <= 1"
    elif family == FRANK:
        ok = np.all(np.abs(theta) >= _FRANK_MIN_ABS_THETA)
        bound = f"|theta| >= {_FRANK_MIN_ABS_THETA} (use independence near 0)"
    elif family == CLAYTON:
        ok = np.all(theta > 0.0)
        bound = "theta > 0 (negative dependence via rotation)"
    elif family == GUMBEL:
        ok = np.all(theta >= 1.0)
        bound = "theta >= 1 (negative dependence via rotation)"
    elif family == FGM:
        ok = np.all((theta >= -1.0) & (theta <= 1.0))
        bound = "theta in [-1, 1]"
    else:
        raise DomainError(f"unknown family {family!r}; valid: {FAMILIES}")
    if not ok:
        raise DomainError(f"{family} parameter out of domain ({bound}): {theta}")


@dataclass(frozen=True)
class PairCopulaSpec:
    """A bivariate copula family with parameter and rotation.

    Rotations 90/180/270 are argument reflections of the base copula;
    only the independence copula forbids them.
    """

    family: str
    theta: float | None = None
    rotation: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; valid: {FAMILIES}")
        if self.rotation not in ROTATIONS:
            raise DomainError(f"rotation must be one of {ROTATIONS}, got {self.rotation}")
        if self.family == INDEPENDENCE and self.rotation != 0:
            raise DomainError("independence copula admits only rotation 0")
        validate_theta(self.family, self.theta)

    def label(self) -> str:
        if self.family == INDEPENDENCE:
            return "indep"
        rot = f"@{self.rotation}" if self.rotation else ""
        return f"{self.family}({self.theta:g}){rot}"


# ---------------------------------------------------------------------------
# Base-family formulas (rotation 0). Interior arguments; theta broadcasts.
# ---------------------------------------------------------------------------


def _cdf_base(family, theta, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if family == INDEPENDENCE:
        return u * v
    ui = clamp_prob(u)
    vi = clamp_prob(v)
    if family == GAUSSIAN:
        c = bvn_cdf(ndtri(ui), ndtri(vi), _cap_rho(theta))
    elif family == FRANK:
        c = -np.log1p(np.expm1(-theta * ui) * np.expm1(-theta * vi) / np.expm1(-theta)) / theta
    elif family == CLAYTON:
        c = (ui ** (-theta) + vi ** (-theta) - 1.0) ** (-1.0 / theta)
    elif family == GUMBEL:
        lu = -np.log(ui)
        lv = -np.log(vi)
        c = np.exp(-((lu**theta + lv**theta) ** (1.0 / theta)))
    elif family == FGM:
        c = ui * vi * (1.0 + theta * (1.0 - ui) * (1.0 - vi))
    else:  # pragma: no cover - guarded at construction
        raise DomainError(family)
    # Exact boundary values (copula axioms hold to machine precision).
    c = np.where(v >= 1.0, u, np.where(u >= 1.0, v, c))
    c = np.where((u <= 0.0) | (v <= 0.0), 0.0, c)
    return np.clip(c, 0.0, 1.0)


def _h2_base(family, theta, u, v):
    """dC/dv of the base copula: conditional CDF of U given V = v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if family == INDEPENDENCE:
        return u * np.ones_like(v)
    ui = clamp_prob(u)
    vi = clamp_prob(v)
    if family == GAUSSIAN:
        rho = _cap_rho(np.asarray(theta, dtype=float))
        s = np.sqrt(1.0 - rho**2)
        h = ndtr((ndtri(ui) - rho * ndtri(vi)) / s)
    elif family == FRANK:
        eu = np.expm1(-theta * ui)
        ev = np.expm1(-theta * vi)
        h = np.exp(-theta * vi) * eu / (np.expm1(-theta) + eu * ev)
    elif family == CLAYTON:
        h = vi ** (-theta - 1.0) * (ui ** (-theta) + vi ** (-theta) - 1.0) ** (
            -1.0 / theta - 1.0
        )
    elif family == GUMBEL:
        lu = -np.log(ui)
        lv = -np.log(vi)
        g = lu**theta + lv**theta
        h = np.exp(-(g ** (1.0 / theta))) * (lv ** (theta - 1.0) / vi) * g ** (
            1.0 / theta - 1.0
        )
    elif family == FGM:
        h = ui + theta * ui * (1.0 - ui) * (1.0 - 2.0 * vi)
    else:  # pragma: no cover
        raise DomainError(family)
    h = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, h))
    return np.clip(h, 0.0, 1.0)


def _h1_base(family, theta, u, v):
    """dC/du; all base families here are exchangeable."""
    return _h2_base(family, theta, v, u)


def _h2_inv_base(family, theta, w, v):
    """u such that _h2_base(u, v) = w. Closed forms except Gumbel."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    if family == INDEPENDENCE:
        return w * np.ones_like(v)
    wi = clamp_prob(w)
    vi = clamp_prob(v)
    if family == GAUSSIAN:
        rho = _cap_rho(np.asarray(theta, dtype=float))
        s = np.sqrt(1.0 - rho**2)
        u = ndtr(s * ndtri(wi) + rho * ndtri(vi))
    elif family == FRANK:
        a = np.expm1(-theta)
        b = np.expm1(-theta * vi)
        t = wi * a / (1.0 + b * (1.0 - wi))
        u = -np.log1p(t) / theta
    elif family == CLAYTON:
        u = ((wi * vi ** (theta + 1.0)) ** (-theta / (theta + 1.0)) + 1.0 - vi ** (-theta)) ** (
            -1.0 / theta
        )
    elif family == GUMBEL:
        u = _bisect_h2_inv(family, theta, wi, vi)
    elif family == FGM:
        c = theta * (1.0 - 2.0 * vi)
        disc = (1.0 + c) ** 2 - 4.0 * c * wi
        u = 2.0 * wi / (1.0 + c + np.sqrt(np.maximum(disc, 0.0)))
    else:  # pragma: no cover
        raise DomainError(family)
    u = np.where(w <= 0.0, 0.0, np.where(w >= 1.0, 1.0, u))
    if not np.all(np.isfinite(u)):
        raise InversionError(f"h2 inversion produced non-finite values for {family}")
    return np.clip(u, 0.0, 1.0)


def _bisect_h2_inv(family, theta, w, v, iters: int = 80):
    """Vectorized bisection for families without a closed-form h2 inverse."""
    lo = np.full(np.broadcast(w, v, theta).shape, PROB_EPS)
    hi = np.full_like(lo, 1.0 - PROB_EPS)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = _h2_base(family, theta, mid, v) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _h1_inv_base(family, theta, w, u):
    """v such that _h1_base(u, v) = w; exchangeability reduces to the h2 inverse."""
    return _h2_inv_base(family, theta, w, u)


# ---------------------------------------------------------------------------
# Rotation-aware public operations.
# ---------------------------------------------------------------------------


def _check_unit(name, x, open_interval=False):
    x = np.asarray(x, dtype=float)
    if open_interval:
        ok = np.all((x > 0.0) & (x < 1.0))
        rng = "(0, 1)"
    else:
        ok = np.all((x >= 0.0) & (x <= 1.0))
        rng = "[0, 1]"
    if not ok:
        raise DomainError(f"{name} must lie in {rng}")
    return x


def _maybe_scalar(out, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(out)
    return out


def _cdf_rot(family, theta, rotation, u, v):
    if rotation == 0:
        c = _cdf_base(family, theta, u, v)
    elif rotation == 90:
        c = v - _cdf_base(family, theta, 1.0 - u, v)
    elif rotation == 180:
        c = u + v - 1.0 + _cdf_base(family, theta, 1.0 - u, 1.0 - v)
    else:  # 270
        c = u - _cdf_base(family, theta, u, 1.0 - v)
    return np.clip(c, 0.0, 1.0)


def _h2_rot(family, theta, rotation, u, v):
    if rotation == 0:
        h = _h2_base(family, theta, u, v)
    elif rotation == 90:
        h = 1.0 - _h2_base(family, theta, 1.0 - u, v)
    elif rotation == 180:
        h = 1.0 - _h2_base(family, theta, 1.0 - u, 1.0 - v)
    else:  # 270
        h = _h2_base(family, theta, u, 1.0 - v)
    return np.clip(h, 0.0, 1.0)


def _h1_rot(family, theta, rotation, u, v):
    if rotation == 0:
        h = _h1_base(family, theta, u, v)
    elif rotation == 90:
        h = _h1_base(family, theta, 1.0 - u, v)
    elif rotation == 180:
        h = 1.0 - _h1_base(family, theta, 1.0 - u, 1.0 - v)
    else:  # 270
        h = 1.0 - _h1_base(family, theta, u, 1.0 - v)
    return np.clip(h, 0.0, 1.0)


def _h2_inv_rot(family, theta, rotation, w, v):
    if rotation == 0:
        u = _h2_inv_base(family, theta, w, v)
    elif rotation == 90:
        u = 1.0 - _h2_inv_base(family, theta, 1.0 - w, v)
    elif rotation == 180:
        u = 1.0 - _h2_inv_base(family, theta, 1.0 - w, 1.0 - v)
    else:  # 270
        u = _h2_inv_base(family, theta, w, 1.0 - v)
    return np.clip(u, 0.0, 1.0)


def _h1_inv_rot(family, theta, rotation, w, u):
    if rotation == 0:
        v = _h1_inv_base(family, theta, w, u)
    elif rotation == 90:
        v = _h1_inv_base(family, theta, w, 1.0 - u)
    elif rotation == 180:
        v = 1.0 - _h1_inv_base(family, theta, 1.0 - w, 1.0 - u)
    else:  # 270
        v = 1.0 - _h1_inv_base(family, theta, 1.0 - w, u)
    return np.clip(v, 0.0, 1.0)


def cdf(spec: PairCopulaSpec, u, v):
    """C(u, v) for the (possibly rotated) pair copula."""
    u = _check_unit("u", u)
    v = _check_unit("v", v)
    return _maybe_scalar(_cdf_rot(spec.family, spec.theta, spec.rotation, u, v), u, v)


def h2(spec: PairCopulaSpec, u, v):
    """dC/dv: conditional CDF of the first argument given the second."""
    u = _check_unit("u", u)
    v = _check_unit("v", v, open_interval=True)
    return _maybe_scalar(_h2_rot(spec.family, spec.theta, spec.rotation, u, v), u, v)


def h1(spec: PairCopulaSpec, u, v):
    """dC/du: conditional CDF of the second argument given the first."""
    u = _check_unit("u", u, open_interval=True)
    v = _check_unit("v", v)
    return _maybe_scalar(_h1_rot(spec.family, spec.theta, spec.rotation, u, v), u, v)


def h2_inv(spec: PairCopulaSpec, w, v):
    """u such that h2(spec, u, v) = w."""
    w = _check_unit("w", w)
    v = _check_unit("v", v, open_interval=True)
    return _maybe_scalar(_h2_inv_rot(spec.family, spec.theta, spec.rotation, w, v), w, v)


def h1_inv(spec: PairCopulaSpec, w, u):
    """v such that h1(spec, u, v) = w."""
    w = _check_unit("w", w)
    u = _check_unit("u", u, open_interval=True)
    return _maybe_scalar(_h1_inv_rot(spec.family, spec.theta, spec.rotation, w, u), w, u)


# ---------------------------------------------------------------------------
# Analytic dependence functionals.
# ---------------------------------------------------------------------------


def _tensor_grid():
    t = _GRID_RULE.nodes
    w = _GRID_RULE.weights
    uu, vv = np.meshgrid(t, t, indexing="ij")
    return uu, vv, np.outer(w, w)


def rho_s_analytic(spec: PairCopulaSpec) -> float:
    """Spearman's rho: 12 * double-integral of C minus 3 (64x64 Gauss-Legendre)."""
    uu, vv, ww = _tensor_grid()
    return float(12.0 * np.sum(ww * cdf(spec, uu, vv)) - 3.0)


def tau_analytic(spec: PairCopulaSpec) -> float:
    """Kendall's tau: 1 - 4 * double-integral of (dC/du)(dC/dv)."""
    uu, vv, ww = _tensor_grid()
    return float(1.0 - 4.0 * np.sum(ww * h1(spec, uu, vv) * h2(spec, uu, vv)))


def _kdd_on_grid(cdf_fn, n_coarse=_KDD_GRID, n_zoom=_KDD_ZOOM):
    g = np.linspace(0.0, 1.0, n_coarse)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    d = np.abs(cdf_fn(uu, vv) - uu * vv)
    best = float(d.max())
    i, j = np.unravel_index(int(d.argmax()), d.shape)
    step = 1.0 / (n_coarse - 1)
    gu = np.linspace(max(0.0, g[i] - step), min(1.0, g[i] + step), n_zoom)
    gv = np.linspace(max(0.0, g[j] - step), min(1.0, g[j] + step), n_zoom)
    zu, zv = np.meshgrid(gu, gv, indexing="ij")
    dz = np.abs(cdf_fn(zu, zv) - zu * zv)
    return 4.0 * max(best, float(dz.max()))


def kdd_analytic(spec: PairCopulaSpec) -> float:
    """Kolmogorov distance dependence: 4 * sup |C - uv| on a grid with local zoom."""
    return _kdd_on_grid(lambda u, v: cdf(spec, u, v))


def _qpd_class(cdf_fn, tol: float = 1e-12) -> str:
    g = np.linspace(0.0, 1.0, _QPD_GRID)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    d = cdf_fn(uu, vv) - uu * vv
    if np.all(d >= -tol):  # tie-break: independence reports QPD
        return "QPD"
    if np.all(d <= tol):
        return "QND"
    return "neither"


def qpd_check(spec: PairCopulaSpec) -> str:
    """Classify quadrant dependence on a 101x101 grid: QPD, QND, or neither."""
    return _qpd_class(lambda u, v: cdf(spec, u, v))
