"""Empirical dependence statistics on finite samples.

Rank statistics use average ranks for ties; the empirical copula uses
pseudo-ranks r/(n+1) to keep arguments interior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedStatisticError

__all__ = [
    "DependenceSummary",
    "average_ranks",
    "spearman_emp",
    "kendall_emp",
    "kdd_emp",
    "pearson",
    "partial_correlation",
]

# Above this sample size the empirical-KDD lattice is restricted to a quantile
# grid plus the sample points (the full n^2 lattice is quadratic in memory).
_KDD_FULL_LATTICE_MAX_N = 2000
_KDD_QUANTILE_GRID = 201


@dataclass(frozen=True)
class DependenceSummary:
    """Spearman, Kendall, and KDD for one pair of columns."""

    spearman: float
    kendall: float
    kdd: float
    n: int

    @classmethod
    def from_columns(cls, a, b) -> "DependenceSummary":
        return cls(
            spearman=spearman_emp(a, b),
            kendall=kendall_emp(a, b),
            kdd=kdd_emp(a, b),
            n=len(np.asarray(a)),
        )


def _as_column(name, x, min_n):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < min_n:
        raise UndefinedStatisticError(f"{name} must be 1-d with at least {min_n} entries")
    return x


def average_ranks(x) -> np.ndarray:
    """Ranks 1..n with ties assigned their average rank."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and xs[j + 1] == xs[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def pearson(a, b) -> float:
    a = _as_column("a", a, 2)
    b = _as_column("b", b, 2)
    if len(a) != len(b):
        raise UndefinedStatisticError("columns must have equal length")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(np.sum(da * da) * np.sum(db * db))
    if denom == 0.0:
        raise UndefinedStatisticError("zero variance in a column")
    return float(np.sum(da * db) / denom)


def spearman_emp(a, b) -> float:
    """Spearman's rho: Pearson correlation of average-tie ranks."""
    a = _as_column("a", a, 3)
    b = _as_column("b", b, 3)
    if len(a) != len(b):
        raise UndefinedStatisticError("columns must have equal length")
    return pearson(average_ranks(a), average_ranks(b))


def _merge_count(values: np.ndarray) -> int:
    """Number of inversions in `values`, by merge sort."""
    work = list(values)
    buf = [0.0] * len(work)
    return _merge_count_rec(work, buf, 0, len(work))


def _merge_count_rec(a, buf, lo, hi) -> int:
    if hi - lo <= 1:
        return 0
    mid = (lo + hi) // 2
    count = _merge_count_rec(a, buf, lo, mid) + _merge_count_rec(a, buf, mid, hi)
    i, j, k = lo, mid, lo
    while i < mid and j < hi:
        if a[j] < a[i]:
            count += mid - i
            buf[k] = a[j]
            j += 1
        else:
            buf[k] = a[i]
            i += 1
        k += 1
    buf[k : k + mid - i] = a[i:mid]
    buf[k + mid - i : hi] = a[j:hi]
    a[lo:hi] = buf[lo:hi]
    return count


def _tie_pair_count(x: np.ndarray) -> int:
    _, counts = np.unique(x, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def kendall_emp(a, b) -> float:
    """Kendall's tau-b by merge-sort inversion counting, O(n log n).

    Ties have measure zero for continuous data but the tie-corrected
    estimator stays defined when serialization round-trips introduce
    duplicates.
    """
    a = _as_column("a", a, 2)
    b = _as_column("b", b, 2)
    n = len(a)
    if len(b) != n:
        raise UndefinedStatisticError("columns must have equal length")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise UndefinedStatisticError("zero variance in a column")

    # Sort by a, breaking ties by b; inversions in b are then exactly the
    # discordant pairs among pairs not tied in a.
    order = np.lexsort((b, a))
    bs = b[order]
    a_sorted = a[order]
    swaps = _merge_count(bs)

    n0 = n * (n - 1) // 2
    n1 = _tie_pair_count(a)
    n2 = _tie_pair_count(b)
    # Pairs tied in both columns.
    pairs = np.rec.fromarrays([a_sorted, bs])
    n3 = _tie_pair_count(pairs)

    numer = n0 - n1 - n2 + n3 - 2 * swaps
    denom = np.sqrt(float(n0 - n1) * float(n0 - n2))
    if denom == 0.0:
        raise UndefinedStatisticError("zero variance in a column")
    return float(numer / denom)


class _Fenwick:
    def __init__(self, n: int):
        self.tree = [0] * (n + 1)

    def add(self, i: int):
        i += 1
        while i < len(self.tree):
            self.tree[i] += 1
            i += i & (-i)

    def prefix(self, i: int) -> int:
        # count of inserted indices <= i
        i += 1
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & (-i)
        return total


def _dominated_counts(ra: np.ndarray, rb: np.ndarray) -> np.ndarray:
    """For each i: #{j: ra_j <= ra_i and rb_j <= rb_i}, in O(n log n)."""
    n = len(ra)
    rb_idx = np.searchsorted(np.sort(np.unique(rb)), rb)
    order = np.argsort(ra, kind="stable")
    counts = np.empty(n, dtype=float)
    tree = _Fenwick(len(np.unique(rb)))
    i = 0
    while i < n:
        j = i
        while j + 1 < n and ra[order[j + 1]] == ra[order[i]]:
            j += 1
        group = order[i : j + 1]
        for g in group:
            tree.add(int(rb_idx[g]))
        for g in group:
            counts[g] = tree.prefix(int(rb_idx[g]))
        i = j + 1
    return counts


def _ecop_on_lattice(ra, rb, n):
    """Empirical copula on the lattice of distinct pseudo-rank values."""
    ua = np.sort(np.unique(ra))
    vb = np.sort(np.unique(rb))
    hist, _, _ = np.histogram2d(
        ra, rb, bins=[np.append(ua, ua[-1] + 1.0), np.append(vb, vb[-1] + 1.0)]
    )
    cum = hist.cumsum(axis=0).cumsum(axis=1) / n
    return ua / (n + 1.0), vb / (n + 1.0), cum


def kdd_emp(a, b) -> float:
    """Empirical KDD: 4 * max |C_n(u,v) - uv| over the pseudo-rank lattice.

    For n > 2000 the lattice is restricted to a 201x201 quantile grid plus
    all sample points.
    """
    a = _as_column("a", a, 3)
    b = _as_column("b", b, 3)
    n = len(a)
    if len(b) != n:
        raise UndefinedStatisticError("columns must have equal length")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise UndefinedStatisticError("zero variance in a column")
    ra = average_ranks(a)
    rb = average_ranks(b)

    if n <= _KDD_FULL_LATTICE_MAX_N:
        ua, vb, cum = _ecop_on_lattice(ra, rb, n)
        d = np.abs(cum - np.outer(ua, vb))
        return float(np.clip(4.0 * d.max(), 0.0, 1.0))

    # Quantile grid.
    g = np.linspace(0.0, 1.0, _KDD_QUANTILE_GRID)
    ca = np.searchsorted(np.sort(ra / (n + 1.0)), g, side="right")
    # 2-d counts on the grid via histogram over grid cells.
    hist, _, _ = np.histogram2d(ra / (n + 1.0), rb / (n + 1.0), bins=[g, g])
    # cumulative counts up to each grid point (exclusive of later cells)
    cum = np.zeros((len(g), len(g)))
    cum[1:, 1:] = hist.cumsum(axis=0).cumsum(axis=1)
    d_grid = np.abs(cum / n - np.outer(g, g)).max()

    # All sample points.
    counts = _dominated_counts(ra, rb)
    d_pts = np.abs(counts / n - (ra / (n + 1.0)) * (rb / (n + 1.0))).max()
    return float(np.clip(4.0 * max(d_grid, d_pts), 0.0, 1.0))


def partial_correlation(x, y, z) -> float:
    """Regression-residual partial correlation of (x, y) given z.

    Fits ordinary least squares of x on (1, z) and y on (1, z) and returns
    the Pearson correlation of the residual vectors.
    """
    x = _as_column("x", x, 4)
    y = _as_column("y", y, 4)
    z = _as_column("z", z, 4)
    if not (len(x) == len(y) == len(z)):
        raise UndefinedStatisticError("columns must have equal length")
    if np.ptp(z) == 0.0:
        raise UndefinedStatisticError("z has zero variance")
    design = np.column_stack([np.ones(len(z)), z])
    coef_x, *_ = np.linalg.lstsq(design, x, rcond=None)
    coef_y, *_ = np.linalg.lstsq(design, y, rcond=None)
    res_x = x - design @ coef_x
    res_y = y - design @ coef_y
    return pearson(res_x, res_y)
