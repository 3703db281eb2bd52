"""Power-law exponent fits, the exponent regression, correlations and summaries."""

from __future__ import annotations

import datetime as dt
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import DegreeHistogram

OLS_NO_INTERCEPT = "ols_no_intercept"
OLS_WITH_INTERCEPT = "ols_with_intercept"
CCDF_TAIL = "ccdf_tail"
METHODS = (OLS_NO_INTERCEPT, OLS_WITH_INTERCEPT, CCDF_TAIL)
# CLI spellings
METHOD_ALIASES = {"ols0": OLS_NO_INTERCEPT, "ols1": OLS_WITH_INTERCEPT, "ccdf": CCDF_TAIL}
REGRESSORS = ("intercept", "R", "M", "ln_n")


class FitError(ValueError):
    """The data cannot support the requested fit."""


def resolve_method(method: str) -> str:
    method = METHOD_ALIASES.get(method, method)
    if method not in METHODS:
        raise ValueError(f"unknown fit method {method!r}")
    return method


@dataclass(frozen=True)
class FitResult:
    gamma: float
    n_points: int
    k_range: tuple[int, int]
    residual_sse: float
    method: str


@dataclass(frozen=True)
class FitSkipped:
    """Marker for a day whose histogram cannot be fitted."""

    reason: str


def fit_power_law(hist: DegreeHistogram, method: str = OLS_NO_INTERCEPT, k_min: int = 1) -> FitResult:
    """Estimate the exponent ``gamma`` of ``p_k ~ k^-gamma`` from a histogram.

    ``ols_no_intercept`` regresses ``ln(n_k / n)`` on ``-ln k`` through the
    origin, so ``gamma = -sum(x y) / sum(x^2)``.  ``ols_with_intercept``
    adds a free normalisation constant.  ``ccdf_tail`` regresses the log of
    the complementary CDF ``P(K >= k)`` on ``ln k`` at every observed degree
    ``k >= k_min`` and reports ``1 - slope``.  Empty bins and ``k = 0`` never
    enter a fit.
    """
    method = resolve_method(method)
    if hist.n == 0:
        raise FitError("empty histogram")
    ks = np.array([k for k, v in hist.counts.items() if v > 0 and k >= max(k_min, 1)], dtype=float)
    if len(ks) < 2:
        raise FitError(f"need at least 2 distinct degrees >= {max(k_min, 1)}, got {len(ks)}")
    counts = np.array([hist.counts[int(k)] for k in ks], dtype=float)
    x = np.log(ks)

    if method == CCDF_TAIL:
        # nodes with degree >= k, over all nodes (including any k < k_min)
        # exact integer sums, one correctly rounded division per point
        all_k = sorted(hist.counts, reverse=True)
        at_least = dict(zip(all_k, itertools.accumulate(hist.counts[k] for k in all_k)))
        y = np.log([at_least[int(k)] / hist.n for k in ks])
        slope, intercept = _ols_line(x, y)
        resid = y - (intercept + slope * x)
        gamma = 1.0 - slope
    elif method == OLS_WITH_INTERCEPT:
        y = np.log(counts / hist.n)
        slope, intercept = _ols_line(x, y)
        resid = y - (intercept + slope * x)
        gamma = -slope
    else:
        y = np.log(counts / hist.n)
        sxx = float(np.dot(x, x))
        gamma = -float(np.dot(x, y)) / sxx
        resid = y + gamma * x
    if not math.isfinite(gamma):
        raise FitError("non-finite exponent")
    return FitResult(
        gamma=float(gamma),
        n_points=len(ks),
        k_range=(int(ks[0]), int(ks[-1])),
        residual_sse=float(np.dot(resid, resid)),
        method=method,
    )


def _ols_line(x, y):
    x0 = x - x.mean()
    sxx = float(np.dot(x0, x0))
    if sxx == 0.0:
        raise FitError("all degrees equal")
    slope = float(np.dot(x0, y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


def fit_series(snapshots, method: str = OLS_NO_INTERCEPT, k_min: int = 1) -> list[tuple[dt.date, FitResult | FitSkipped]]:
    """Fit every snapshot's histogram; unfittable days yield :class:`FitSkipped`."""
    out = []
    for s in snapshots:
        try:
            out.append((s.date, fit_power_law(s.histogram, method, k_min)))
        except FitError as exc:
            out.append((s.date, FitSkipped(str(exc))))
    return out


@dataclass(frozen=True)
class RegressionResult:
    names: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    r_squared: float
    n_obs: int
    dropped_zero_rows: int = 0

    def as_dict(self) -> dict:
        return {
            "coefficients": dict(zip(self.names, map(float, self.coefficients))),
            "std_errors": dict(zip(self.names, map(float, self.std_errors))),
            "t_stats": dict(zip(self.names, map(float, self.t_stats))),
            "r_squared": float(self.r_squared),
            "n_obs": int(self.n_obs),
            "filter": {"dropped_zero_R_or_M": int(self.dropped_zero_rows)},
        }


def ols(X: np.ndarray, y: np.ndarray, names: Sequence[str]) -> RegressionResult:
    """Least squares via QR with classical homoskedastic standard errors."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n <= p:
        raise FitError(f"need more observations than parameters ({n} <= {p})")
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * diag.max():
        raise FitError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    sse = float(resid @ resid)
    sigma2 = sse / (n - p)
    r_inv = np.linalg.inv(r)
    se = np.sqrt(sigma2 * np.sum(r_inv * r_inv, axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta / se
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - sse / sst if sst > 0 else 1.0
    return RegressionResult(tuple(names), beta, se, t, r2, n)


def regress_gamma(days: Iterable[tuple[float, float, float, float]]) -> RegressionResult:
    """Regress daily ``gamma_t`` on ``R_t``, ``M_t`` and ``ln n_t`` with intercept.

    Input rows are ``(gamma, R, M, n)``.  Days without originations
    (``R == 0`` or ``M == 0``) are dropped first.
    """
    rows = [tuple(map(float, d)) for d in days]
    kept = [d for d in rows if d[1] != 0 and d[2] != 0]
    if len(kept) < 5:
        raise FitError(f"need at least 5 days with originations, got {len(kept)}")
    a = np.array(kept)
    if np.any(a[:, 3] <= 0):
        raise FitError("node count must be positive for ln(n)")
    X = np.column_stack([np.ones(len(a)), a[:, 1], a[:, 2], np.log(a[:, 3])])
    res = ols(X, a[:, 0], REGRESSORS)
    return RegressionResult(
        res.names, res.coefficients, res.std_errors, res.t_stats, res.r_squared, res.n_obs,
        dropped_zero_rows=len(rows) - len(kept),
    )


def pearson_correlations(columns) -> np.ndarray:
    """Pearson correlation matrix of the given series (one per row)."""
    a = np.asarray(columns, dtype=float)
    if a.ndim != 2 or a.shape[1] < 2:
        raise ValueError("need 2-D input with series of length >= 2")
    centered = a - a.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    if np.any(norms == 0):
        raise ValueError("zero-variance series")
    z = centered / norms[:, None]
    corr = np.clip(z @ z.T, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


@dataclass(frozen=True)
class SeriesSummary:
    label: str
    count: int
    min: float
    max: float
    mean: float
    std_dev: float
    median: float


def _summary(label, values) -> SeriesSummary:
    v = np.asarray(values, dtype=float)
    return SeriesSummary(
        label=label,
        count=len(v),
        min=float(v.min()),
        max=float(v.max()),
        mean=float(v.mean()),
        # sample standard deviation (divisor n - 1); 0 for a single value
        std_dev=float(v.std(ddof=1)) if len(v) > 1 else 0.0,
        median=float(np.median(v)),
    )


def summarize(values, dates=None, group_by_year: bool = False, label: str = "all") -> list[SeriesSummary]:
    """Min/max/mean/sample std/median, optionally one row per calendar year."""
    values = list(values)
    if not values:
        raise ValueError("cannot summarize an empty series")
    if not group_by_year:
        return [_summary(label, values)]
    if dates is None or len(dates) != len(values):
        raise ValueError("grouping by year needs one date per value")
    groups: dict[int, list[float]] = {}
    for d, v in zip(dates, values):
        groups.setdefault(d.year, []).append(v)
    return [_summary(str(y), groups[y]) for y in sorted(groups)]
