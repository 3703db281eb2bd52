"""Stationary degree distribution of the growth-deletion model.

The stationary balance for the expected fraction ``p_k`` of degree-``k``
nodes is

    0 = r [k == c] + r c pi_{k-1} p_{k-1} - p_k (r + r c pi_k + k) + (k + 1) p_{k+1}

with ``pi_k = k / <k>`` and ``<k> = 2rc / (1 + r)``.  Rows run over
``k = 0 .. k_max``.  Degree-0 nodes only arise when a neighbour is deleted;
the ``k = 0`` row (``p_0 = p_1 / r``) keeps the system mass-conserving,
so ``sum p_k = 1`` and ``sum k p_k = <k>`` hold without fudging.

The top row drops the outflow term ``r c pi_kmax p_kmax`` (a reflecting
boundary) so that truncation leaks no probability.  All rows below
``k_max`` are the exact balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .sim import theoretical_alpha, theoretical_gamma, theoretical_mean_degree


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class RateEqParams:
    r: int
    c: int
    k_max: int = 5000

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"r must be >= 2, got {self.r}")
        if self.c < 1:
            raise ValueError(f"c must be >= 1, got {self.c}")
        if self.k_max < 10 * self.c:
            raise ValueError(f"k_max must be >= 10*c = {10 * self.c}")


@dataclass(frozen=True)
class StationaryDistribution:
    """``p[k]`` for ``k = 0 .. k_max``; ``p[0]`` is the isolated-node mass."""

    params: RateEqParams
    p: np.ndarray = field(repr=False)
    gamma: float
    alpha: float
    mean_degree_theory: float
    max_residual: float

    @property
    def k(self) -> np.ndarray:
        return np.arange(len(self.p))

    def total(self) -> float:
        return math.fsum(self.p)

    def mean_degree(self) -> float:
        return math.fsum(self.k * self.p)

    def as_dict(self, k_max: int | None = None) -> dict[int, float]:
        stop = len(self.p) if k_max is None else min(len(self.p), k_max + 1)
        return {k: float(self.p[k]) for k in range(stop)}


def balance_residual(p: np.ndarray, r: int, c: int) -> np.ndarray:
    """Residual of the stationary balance at ``k = 0 .. len(p) - 2``.

    Evaluated term by term so it can check a solution independently of
    the banded solve that produced it.
    """
    mean = theoretical_mean_degree(r, c)
    out = np.empty(len(p) - 1)
    for k in range(len(p) - 1):
        inflow = r * c * ((k - 1) / mean) * p[k - 1] if k >= 1 else 0.0
        outflow = p[k] * (r + r * c * (k / mean) + k)
        out[k] = r * (k == c) + inflow - outflow + (k + 1) * p[k + 1]
    return out


def solve_stationary(params: RateEqParams) -> StationaryDistribution:
    r, c, k_max = params.r, params.c, params.k_max
    mean = theoretical_mean_degree(r, c)
    k = np.arange(k_max + 1, dtype=float)
    gain = r * c * k / mean  # r c pi_k

    # banded storage: row 0 super-diagonal, row 1 diagonal, row 2 sub-diagonal
    ab = np.zeros((3, k_max + 1))
    ab[0, 1:] = k[1:]
    ab[1] = -(r + gain + k)
    ab[1, -1] += gain[-1]
    ab[2, :-1] = gain[:-1]
    rhs = np.zeros(k_max + 1)
    rhs[c] = -r

    try:
        p = solve_banded((1, 1), ab, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"banded solve failed for r={r}, c={c}, k_max={k_max}: {exc}") from exc
    if not np.all(np.isfinite(p)):
        raise SolverError(f"non-finite solution for r={r}, c={c}, k_max={k_max}")
    if p.min() < -1e-14:
        raise SolverError(f"negative mass {p.min():.3e} at k={int(p.argmin())}")
    p = np.clip(p, 0.0, None)
    p /= math.fsum(p)

    resid = balance_residual(p, r, c)
    return StationaryDistribution(
        params=params,
        p=p,
        gamma=theoretical_gamma(r),
        alpha=theoretical_alpha(r),
        mean_degree_theory=mean,
        max_residual=float(np.abs(resid).max()),
    )


def asymptotic_prefactor(r: int) -> float:
    """``Gamma(gamma) / (1 - alpha)^(gamma - 1)``."""
    g = theoretical_gamma(r)
    a = theoretical_alpha(r)
    return math.gamma(g) / (1 - a) ** (g - 1)


def asymptotic_pk(k, r: int):
    """Large-``k`` power law ``Gamma(gamma) (1 - alpha)^(1 - gamma) k^(-gamma)``.

    Accepts a scalar or an array of degrees ``k >= 1``.
    """
    g = theoretical_gamma(r)
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise ValueError("asymptotic_pk needs k >= 1")
    out = asymptotic_prefactor(r) * k_arr ** (-g)
    return float(out) if np.ndim(out) == 0 else out


def tail_slope(dist: StationaryDistribution, k_lo: int, k_hi: int) -> float:
    """OLS slope of ``log p_k`` on ``log k`` over integer ``k`` in ``[k_lo, k_hi]``."""
    ks = np.arange(k_lo, k_hi + 1)
    x, y = np.log(ks), np.log(dist.p[ks])
    x0 = x - x.mean()
    return float((x0 * (y - y.mean())).sum() / (x0 * x0).sum())
