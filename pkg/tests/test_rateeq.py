import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from debtnet.rateeq import (
    RateEqParams, asymptotic_pk, asymptotic_prefactor, balance_residual, solve_stationary, tail_slope,
)


def exact_truncated_solution(r, c, k_max):
    """Balance system on k = 0..k_max with a reflecting top row, solved in rationals.

    Uses the cumulative flux form: summing the balance rows 0..k gives
    (k+1) p_{k+1} = r c pi_k p_k + r S_k - r [k >= c], with S_k = p_0 + ... + p_k.
    Starting from an unknown p_0 = t, every p_k is affine in t; the top
    row then fixes t.
    """
    mean = Fraction(2 * r * c, 1 + r)
    gain = [Fraction(r * c * k) / mean for k in range(k_max + 1)]
    # p_k = a_k + b_k t
    a, b = [Fraction(0)], [Fraction(1)]
    sa, sb = Fraction(0), Fraction(1)
    for k in range(k_max):
        src = r if k >= c else 0
        a.append((gain[k] * a[k] + r * sa - src) / (k + 1))
        b.append((gain[k] * b[k] + r * sb) / (k + 1))
        sa += a[-1]
        sb += b[-1]
    # normalisation closes the system (total mass is conserved by construction)
    t = (1 - sa) / sb
    return [ai + bi * t for ai, bi in zip(a, b)]


@pytest.fixture(scope="module")
def base():
    return solve_stationary(RateEqParams(3, 2, 5000))


def test_residual(base):
    assert base.max_residual <= 1e-10
    assert np.abs(balance_residual(base.p, 3, 2)).max() <= 1e-10


def test_normalisation_and_sign(base):
    assert abs(base.total() - 1) <= 1e-8
    assert base.p.min() >= 0


def test_mean_degree_kmax500():
    d = solve_stationary(RateEqParams(3, 2, 500))
    assert abs(d.mean_degree() - 3.0) <= 1e-3


def test_isolated_mass_balance(base):
    # the k = 0 row reads r p_0 = p_1
    assert base.p[0] == pytest.approx(base.p[1] / 3, rel=1e-12)


def test_monotone_tail(base):
    assert np.all(np.diff(base.p[3:2501]) < 0)


def test_boundary_layer_is_thin(base):
    # the mass-conserving top row lets p_k pile up within the last few degrees
    rising = np.nonzero(np.diff(base.p[3:]) >= 0)[0]
    assert rising.size == 0 or rising[0] + 3 > 0.99 * 5000


def test_truncation_convergence():
    lo = solve_stationary(RateEqParams(3, 2, 1000))
    hi = solve_stationary(RateEqParams(3, 2, 2000))
    assert np.abs(lo.p[:251] - hi.p[:251]).max() < 1e-6


def test_slope_at_default_kmax(base):
    slope = tail_slope(base, 50, 2500)
    assert abs(slope + 4) / 4 <= 0.02


def test_slope_approaches_gamma_slowly():
    # the 1/k correction means short windows read a shallower tail
    errs = [abs(tail_slope(solve_stationary(RateEqParams(3, 2, km)), 50, km // 2) + 4)
            for km in (500, 2000, 5000)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / 4 > 0.02


def test_tail_ratio_converges(base):
    dev = {k: abs(base.p[2 * k] / base.p[k] / 2 ** -4 - 1) for k in (50, 100, 200, 400, 800)}
    ks = sorted(dev)
    assert all(dev[a] > dev[b] for a, b in zip(ks, ks[1:]))
    # frozen from the solver: the deviation is roughly 8.7/k
    assert dev[100] == pytest.approx(0.0866, abs=5e-4)
    assert dev[200] < 0.05
    assert dev[800] < 0.012


def test_against_exact_rationals():
    for r, c, k_max in ((3, 2, 20), (2, 1, 15), (5, 3, 30)):
        exact = exact_truncated_solution(r, c, k_max)
        got = solve_stationary(RateEqParams(r, c, k_max)).p
        assert np.allclose(got, [float(x) for x in exact], rtol=1e-9, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(r=st.integers(2, 12), c=st.integers(1, 6), extra=st.integers(0, 200))
def test_invariants_any_params(r, c, extra):
    d = solve_stationary(RateEqParams(r, c, 10 * c + 50 + extra))
    assert d.max_residual <= 1e-10
    assert abs(d.total() - 1) <= 1e-8
    assert d.p.min() >= 0
    assert np.all(np.diff(d.p[c + 1:d.params.k_max // 2 + 1]) < 0)


def test_params_validation():
    with pytest.raises(ValueError):
        RateEqParams(1, 2, 100)
    with pytest.raises(ValueError):
        RateEqParams(3, 5, 49)


class TestAsymptotic:
    def test_prefactor_r3(self):
        assert asymptotic_prefactor(3) == 48.0
        assert asymptotic_pk(2, 3) == 3.0

    def test_prefactor_log_gamma(self):
        for r in (2, 4, 7, 50):
            g, a = (3 * r - 1) / (r - 1), 2 / (r + 1)
            expect = math.exp(math.lgamma(g) - (g - 1) * math.log(1 - a))
            assert asymptotic_prefactor(r) == pytest.approx(expect, rel=1e-10)

    @given(k=st.integers(1, 10**6), r=st.integers(2, 100))
    def test_ratio_pure_power(self, k, r):
        g = (3 * r - 1) / (r - 1)
        assert asymptotic_pk(2 * k, r) / asymptotic_pk(k, r) == pytest.approx(2 ** -g, rel=1e-12)

    def test_vectorised(self):
        k = np.array([1, 2, 10])
        assert np.allclose(asymptotic_pk(k, 3), 48.0 * k ** -4.0)

    @pytest.mark.parametrize("k,r", [(0, 3), (5, 1)])
    def test_rejects(self, k, r):
        with pytest.raises(ValueError):
            asymptotic_pk(k, r)

    def test_proportional_to_solver_tail(self, base):
        # same power, different constant: p_k k^4 settles to a plateau
        k = np.array([500, 1000, 2000])
        plateau = base.p[k] * k ** 4.0
        assert np.all(np.abs(np.diff(plateau)) / plateau[1:] < 0.06)
