"""Closed-form estimators against the brute-force expected-loss minimizer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from restricted_bayes.errors import (
    BracketError,
    DomainError,
    MissingMomentError,
)
from restricted_bayes.estimators import (
    _interval_point_direct,
    interval_estimate,
    interval_point,
    numeric_minimize,
    precautionary_estimate,
    probability_estimate,
    probability_estimate_dx,
    required_sample_size,
    scale_mean,
)
from restricted_bayes.losses import IntervalSquared, Precautionary, ScaleFamily, SquaredError
from restricted_bayes.moments import (
    BetaConjugate,
    Grid1D,
    MmomentSet,
    MonteCarlo,
    beta_moments,
    grid_moments_1d,
    mc_moments,
)


def lognormal_moments(mu: float, sigma: float, k: float) -> MomentSet:
    m = lambda p: math.exp(p * mu + 0.5 * p * p * sigma * sigma)
    return MomentSet(m1=m(1), m2=m(2), k=k, mk=m(k), mnegk=m(-k))


def lognormal_grid(mu: float, sigma: float) -> Grid1D:
    lo, hi = math.exp(mu - 9 * sigma), math.exp(mu + 9 * sigma)

    def ld(x):
        z = (np.log(x) - mu) / sigma
        return -0.5 * z * z - np.log(x)

    return Grid1D((lo, hi), ld, nodes=4001, hard_support=False)


class TestScaleMean:
    def test_lognormal_scale_mean_is_exp_mu_for_every_order(self):
        for k in (0.5, 1.0, 2.0, 3.7):
            res = scale_mean(lognormal_moments(0.7, 1.3, k))
            assert res.point == pytest.approx(math.exp(0.7), rel=1e-12)
            assert res.achieved_risk >= 0.0

    def test_point_mass_sample(self):
        res = scale_mean(mc_moments([3.0, 3.0, 3.0, 3.0], k=1.0))
        assert res.point == pytest.approx(3.0, rel=1e-14)
        assert res.achieved_risk == pytest.approx(0.0, abs=1e-12)

    def test_beta_posterior_matches_numeric_minimizer(self):
        moments = beta_moments(7, 15, k=1.0)
        closed = scale_mean(moments)
        numeric = numeric_minimize(ScaleFamily(1.0), BetaConjugate(7, 15), (1e-4, 1 - 1e-4))
        assert closed.point == pytest.approx(numeric.point, abs=1e-6)
        assert closed.achieved_risk == pytest.approx(numeric.achieved_risk, abs=1e-6)

    def test_missing_power_moments(self):
        with pytest.raises(MissingMomentError):
            scale_mean(beta_moments(7, 15))

    def test_rescaling_equivariance(self):
        rng = np.random.default_rng(13)
        draws = rng.gamma(4.0, 0.5, size=500)
        base = scale_mean(mc_moments(draws, k=2.0)).point
        for c in (0.1, 3.0, 42.0):
            scaled = scale_mean(mc_moments(c * draws, k=2.0)).point
            assert scaled == pytest.approx(c * base, rel=1e-10)


class TestPrecautionary:
    def test_point_mass(self):
        res = precautionary_estimate(mc_moments([2.0, 2.0]))
        assert res.point == pytest.approx(2.0)
        assert res.achieved_risk == pytest.approx(0.0, abs=1e-12)

    def test_beta_value_and_mean_bound(self):
        moments = beta_moments(7, 15)
        res = precautionary_estimate(moments)
        assert res.point == pytest.approx(math.sqrt(72.0 / 306.0), rel=1e-12)
        assert res.point >= moments.m1

    def test_uniform_posterior(self):
        res = precautionary_estimate(beta_moments(0, 0))
        assert res.point == pytest.approx(math.sqrt(1.0 / 3.0), rel=1e-12)

    def test_matches_numeric_minimizer(self):
        numeric = numeric_minimize(Precautionary(), BetaConjugate(7, 15), (1e-4, 1 - 1e-4))
        assert precautionary_estimate(beta_moments(7, 15)).point == pytest.approx(
            numeric.point, abs=1e-7
        )


class TestIntervalEstimate:
    def test_symmetric_posterior_hits_midpoint(self):
        res = interval_estimate(MomentSet(m1=0.0, m2=0.5), -2.0, 2.0)
        assert res.point == pytest.approx(0.0, abs=1e-12)

    def test_paediatric_point(self):
        res = interval_estimate(beta_moments(19, 97), 0.1, 1.0)
        assert res.point == pytest.approx(0.209, abs=5e-4)

    def test_dual_oracle_on_unit_interval(self):
        moments = beta_moments(7, 15)
        closed = interval_estimate(moments, 0.0, 1.0)
        numeric = numeric_minimize(
            IntervalSquared(0.0, 1.0), BetaConjugate(7, 15), (1e-5, 1 - 1e-5)
        )
        assert closed.point == pytest.approx(numeric.point, abs=1e-6)
        assert closed.point == pytest.approx(probability_estimate(7, 15), abs=1e-12)

    def test_closed_form_identity_with_probability_estimate(self):
        for n in (1, 15, 97, 1000):
            for x in range(0, n + 1, max(1, n // 25)):
                a = interval_estimate(beta_moments(x, n), 0.0, 1.0).point
                assert abs(a - probability_estimate(x, n)) <= 1e-12

    def test_wide_interval_recovers_posterior_mean(self):
        m = lognormal_moments(0.4, 0.3, 1.0)
        res = interval_estimate(m, -1e6, 1e6)
        assert res.point == pytest.approx(m.m1, abs=1e-4)

    def test_positive_interval_recovers_precautionary_point(self):
        m = lognormal_moments(0.4, 0.3, 1.0)
        res = interval_estimate(m, 1e-9, 1e9)
        assert res.point == pytest.approx(math.sqrt(m.m2), rel=1e-6)

    def test_mean_below_interval_still_yields_interior_point(self):
        # posterior mass is allowed to sit partly outside the loss interval;
        # the expected loss still has a unique interior minimum
        res = interval_estimate(beta_moments(0, 10), 0.1, 1.0)
        assert 0.1 < res.point < 1.0
        assert res.point == pytest.approx(0.1707211, abs=1e-6)

    def test_result_strictly_inside_for_extreme_counts(self):
        for x, n in ((0, 15), (15, 15), (0, 1000), (1000, 1000)):
            res = interval_estimate(beta_moments(x, n), 0.0, 1.0)
            assert 0.0 < res.point < 1.0

    def test_continuity_across_the_midpoint_branch(self):
        # the estimator is continuous in the mean through the near-midpoint
        # switch, and the direct quadratic-root form agrees away from it
        a, b = -1.0, 3.0
        for eps in (1e-6, 1e-8, 1e-10, 0.0):
            m1 = 1.0 + eps
            m2 = m1 * m1 + 0.8
            p_stable = float(interval_point(m1, m2, a, b))
            assert p_stable == pytest.approx(1.0, abs=1e-5)
            if eps > 1e-9:
                assert _interval_point_direct(m1, m2, a, b) == pytest.approx(p_stable, abs=1e-7)
        near = float(interval_point(1.0 + 1.1e-9 * 4.0, 1.0**2 + 0.8, a, b))
        limit = float(interval_point(1.0, 1.0 + 0.8, a, b))
        assert near == pytest.approx(limit, abs=1e-7)

    def test_degenerate_interval_rejected(self):
        with pytest.raises(DomainError):
            interval_estimate(beta_moments(7, 15), 0.5, 0.5)

    def test_achieved_risk_is_expected_loss_at_point(self):
        moments = beta_moments(7, 15)
        res = interval_estimate(moments, 0.0, 1.0)
        d = res.point
        expected = (d * d - 2.0 * moments.m1 * d + moments.m2) / ((d - 0.0) * (1.0 - d))
        assert res.achieved_risk == pytest.approx(expected, rel=1e-12)
        numeric = numeric_minimize(
            IntervalSquared(0.0, 1.0), BetaConjugate(7, 15), (1e-5, 1 - 1e-5)
        )
        assert res.achieved_risk == pytest.approx(numeric.achieved_risk, abs=1e-6)


class TestProbabilityEstimate:
    def test_symmetric_count_gives_half(self):
        for n in (2, 14, 100):
            assert probability_estimate(n // 2, n) == pytest.approx(0.5, abs=1e-15)

    def test_zero_successes_value(self):
        assert probability_estimate(0, 15) == pytest.approx(1.0 / (1.0 + math.sqrt(136.0)), rel=1e-12)

    def test_comparison_with_naive_rate(self):
        assert probability_estimate(19, 97) > 19 / 97  # pulled away from the nearer bound

    @given(st.integers(1, 200))
    @settings(max_examples=30, deadline=None)
    def test_strictly_increasing_in_successes(self, n):
        values = [probability_estimate(x, n) for x in range(n + 1)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert 0.0 < values[0] and values[-1] < 1.0

    def test_derivative_matches_finite_differences(self):
        h = 1e-4
        for n in (15, 100):
            for x in range(1, n):
                fd = (probability_estimate(x + h, n) - probability_estimate(x - h, n)) / (2 * h)
                an = probability_estimate_dx(x, n)
                assert abs(an - fd) <= 1e-6 * abs(an)


class TestNumericMinimize:
    def test_squared_error_recovers_posterior_mean(self):
        res = numeric_minimize(SquaredError(), BetaConjugate(7, 15), (1e-4, 1 - 1e-4))
        assert res.point == pytest.approx(8.0 / 17.0, abs=1e-8)

    def test_scale_family_on_lognormal_grid(self):
        grid = lognormal_grid(0.2, 0.4)
        moments = grid_moments_1d(grid, k=3.0)
        closed = scale_mean(moments)
        numeric = numeric_minimize(ScaleFamily(3.0), grid, (0.05, 30.0))
        assert closed.point == pytest.approx(numeric.point, abs=1e-6)

    def test_monte_carlo_posterior(self):
        rng = np.random.default_rng(3)
        draws = rng.lognormal(0.0, 0.4, size=4000)
        res = numeric_minimize(Precautionary(), MonteCarlo(draws), (0.05, 20.0))
        assert res.point == pytest.approx(math.sqrt(np.mean(draws**2)), abs=1e-7)

    def test_edge_pinned_minimum_raises(self):
        with pytest.raises(BracketError):
            numeric_minimize(SquaredError(), BetaConjugate(7, 15), (0.8, 0.9))

    def test_bracket_outside_loss_space_rejected(self):
        with pytest.raises(DomainError):
            numeric_minimize(ScaleFamily(1.0), BetaConjugate(7, 15), (-0.5, 0.9))


class TestRequiredSampleSize:
    def test_paediatric_yields_41_and_45(self):
        assert required_sample_size(0.5, 19.0 / 97.0, 0.05, 0.10) == 41
        p_iq = interval_estimate(beta_moments(19, 97), 0.1, 1.0).point
        assert required_sample_size(0.5, p_iq, 0.05, 0.10) == 45
        assert required_sample_size(0.5, 0.209, 0.05, 0.10) == 45
        # the rounded naive rate gives the same answer
        assert required_sample_size(0.5, 0.196, 0.05, 0.10) == 41

    def test_vanishing_effect_blows_up_monotonically(self):
        sizes = [required_sample_size(0.5, p, 0.05, 0.10) for p in (0.30, 0.40, 0.45, 0.49)]
        assert all(b > a for a, b in zip(sizes, sizes[1:]))
        assert sizes[-1] > 10_000

    def test_invalid_inputs(self):
        with pytest.raises(DomainError):
            required_sample_size(0.5, 0.5, 0.05, 0.10)
        with pytest.raises(DomainError):
            required_sample_size(0.5, 0.6, 0.05, 0.10)
        with pytest.raises(DomainError):
            required_sample_size(0.5, 0.2, 0.7, 0.10)


class TestRandomizedOracleEquivalence:
    def test_twenty_posteriors(self):
        rng = np.random.default_rng(101)
        for trial in range(20):
            if trial % 2 == 0:
                x = int(rng.integers(3, 13))
                n = int(rng.integers(x + 3, 40))
                k = float(rng.uniform(0.5, min(2.5, x)))
                moments = beta_moments(x, n, k=k)
                posterior = BetaConjugate(x, n)
                bracket = (1e-4, 1 - 1e-4)
                interval = (0.0, 1.0)
            else:
                mu = float(rng.uniform(-0.3, 1.0))
                sigma = float(rng.uniform(0.2, 0.6))
                k = float(rng.uniform(0.5, 3.0))
                posterior = lognormal_grid(mu, sigma)
                moments = grid_moments_1d(posterior, k=k)
                bracket = (0.01, 60.0)
                span = 4.0 * math.sqrt(moments.m2 - moments.m1**2)
                interval = (max(1e-6, moments.m1 - span), moments.m1 + span)

            assert scale_mean(moments).point == pytest.approx(
                numeric_minimize(ScaleFamily(k), posterior, bracket).point, abs=1e-6
            )
            assert precautionary_estimate(moments).point == pytest.approx(
                numeric_minimize(Precautionary(), posterior, bracket).point, abs=1e-6
            )
            a, b = interval
            lo = max(bracket[0], a + 1e-9 * (b - a))
            hi = min(bracket[1], b - 1e-9 * (b - a))
            assert interval_estimate(moments, a, b).point == pytest.approx(
                numeric_minimize(IntervalSquared(a, b), posterior, (lo, hi)).point, abs=1e-6
            )
