"""The three binomial confidence-interval constructions."""

import math

import pytest
from scipy.special import ndtri

from restricted_bayes.errors import DomainError
from restricted_bayes.estimators import probability_estimate
from restricted_bayes.intervals import ci_delta_iq, ci_normal, ci_wilson_ac


class TestNormalApprox:
    def test_textbook_values(self):
        ci = ci_normal(0.5, 100, 0.95)
        z = float(ndtri(0.975))
        assert ci.center == 0.5
        assert ci.lo == pytest.approx(0.5 - z * 0.05, rel=1e-12)
        assert ci.hi == pytest.approx(0.5 + z * 0.05, rel=1e-12)

    def test_width_shrinks_like_root_n(self):
        for p in (0.2, 0.5, 0.9):
            w1 = ci_normal(p, 50).width
            w4 = ci_normal(p, 200).width
            assert w4 / w1 == pytest.approx(0.5, abs=1e-10)

    def test_degenerate_estimates_rejected(self):
        for p in (0.0, 1.0):
            with pytest.raises(DomainError):
                ci_normal(p, 15)

    def test_composition_with_shrunk_estimate(self):
        p = probability_estimate(7, 15)
        ci = ci_normal(p, 15, 0.95)
        z = float(ndtri(0.975))
        assert ci.center == pytest.approx(p)
        assert ci.width == pytest.approx(2 * z * math.sqrt(p * (1 - p) / 15), rel=1e-12)


class TestWilsonAc:
    def test_zero_successes(self):
        ci = ci_wilson_ac(0, 15)
        assert ci.center == pytest.approx(2.0 / 19.0, rel=1e-14)
        # sqrt(n) * sqrt(1/n) collapses, leaving a half-width of 2/(n+2)
        assert ci.width / 2 == pytest.approx(2.0 / 17.0, rel=1e-12)

    def test_symmetric_counts_center_at_half(self):
        ci = ci_wilson_ac(8, 16)
        assert ci.center == pytest.approx(0.5)
        assert ci.hi - 0.5 == pytest.approx(0.5 - ci.lo, rel=1e-12)

    def test_paediatric_center(self):
        assert ci_wilson_ac(19, 97).center == pytest.approx(21.0 / 101.0, rel=1e-14)

    def test_reflection_equivariance(self):
        for n in (15, 40):
            for x in range(n + 1):
                a = ci_wilson_ac(x, n)
                b = ci_wilson_ac(n - x, n)
                assert a.lo == pytest.approx(1.0 - b.hi, abs=1e-12)
                assert a.hi == pytest.approx(1.0 - b.lo, abs=1e-12)

    def test_bounds_may_leave_unit_interval_unclipped(self):
        ci = ci_wilson_ac(0, 4)
        assert ci.lo < 0.0
        lo, hi = ci.clipped()
        assert lo == 0.0 and hi == ci.hi


class TestDeltaIq:
    def test_symmetric_count(self):
        ci = ci_delta_iq(8, 16)
        assert ci.center == pytest.approx(0.5)
        assert ci.hi - 0.5 == pytest.approx(0.5 - ci.lo, rel=1e-10)

    def test_paediatric_center_matches_closed_form(self):
        ci = ci_delta_iq(19, 97)
        assert ci.center == pytest.approx(probability_estimate(19, 97), rel=1e-14)
        assert ci.center == pytest.approx(0.204955, abs=1e-6)

    def test_interval_contains_center_with_positive_width(self):
        for n in (15, 100):
            for x in range(1, n):
                ci = ci_delta_iq(x, n)
                assert ci.lo < ci.center < ci.hi

    def test_variance_uses_slope_at_rescaled_count(self):
        # reconstruct the half-width from the published recipe
        from restricted_bayes.estimators import probability_estimate_dx

        x, n = 7, 15
        p = probability_estimate(x, n)
        half = 2.0 * math.sqrt(probability_estimate_dx(n * p, n) ** 2 * n * p * (1 - p))
        ci = ci_delta_iq(x, n)
        assert ci.width / 2 == pytest.approx(half, rel=1e-12)

    def test_counts_validated(self):
        with pytest.raises(DomainError):
            ci_delta_iq(-1, 15)
        with pytest.raises(DomainError):
            ci_delta_iq(16, 15)


class TestAllKinds:
    def test_widths_positive_for_interior_counts(self):
        n = 15
        for x in range(1, n):
            p_q = (x + 1) / (n + 2)
            assert ci_normal(p_q, n).width > 0
            assert ci_wilson_ac(x, n).width > 0
            assert ci_delta_iq(x, n).width > 0

    def test_coverage_bookkeeping_uses_raw_bounds(self):
        ci = ci_wilson_ac(0, 4)
        assert ci.covers(ci.lo)  # even though lo < 0
        assert not ci.covers(ci.hi + 1e-12)
