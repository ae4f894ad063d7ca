"""Parameter spaces, the generalized logit, counterparts, and distances."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from restricted_bayes.errors import DimensionError, DomainError
from restricted_bayes.spaces import (
    Interval,
    PositiveHalfLine,
    RealLine,
    Rectangle,
    UnitSimplex,
    generalized_logit,
    interval_symmetry_midpoint,
    inverse_generalized_logit,
    multivariate_distance,
    symmetric_counterpart,
)


class TestMembership:
    def test_interval_is_open(self):
        space = Interval(0.0, 1.0)
        assert space.contains(0.5)
        assert not space.contains(0.0)
        assert not space.contains(1.0)
        assert not space.contains(-0.1)

    def test_positive_half_line_is_open(self):
        space = PositiveHalfLine()
        assert space.contains(1e-300)
        assert not space.contains(0.0)
        assert not space.contains(-1.0)

    def test_real_line_excludes_non_finite(self):
        assert RealLine().contains(-1e300)
        assert not RealLine().contains(math.inf)
        assert not RealLine().contains(math.nan)

    def test_simplex_needs_unit_sum_and_positivity(self):
        space = UnitSimplex(3)
        assert space.contains((0.2, 0.3, 0.5))
        assert not space.contains((0.2, 0.3, 0.6))
        assert not space.contains((0.0, 0.5, 0.5))
        assert space.contains((0.2, 0.3, 0.5 + 5e-13))

    def test_rectangle_checks_each_component(self):
        space = Rectangle(((0.0, 1.0), (-2.0, 2.0)))
        assert space.contains((0.5, 0.0))
        assert not space.contains((0.5, 2.0))
        assert not space.contains((0.5,))

    def test_invalid_constructions(self):
        with pytest.raises(DomainError):
            Interval(1.0, 1.0)
        with pytest.raises(DomainError):
            Interval(0.0, math.inf)
        with pytest.raises(DomainError):
            UnitSimplex(1)
        with pytest.raises(DomainError):
            Rectangle(((1.0, 0.0),))


class TestGeneralizedLogit:
    def test_midpoint_maps_to_zero(self):
        assert generalized_logit(0.5, 0.0, 1.0) == 0.0

    def test_standard_logit_value(self):
        assert generalized_logit(0.75, 0.0, 1.0) == pytest.approx(math.log(3.0), rel=1e-15)

    def test_symmetry_about_midpoint(self):
        assert generalized_logit(1.0, 0.0, 4.0) == pytest.approx(-math.log(3.0), rel=1e-15)

    def test_boundary_inputs_rejected(self):
        for bad in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(DomainError):
                generalized_logit(bad, 0.0, 1.0)

    @given(st.floats(-3.0, 5.0), st.floats(0.01, 0.99))
    def test_roundtrip_and_monotonicity(self, a, frac):
        b = a + 2.5
        x = a + frac * (b - a)
        t = generalized_logit(x, a, b)
        assert inverse_generalized_logit(t, a, b) == pytest.approx(x, abs=1e-12)
        assert generalized_logit(min(x + 1e-6, b - 1e-9), a, b) >= t

    def test_inverse_stays_strictly_inside_for_huge_arguments(self):
        assert 0.0 < inverse_generalized_logit(-700.0, 0.0, 1.0)
        assert inverse_generalized_logit(700.0, 0.0, 1.0) <= 1.0


class TestSymmetricCounterpart:
    def test_real_line_reflection(self):
        assert symmetric_counterpart(RealLine(), 0.0, 3.0) == -3.0

    def test_positive_half_line_geometric_pair(self):
        # estimates of 1000 and 10 around a true value of 100 are the same
        # kind of pair, scaled down: 100 and 1 around 10
        assert symmetric_counterpart(PositiveHalfLine(), 10.0, 100.0) == pytest.approx(1.0)

    def test_interval_logit_reflection(self):
        assert symmetric_counterpart(Interval(0.0, 1.0), 0.5, 0.25) == pytest.approx(0.75, abs=1e-14)

    def test_interval_counterpart_satisfies_midpoint_identity(self):
        rng = np.random.default_rng(42)
        space = Interval(-1.0, 3.0)
        for _ in range(300):
            theta = rng.uniform(-0.9, 2.9)
            d1 = rng.uniform(-0.9, 2.9)
            d2 = symmetric_counterpart(space, theta, d1)
            if abs((space.a + space.b) - (d1 + d2)) < 1e-6:
                continue  # the closed form is singular there
            assert interval_symmetry_midpoint(space.a, space.b, d1, d2) == pytest.approx(
                theta, abs=1e-9
            )

    def test_wide_interval_recovers_real_line_reflection(self):
        space = Interval(-1e6, 1e6)
        rng = np.random.default_rng(7)
        for _ in range(100):
            theta = rng.uniform(0.1, 10.0)
            d1 = rng.uniform(0.1, 10.0)
            got = symmetric_counterpart(space, theta, d1)
            assert got == pytest.approx(2.0 * theta - d1, abs=1e-4)

    def test_positive_interval_recovers_geometric_pair(self):
        space = Interval(1e-9, 1e9)
        rng = np.random.default_rng(8)
        for _ in range(100):
            theta = rng.uniform(0.1, 10.0)
            d1 = rng.uniform(0.1, 10.0)
            got = symmetric_counterpart(space, theta, d1)
            assert got == pytest.approx(theta * theta / d1, rel=1e-4)

    def test_out_of_space_inputs_rejected(self):
        with pytest.raises(DomainError):
            symmetric_counterpart(PositiveHalfLine(), -1.0, 2.0)
        with pytest.raises(DomainError):
            symmetric_counterpart(Interval(0.0, 1.0), 0.5, 1.0)
        with pytest.raises(DomainError):
            symmetric_counterpart(UnitSimplex(2), 0.5, 0.5)


class TestMultivariateDistance:
    def test_one_component_rectangle_reduces_to_logit_distance(self):
        d = multivariate_distance(Rectangle(((0.0, 1.0),)), (0.5,), (0.75,))
        assert d == pytest.approx(math.log(3.0), rel=1e-12)

    def test_positive_orthant_log_distance(self):
        d = multivariate_distance(PositiveHalfLine(), (1.0, 1.0), (math.e, math.e))
        assert d == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_identity_of_indiscernibles_on_simplex(self):
        assert multivariate_distance(UnitSimplex(2), (0.5, 0.5), (0.5, 0.5)) == 0.0

    def test_euclidean_on_real_space(self):
        d = multivariate_distance(RealLine(), (0.0, 0.0), (3.0, 4.0))
        assert d == pytest.approx(5.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            multivariate_distance(RealLine(), (0.0, 0.0), (1.0,))

    def test_simplex_distance_invariant_under_perturbation(self):
        # multiplying components by a positive vector and renormalizing keeps
        # every pairwise log-ratio difference unchanged
        rng = np.random.default_rng(11)
        space = UnitSimplex(4)
        for _ in range(50):
            x = rng.dirichlet(np.ones(4))
            y = rng.dirichlet(np.ones(4))
            c = rng.uniform(0.2, 5.0, size=4)
            xc = x * c
            xc /= xc.sum()
            yc = y * c
            yc /= yc.sum()
            base = multivariate_distance(space, x, y)
            pert = multivariate_distance(space, xc, yc)
            assert pert == pytest.approx(base, abs=1e-12 * max(1.0, base))

    def test_symmetric_in_arguments(self):
        space = PositiveHalfLine()
        assert multivariate_distance(space, (1.0, 2.0), (3.0, 0.5)) == pytest.approx(
            multivariate_distance(space, (3.0, 0.5), (1.0, 2.0)), rel=1e-15
        )
