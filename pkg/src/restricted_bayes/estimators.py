"""Closed-form Bayes estimators, their achieved risks, and a numeric oracle.

The closed forms here minimize posterior expected loss for the ratio-based
and interval losses in :mod:`restricted_bayes.losses`.  Each one is paired in
the test suite with :func:`numeric_minimize`, a brute-force expected-loss
minimizer that knows nothing about the algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtri

from .errors import (
    BracketError,
    DomainError,
    MissingMomentError,
    NumericalError,
)
from .losses import LossFunction
from .moments import MomentSet, posterior_quadrature

__all__ = [
    "EstimatorResult",
    "scale_mean",
    "precautionary_estimate",
    "interval_estimate",
    "interval_point",
    "probability_estimate",
    "probability_estimate_dx",
    "numeric_minimize",
    "required_sample_size",
]

_MIDPOINT_EPS = 1e-9
_DISCRIMINANT_SLACK = 1e-12


@dataclass(frozen=True)
class EstimatorResult:
    """A Bayes point estimate together with its minimized expected loss."""

    point: float
    achieved_risk: float | None
    method: str  # "closed_form" or "numeric"

    def __post_init__(self):
        if not math.isfinite(self.point):
            raise NumericalError(f"non-finite estimate {self.point}")
        if self.achieved_risk is not None and self.achieved_risk < 0:
            raise NumericalError(f"negative achieved risk {self.achieved_risk}")


def scale_mean(moments: MomentSet) -> EstimatorResult:
    """Minimizer of the order-k ratio loss: (E[theta^k]/E[theta^-k])^(1/2k).

    The achieved risk 2*sqrt(E[theta^k]E[theta^-k]) - 2 plays the role the
    posterior variance plays for the posterior mean.
    """
    if not moments.has_power_moments:
        raise MissingMomentError("scale mean needs E[theta^k] and E[theta^-k]")
    k = moments.k
    point = (moments.mk / moments.mnegk) ** (1.0 / (2.0 * k))
    risk = max(0.0, 2.0 * math.sqrt(moments.mk * moments.mnegk) - 2.0)
    return EstimatorResult(point=point, achieved_risk=risk, method="closed_form")


def precautionary_estimate(moments: MomentSet) -> EstimatorResult:
    """Minimizer of (d-theta)^2/d: sqrt(E[theta^2]), never below E[theta]."""
    if moments.m2 < 0:
        raise NumericalError(f"E[theta^2] must be non-negative, got {moments.m2}")
    point = math.sqrt(moments.m2)
    risk = max(0.0, 2.0 * (point - moments.m1))
    return EstimatorResult(point=point, achieved_risk=risk, method="closed_form")


def interval_point(m1, m2, a: float, b: float):
    """Minimizer of the interval squared loss on (a, b); array-capable.

    Solves delta*d^2 + 2*M*d + (2ab*m1 - (a+b)*m2) = 0 with M = m2 - ab and
    delta = a+b-2*m1.  Two algebraically equal forms are used: for M >= 0 a
    rationalized form that stays stable as delta -> 0 (and yields the
    midpoint limit automatically), otherwise the direct quadratic root.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    ab = a * b
    apb = a + b
    delta = apb - 2.0 * m1
    big_m = m2 - ab
    disc = big_m * big_m + delta * apb * big_m + delta * delta * ab
    bad = disc < -_DISCRIMINANT_SLACK
    if np.any(bad):
        raise NumericalError(f"negative discriminant {disc[bad] if disc.ndim else disc}")
    disc = np.maximum(disc, 0.0)
    root = np.sqrt(disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = (apb * big_m + delta * ab) / (big_m + root)
        direct = (root - big_m) / delta
    point = np.where(big_m >= 0.0, stable, direct)
    point = np.where(np.abs(delta) < _MIDPOINT_EPS * (b - a), 0.5 * apb, point)
    return point


def interval_estimate(moments: MomentSet, a: float, b: float) -> EstimatorResult:
    """Bayes estimator for the interval squared loss on (a, b).

    Only E[theta] and E[theta^2] enter; the expected loss at any decision d
    is (d^2 - 2*E[theta]*d + E[theta^2]) / ((d-a)(b-d)), so the achieved
    risk is available in closed form as well.  The estimate is always
    strictly inside (a, b).
    """
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"need finite a < b, got ({a}, {b})")
    point = float(interval_point(moments.m1, moments.m2, a, b))
    if not (a < point < b) or not math.isfinite(point):
        raise NumericalError(f"interval estimate {point} escaped ({a}, {b})")
    risk = (point * point - 2.0 * moments.m1 * point + moments.m2) / ((point - a) * (b - point))
    return EstimatorResult(point=point, achieved_risk=max(0.0, risk), method="closed_form")


def _interval_point_direct(m1: float, m2: float, a: float, b: float) -> float:
    """The quadratic-root form written out directly (cross-check oracle only)."""
    delta = a + b - 2.0 * m1
    disc = (m2 - a * b) ** 2 - delta * (2.0 * a * b * m1 - (a + b) * m2)
    return (a * b - m2 + math.sqrt(max(0.0, disc))) / delta


def probability_estimate(x: float, n: int) -> float:
    """Interval-symmetric Bayes estimate of a probability from x successes in n trials.

    Closed form of :func:`interval_estimate` applied to the Beta(x+1, n-x+1)
    posterior on (0, 1):  1 / (1 + sqrt((n-x+1)(n-x+2) / ((x+1)(x+2)))).
    Strictly inside (0, 1) even at x = 0 and x = n.  Accepts real x so the
    delta-method derivative is well-defined.
    """
    if not (0 <= x <= n):
        raise DomainError(f"need 0 <= x <= n, got x={x}, n={n}")
    ratio = ((n - x + 1.0) * (n - x + 2.0)) / ((x + 1.0) * (x + 2.0))
    return 1.0 / (1.0 + math.sqrt(ratio))


def probability_estimate_dx(x: float, n: int) -> float:
    """Analytic derivative of :func:`probability_estimate` in its real argument x."""
    if not (0 <= x <= n):
        raise DomainError(f"need 0 <= x <= n, got x={x}, n={n}")
    num = (n - x + 1.0) * (n - x + 2.0)
    den = (x + 1.0) * (x + 2.0)
    g = num / den
    dnum = -(2.0 * (n - x) + 3.0)
    dden = 2.0 * x + 3.0
    dg = (dnum * den - num * dden) / (den * den)
    s = math.sqrt(g)
    return -dg / (2.0 * s * (1.0 + s) ** 2)


def numeric_minimize(loss: LossFunction, posterior, bracket: tuple[float, float]) -> EstimatorResult:
    """Minimize d -> E[loss(theta, d)] over the bracket by bounded Brent search.

    The expectation uses the posterior's own quadrature (or sample) nodes, so
    this routine is a loss-agnostic oracle for every closed-form estimator.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise DomainError(f"invalid bracket ({lo}, {hi})")
    space = loss.space
    if not (space.contains(lo) and space.contains(hi)):
        raise DomainError(f"bracket ({lo}, {hi}) not inside {space}")
    nodes, weights = posterior_quadrature(posterior)

    def risk(d: float) -> float:
        return float(np.dot(weights, loss._value(nodes, d)))

    # The posterior may extend past the loss's nominal space (the loss is
    # then integrated over all of its mass); only the decisions must stay
    # inside, so finiteness is checked once at the bracket midpoint.
    if not math.isfinite(risk(0.5 * (lo + hi))):
        raise DomainError("expected loss is not finite on the bracket interior")

    # Solver tolerance two orders tighter than the guaranteed 1e-8*(hi-lo):
    # the bounded search can leave an error of a few xatol behind.
    xatol = 1e-10 * (hi - lo)
    res = minimize_scalar(risk, bounds=(lo, hi), method="bounded", options={"xatol": xatol})
    point = float(res.x)
    if point - lo < 3.0 * xatol or hi - point < 3.0 * xatol:
        raise BracketError(f"minimum of expected loss pinned to bracket edge near {point}")
    return EstimatorResult(point=point, achieved_risk=max(0.0, float(res.fun)), method="numeric")


def required_sample_size(p_target: float, p_placebo: float, alpha: float, beta: float) -> int:
    """Per-group sample size for a one-sided two-proportion comparison.

    Normal-approximation formula with pooled variance under the null and
    unpooled variance under the alternative; the result is rounded up so the
    study is never under-powered by rounding.
    """
    if not (0.0 < p_placebo < p_target < 1.0):
        raise DomainError(f"need 0 < p_placebo < p_target < 1, got ({p_placebo}, {p_target})")
    if not (0.0 < alpha < 0.5 and 0.0 < beta < 0.5):
        raise DomainError(f"need alpha, beta in (0, 0.5), got alpha={alpha}, beta={beta}")
    z_a = float(ndtri(1.0 - alpha))
    z_b = float(ndtri(1.0 - beta))
    p_bar = 0.5 * (p_target + p_placebo)
    s0 = math.sqrt(2.0 * p_bar * (1.0 - p_bar))
    s1 = math.sqrt(p_target * (1.0 - p_target) + p_placebo * (1.0 - p_placebo))
    n = ((z_a * s0 + z_b * s1) / (p_target - p_placebo)) ** 2
    return int(math.ceil(n))
