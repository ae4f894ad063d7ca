"""Approximate confidence intervals for a binomial proportion.

Three constructions: the plain normal approximation around any point
estimate, a Wilson-style interval centred on the add-two-successes
estimate, and a delta-method interval around the interval-symmetric
estimate.  Bounds are reported unclipped; the formulas can leave (0, 1),
and coverage bookkeeping is expected to use the raw bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import ndtri

from .errors import DomainError
from .estimators import probability_estimate, probability_estimate_dx

__all__ = ["ConfidenceInterval", "ci_normal", "ci_wilson_ac", "ci_delta_iq"]


@dataclass(frozen=True)
class ConfidenceInterval:
    lo: float
    hi: float
    center: float
    kind: str  # "normal_approx", "wilson_ac", or "delta_iq"
    level: float

    def __post_init__(self):
        if not (0.0 < self.level < 1.0):
            raise DomainError(f"level must be in (0, 1), got {self.level}")
        if not self.lo <= self.center <= self.hi:
            raise DomainError(f"need lo <= center <= hi, got ({self.lo}, {self.center}, {self.hi})")

    def covers(self, theta: float) -> bool:
        return self.lo <= theta <= self.hi

    def clipped(self, lo: float = 0.0, hi: float = 1.0) -> tuple[float, float]:
        """Display view clipped to [lo, hi]; never used for coverage counts."""
        return max(self.lo, lo), min(self.hi, hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


def ci_normal(p_hat: float, n: int, level: float = 0.95) -> ConfidenceInterval:
    """p_hat +/- z_(alpha/2) * sqrt(p_hat (1 - p_hat) / n)."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not (0.0 < p_hat < 1.0):
        raise DomainError(f"normal-approximation interval needs 0 < p_hat < 1, got {p_hat}")
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must be in (0, 1), got {level}")
    z = float(ndtri(0.5 + 0.5 * level))
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n)
    return ConfidenceInterval(p_hat - half, p_hat + half, p_hat, "normal_approx", level)


def ci_wilson_ac(x: int, n: int) -> ConfidenceInterval:
    """(x+2)/(n+4) +/- 2 * (sqrt(n)/(n+2)) * sqrt(x(n-x)/n^2 + 1/n).

    The fixed multiplier 2 (not a z quantile) is part of the construction;
    the nominal level is treated as 95%.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not (0 <= x <= n):
        raise DomainError(f"need 0 <= x <= n, got x={x}, n={n}")
    center = (x + 2.0) / (n + 4.0)
    half = 2.0 * (math.sqrt(n) / (n + 2.0)) * math.sqrt(x * (n - x) / n**2 + 1.0 / n)
    return ConfidenceInterval(center - half, center + half, center, "wilson_ac", 0.95)


def ci_delta_iq(x: int, n: int) -> ConfidenceInterval:
    """Delta-method interval around the interval-symmetric probability estimate.

    The estimate is p = f(x) with f = :func:`probability_estimate`; its
    variance is approximated by (f'(x*))^2 * n p (1-p) with the derivative
    taken at x* = n*p, and the interval is p +/- 2 sqrt(V).
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not (0 <= x <= n):
        raise DomainError(f"need 0 <= x <= n, got x={x}, n={n}")
    p = probability_estimate(x, n)
    slope = probability_estimate_dx(n * p, n)
    var = slope * slope * n * p * (1.0 - p)
    half = 2.0 * math.sqrt(var)
    return ConfidenceInterval(p - half, p + half, p, "delta_iq", 0.95)
