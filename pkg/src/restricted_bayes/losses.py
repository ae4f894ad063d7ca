"""Catalog of loss functions for parameters on restricted spaces.

Every loss evaluates to a non-negative value, vanishes at d = theta, and is
defined only for points strictly inside its parameter space.  The univariate
ratio-based losses diverge as the decision approaches a boundary of the
space, which is what makes them suitable for conservative estimation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .spaces import (
    Interval,
    ParameterSpace,
    PositiveHalfLine,
    RealLine,
)

__all__ = [
    "LossFunction",
    "SquaredError",
    "Precautionary",
    "ScaleFamily",
    "ScaleInvariantPrecautionary",
    "NormalizedSquared",
    "Stein",
    "BrownLog",
    "IntervalSquared",
    "IntervalBrownLogit",
    "MultivariateScaleFamily",
    "MultivariatePrecautionary",
    "evaluate",
]


@dataclass(frozen=True)
class LossFunction:
    """Base class: a loss with a fixed parameter space and strict domain checks."""

    kind = "abstract"

    @property
    def space(self) -> ParameterSpace:
        raise NotImplementedError

    @property
    def dim(self) -> int | None:
        """Number of coordinates for multivariate kinds, None for univariate."""
        return None

    def evaluate(self, theta, d) -> float:
        """Loss of taking decision d when the parameter equals theta."""
        theta, d = self._validate(theta, d)
        return float(self._value(theta, d))

    def _validate(self, theta, d):
        m = self.dim
        if m is None:
            theta = float(theta)
            d = float(d)
        else:
            theta = np.asarray(theta, dtype=float)
            d = np.asarray(d, dtype=float)
            if theta.shape != (m,) or d.shape != (m,):
                raise DimensionError(
                    f"{self.kind} expects vectors of length {m}, got {np.shape(theta)} and {np.shape(d)}"
                )
        sp = self.space
        if not sp.contains(theta):
            raise DomainError(f"theta={theta!r} not strictly inside {sp}")
        if not sp.contains(d):
            raise DomainError(f"d={d!r} not strictly inside {sp}")
        return theta, d

    def _value(self, theta, d):
        """Loss formula; must accept numpy arrays elementwise for univariate kinds."""
        raise NotImplementedError


@dataclass(frozen=True)
class SquaredError(LossFunction):
    """(theta - d)^2 on the real line."""

    kind = "squared_error"

    @property
    def space(self) -> ParameterSpace:
        return RealLine()

    def _value(self, theta, d):
        return (d - theta) ** 2


@dataclass(frozen=True)
class Precautionary(LossFunction):
    """(d - theta)^2 / d on the positive half-line.

    Penalizes d -> 0 infinitely but is not scale invariant; its scale
    invariant counterpart is :class:`ScaleInvariantPrecautionary`.
    """

    kind = "precautionary"

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    def _value(self, theta, d):
        return (d - theta) ** 2 / d


@dataclass(frozen=True)
class ScaleFamily(LossFunction):
    """(d/theta)^k + (theta/d)^k - 2 on the positive half-line, k > 0.

    Scale invariant, scale symmetric, convex in d, and divergent as d -> 0
    or d -> infinity; the constant makes the minimum value zero at d = theta.
    """

    k: float = 1.0
    kind = "scale_family"

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"scale family order k must be positive, got {self.k}")

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    def _value(self, theta, d):
        r = d / theta
        return r**self.k + r ** (-self.k) - 2.0


@dataclass(frozen=True)
class ScaleInvariantPrecautionary(LossFunction):
    """(d - theta)^2 / (theta * d): the order-1 member of the scale family."""

    kind = "scale_invariant_precautionary"

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    def _value(self, theta, d):
        return (d - theta) ** 2 / (theta * d)


@dataclass(frozen=True)
class NormalizedSquared(LossFunction):
    """(d/theta - 1)^2: scale invariant but not scale symmetric."""

    kind = "normalized_squared"

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    def _value(self, theta, d):
        return (d / theta - 1.0) ** 2


@dataclass(frozen=True)
class Stein(LossFunction):
    """d/theta - 1 - log(d/theta): the entropy loss for a scale parameter."""

    kind = "stein"

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    def _value(self, theta, d):
        r = d / theta
        return r - 1.0 - np.log(r)


@dataclass(frozen=True)
class BrownLog(LossFunction):
    """(log theta - log d)^2: squared error after a log rescaling.

    Scale invariant and scale symmetric but not convex in d.
    """

    kind = "brown_log"

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    def _value(self, theta, d):
        return (np.log(theta) - np.log(d)) ** 2


@dataclass(frozen=True)
class IntervalSquared(LossFunction):
    """(d - theta)^2 / ((d - a)(b - d)) on the open interval (a, b).

    Interval symmetric, convex in d, and divergent as d approaches either
    endpoint; generalizes both squared error and the precautionary loss.
    """

    a: float
    b: float
    kind = "interval_squared"

    def __post_init__(self):
        Interval(self.a, self.b)  # bound validation

    @property
    def space(self) -> ParameterSpace:
        return Interval(self.a, self.b)

    def _value(self, theta, d):
        return (d - theta) ** 2 / ((d - self.a) * (self.b - d))


@dataclass(frozen=True)
class IntervalBrownLogit(LossFunction):
    """Squared difference of generalized logits on (a, b).

    The interval analogue of :class:`BrownLog`; on (0, 1) this is the
    squared logit distance used for compositional data.  Not convex.
    """

    a: float
    b: float
    kind = "interval_brown_logit"

    def __post_init__(self):
        Interval(self.a, self.b)

    @property
    def space(self) -> ParameterSpace:
        return Interval(self.a, self.b)

    def _value(self, theta, d):
        lt = np.log((theta - self.a) / (self.b - theta))
        ld = np.log((d - self.a) / (self.b - d))
        return (ld - lt) ** 2


@dataclass(frozen=True)
class MultivariateScaleFamily(LossFunction):
    """Coordinatewise sum of order-k scale-family losses on the positive orthant.

    sum_j [(d_j/theta_j)^k + (theta_j/d_j)^k] - 2m, so each boundary
    decision d_j in {0, inf} is penalized infinitely and the minimum is zero.
    """

    k: float = 1.0
    m: int = 2
    kind = "multivariate_scale_family"

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"order k must be positive, got {self.k}")
        if self.m < 1:
            raise DomainError(f"dimension m must be positive, got {self.m}")

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    @property
    def dim(self) -> int:
        return self.m

    def _value(self, theta, d):
        r = d / theta
        return float(np.sum(r**self.k + r ** (-self.k))) - 2.0 * self.m


@dataclass(frozen=True)
class MultivariatePrecautionary(LossFunction):
    """Coordinatewise sum of precautionary losses on the positive orthant."""

    m: int = 2
    kind = "multivariate_precautionary"

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"dimension m must be positive, got {self.m}")

    @property
    def space(self) -> ParameterSpace:
        return PositiveHalfLine()

    @property
    def dim(self) -> int:
        return self.m

    def _value(self, theta, d):
        return float(np.sum((d - theta) ** 2 / d))


def evaluate(loss: LossFunction, theta, d) -> float:
    """Functional form of ``loss.evaluate(theta, d)``."""
    return loss.evaluate(theta, d)
