"""Restricted parameter spaces, the generalized logit, and symmetry utilities.

A parameter space here is always an open set: membership tests are strict,
and operations raise :class:`~restricted_bayes.errors.DomainError` for points
on or outside the boundary rather than clamping them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "ParameterSpace",
    "RealLine",
    "PositiveHalfLine",
    "Interval",
    "Rectangle",
    "UnitSimplex",
    "generalized_logit",
    "inverse_generalized_logit",
    "symmetric_counterpart",
    "interval_symmetry_midpoint",
    "multivariate_distance",
]

_SIMPLEX_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ParameterSpace:
    """Base class for open parameter domains."""

    def contains(self, x) -> bool:
        """Strict membership test: boundary points are outside."""
        raise NotImplementedError

    def _require(self, x, name: str = "point") -> None:
        if not self.contains(x):
            raise DomainError(f"{name} {x!r} is not strictly inside {self}")


@dataclass(frozen=True)
class RealLine(ParameterSpace):
    def contains(self, x) -> bool:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        return bool(np.all(np.isfinite(arr)))


@dataclass(frozen=True)
class PositiveHalfLine(ParameterSpace):
    def contains(self, x) -> bool:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        return bool(np.all(np.isfinite(arr)) and np.all(arr > 0.0))


@dataclass(frozen=True)
class Interval(ParameterSpace):
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("interval bounds must be finite")
        if not self.a < self.b:
            raise DomainError(f"interval requires a < b, got ({self.a}, {self.b})")

    def contains(self, x) -> bool:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        return bool(np.all(np.isfinite(arr)) and np.all((arr > self.a) & (arr < self.b)))


@dataclass(frozen=True)
class Rectangle(ParameterSpace):
    """Axis-aligned product of open intervals (a_j, b_j)."""

    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if not bounds:
            raise DomainError("rectangle needs at least one component")
        for a, b in bounds:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise DomainError(f"rectangle component ({a}, {b}) must satisfy a < b, finite")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def contains(self, x) -> bool:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if arr.shape != (self.dim,):
            return False
        for xi, (a, b) in zip(arr, self.bounds):
            if not (math.isfinite(xi) and a < xi < b):
                return False
        return True


@dataclass(frozen=True)
class UnitSimplex(ParameterSpace):
    """Open unit simplex: m strictly positive components summing to one."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("simplex dimension m must be at least 2")

    def contains(self, x) -> bool:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if arr.shape != (self.m,):
            return False
        if not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
            return False
        return abs(float(arr.sum()) - 1.0) <= _SIMPLEX_SUM_TOL


def generalized_logit(x: float, a: float, b: float) -> float:
    """Map the open interval (a, b) onto the real line via log((x-a)/(b-x)).

    Reduces to the usual logit for (a, b) = (0, 1). Strictly increasing,
    diverging to -inf and +inf at the respective endpoints.
    """
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"need finite a < b, got ({a}, {b})")
    if not a < x < b:
        raise DomainError(f"x={x} outside open interval ({a}, {b})")
    return math.log((x - a) / (b - x))


def inverse_generalized_logit(t: float, a: float, b: float) -> float:
    """Inverse of :func:`generalized_logit`: a + (b-a)*sigmoid(t).

    Evaluated from the side that avoids cancellation, so results stay
    strictly inside (a, b) for any finite t.
    """
    if t >= 0:
        return a + (b - a) / (1.0 + math.exp(-t))
    e = math.exp(t)
    return a + (b - a) * e / (1.0 + e)


def symmetric_counterpart(space: ParameterSpace, theta: float, d1: float) -> float:
    """Return the decision d2 penalized equally to d1 by the space's symmetric losses.

    On the real line the pair is the reflection about theta; on the positive
    half-line theta is the geometric mean of the pair; on an interval the pair
    is reflected in generalized-logit coordinates.
    """
    if isinstance(space, RealLine):
        space._require(theta, "theta")
        space._require(d1, "d1")
        return 2.0 * theta - d1
    if isinstance(space, PositiveHalfLine):
        space._require(theta, "theta")
        space._require(d1, "d1")
        return theta * theta / d1
    if isinstance(space, Interval):
        space._require(theta, "theta")
        space._require(d1, "d1")
        t = 2.0 * generalized_logit(theta, space.a, space.b) - generalized_logit(d1, space.a, space.b)
        return inverse_generalized_logit(t, space.a, space.b)
    raise DomainError(f"symmetric counterpart is defined for univariate spaces only, not {space}")


def interval_symmetry_midpoint(a: float, b: float, d1: float, d2: float) -> float:
    """The theta for which d1, d2 are an interval-symmetric pair on (a, b).

    Closed form; suffers cancellation when a+b is close to d1+d2, so it is
    used as a cross-check oracle rather than by :func:`symmetric_counterpart`.
    """
    for name, d in (("d1", d1), ("d2", d2)):
        if not a < d < b:
            raise DomainError(f"{name}={d} outside ({a}, {b})")
    num = a * b - d1 * d2 + math.sqrt((d1 - a) * (b - d1) * (d2 - a) * (b - d2))
    return num / (a + b - d1 - d2)


def multivariate_distance(space: ParameterSpace, x, y) -> float:
    """Distance between two points that defines symmetry on the given space.

    Plain Euclidean on R^m; Euclidean in log coordinates on the positive
    orthant; Euclidean in generalized-logit coordinates on a rectangle; and
    the pairwise log-ratio (Aitchison) distance on the unit simplex.
    """
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    if xv.shape != yv.shape:
        raise DimensionError(f"mismatched dimensions {xv.shape} vs {yv.shape}")
    space._require(xv, "x")
    space._require(yv, "y")

    if isinstance(space, RealLine):
        return float(np.linalg.norm(xv - yv))
    if isinstance(space, PositiveHalfLine):
        return float(np.linalg.norm(np.log(xv) - np.log(yv)))
    if isinstance(space, Interval):
        lx = np.array([generalized_logit(v, space.a, space.b) for v in xv])
        ly = np.array([generalized_logit(v, space.a, space.b) for v in yv])
        return float(np.linalg.norm(lx - ly))
    if isinstance(space, Rectangle):
        lx = np.array([generalized_logit(v, a, b) for v, (a, b) in zip(xv, space.bounds)])
        ly = np.array([generalized_logit(v, a, b) for v, (a, b) in zip(yv, space.bounds)])
        return float(np.linalg.norm(lx - ly))
    if isinstance(space, UnitSimplex):
        lx = np.log(xv)
        ly = np.log(yv)
        # sum over unordered pairs i < j of squared log-ratio differences
        dx = lx[:, None] - lx[None, :]
        dy = ly[:, None] - ly[None, :]
        iu = np.triu_indices(space.m, k=1)
        s = float(np.sum((dx[iu] - dy[iu]) ** 2))
        return math.sqrt(s / space.m)
    raise DomainError(f"no distance defined for {space}")
