"""Posterior moment providers: conjugate forms, quadrature grids, and samples.

Every estimator in this package consumes a :class:`MomentSet`; this module
is the only place moments are computed.  Analytic providers (Beta, truncated
normal) are cross-checked against the deterministic quadrature providers in
the test suite, so the two routes are kept deliberately independent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln, ndtr

from .errors import (
    DivergenceWarning,
    DivergentMomentError,
    DomainError,
    EdgeMassError,
    NumericalError,
)

__all__ = [
    "MomentSet",
    "BetaConjugate",
    "TruncatedNormal",
    "Grid1D",
    "Grid2D",
    "MonteCarlo",
    "beta_moments",
    "truncated_normal_moments",
    "grid_moments_1d",
    "grid_moments_2d",
    "mc_moments",
    "posterior_moments",
    "posterior_quadrature",
    "truncated_normal_m1_m2",
]

_JENSEN_TOL = 1e-10
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class MomentSet:
    """Posterior moments E[theta], E[theta^2] and, optionally, E[theta^±k].

    ``k``/``mk``/``mnegk`` are None when the provider did not compute the
    power moments (they are only needed by the scale-mean estimators).
    """

    m1: float
    m2: float
    k: float | None = None
    mk: float | None = None
    mnegk: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.m1) and math.isfinite(self.m2)):
            raise NumericalError(f"non-finite moments m1={self.m1}, m2={self.m2}")
        if self.m2 < self.m1**2 - _JENSEN_TOL * max(1.0, self.m1**2):
            raise NumericalError(f"moments violate E[x^2] >= E[x]^2: m1={self.m1}, m2={self.m2}")
        if self.k is not None:
            if not self.k > 0:
                raise DomainError(f"moment order k must be positive, got {self.k}")
            if self.mk is None or self.mnegk is None:
                raise NumericalError("k given but mk/mnegk missing")
            if not (math.isfinite(self.mk) and math.isfinite(self.mnegk)):
                raise NumericalError(f"non-finite power moments mk={self.mk}, mnegk={self.mnegk}")
            if self.mk <= 0 or self.mnegk <= 0:
                raise NumericalError("power moments must be positive")
            if self.mk * self.mnegk < 1.0 - _JENSEN_TOL:
                raise NumericalError(
                    f"moments violate E[x^k]E[x^-k] >= 1: mk={self.mk}, mnegk={self.mnegk}"
                )

    @property
    def has_power_moments(self) -> bool:
        return self.k is not None


# ---------------------------------------------------------------------------
# posterior models


@dataclass(frozen=True)
class BetaConjugate:
    """Posterior Beta(x+1, n-x+1) for x successes in n trials under a uniform prior."""

    x: int
    n: int

    def __post_init__(self):
        if not (0 <= self.x <= self.n):
            raise DomainError(f"need 0 <= x <= n, got x={self.x}, n={self.n}")


@dataclass(frozen=True)
class TruncatedNormal:
    """N(center, sd^2) truncated to (a, b): the posterior of a normal mean
    under a flat prior on (a, b)."""

    center: float
    sd: float
    a: float
    b: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError(f"sd must be positive, got {self.sd}")
        if not self.a < self.b:
            raise DomainError(f"need a < b, got ({self.a}, {self.b})")


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Unnormalized log density tabulated by quadrature on (lo, hi).

    ``log_density`` must accept a 1-D numpy array of abscissae and return the
    log density elementwise.  ``hard_support`` marks (lo, hi) as the true
    domain edges; when False the bounds are numerical cutoffs of a wider
    domain and the density must have decayed there.
    """

    support: tuple[float, float]
    log_density: Callable[[np.ndarray], np.ndarray]
    nodes: int = 2001
    hard_support: bool = True

    def __post_init__(self):
        lo, hi = self.support
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError(f"invalid support ({lo}, {hi})")
        if self.nodes < 101:
            raise DomainError(f"need at least 101 quadrature nodes, got {self.nodes}")


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Unnormalized 2-D log density on a product of supports.

    ``log_density(u, v)`` receives the two 1-D axis node arrays and must
    return the (len(u), len(v)) matrix of log densities, which lets callers
    exploit separable structure.
    """

    supports: tuple[tuple[float, float], tuple[float, float]]
    log_density: Callable[[np.ndarray, np.ndarray], np.ndarray]
    nodes: int = 121
    hard_support: bool = True

    def __post_init__(self):
        for lo, hi in self.supports:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise DomainError(f"invalid support ({lo}, {hi})")
        if self.nodes < 101:
            raise DomainError(f"need at least 101 quadrature nodes per axis, got {self.nodes}")


@dataclass(frozen=True, eq=False)
class MonteCarlo:
    """Posterior represented by an equally weighted sample."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 1 or arr.size < 2:
            raise DomainError("need a 1-D sample of size >= 2")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("non-finite sample values")


# ---------------------------------------------------------------------------
# quadrature plumbing


@lru_cache(maxsize=None)
def _gl_reference(order: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    x, w = np.polynomial.legendre.leggauss(order)
    return tuple(x), tuple(w)


def composite_gauss_legendre(lo: float, hi: float, nodes: int, order: int = 10):
    """Equal-width composite Gauss-Legendre rule with at least ``nodes`` points."""
    panels = max(1, -(-nodes // order))
    xr, wr = (np.asarray(v) for v in _gl_reference(order))
    width = (hi - lo) / panels
    starts = lo + width * np.arange(panels)
    x = (starts[:, None] + 0.5 * width * (xr[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * width * wr, panels)
    return x, w


def _checked_log_density(ld, what: str) -> np.ndarray:
    ld = np.asarray(ld, dtype=float)
    if np.any(np.isnan(ld)) or np.any(np.isposinf(ld)):
        raise NumericalError(f"{what} produced NaN or +inf log density values")
    return ld


# ---------------------------------------------------------------------------
# moment providers


def beta_moments(x: int, n: int, k: float | None = None) -> MomentSet:
    """Moments of the Beta(x+1, n-x+1) posterior, in closed form.

    E[theta] = (x+1)/(n+2) and E[theta^2] = (x+1)(x+2)/((n+2)(n+3)); the
    power moments use the ratio-of-gamma-functions identity evaluated in
    log-gamma space.  E[theta^-k] only exists for k < x+1.
    """
    if not (0 <= x <= n):
        raise DomainError(f"need 0 <= x <= n, got x={x}, n={n}")
    alpha = x + 1.0
    beta = n - x + 1.0
    m1 = alpha / (n + 2.0)
    m2 = alpha * (alpha + 1.0) / ((n + 2.0) * (n + 3.0))
    if k is None:
        return MomentSet(m1=m1, m2=m2)
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    if k >= alpha:
        raise DivergentMomentError(f"E[theta^-{k}] diverges for Beta({alpha:g}, {beta:g})")
    lg = gammaln
    base = lg(alpha + beta) - lg(alpha)
    mk = math.exp(lg(alpha + k) + base - lg(alpha + beta + k))
    mnegk = math.exp(lg(alpha - k) + base - lg(alpha + beta - k))
    return MomentSet(m1=m1, m2=m2, k=k, mk=mk, mnegk=mnegk)


def truncated_normal_m1_m2(center, sd, a, b):
    """First two moments of N(center, sd^2) truncated to (a, b), array-capable.

    The computation is reflected about the interval midpoint when the center
    sits in the upper half, so both tails are handled with the same accuracy.
    """
    center = np.asarray(center, dtype=float)
    sd = np.asarray(sd, dtype=float)
    mid = 0.5 * (np.asarray(a, dtype=float) + np.asarray(b, dtype=float))
    flip = center > mid
    c = np.where(flip, -center, center)
    lo = np.where(flip, -np.asarray(b, float), a)
    hi = np.where(flip, -np.asarray(a, float), b)

    alpha = (lo - c) / sd
    beta = (hi - c) / sd
    z = ndtr(beta) - ndtr(alpha)
    if np.any(z < 1e-300):
        raise NumericalError("truncated normal mass underflow: interval too far from center")
    pa = np.exp(-0.5 * alpha * alpha) / _SQRT_2PI
    pb = np.exp(-0.5 * beta * beta) / _SQRT_2PI
    h = (pa - pb) / z
    g = (alpha * pa - beta * pb) / z
    m1 = c + sd * h
    var = sd * sd * (1.0 + g - h * h)
    m2 = var + m1 * m1
    m1 = np.where(flip, -m1, m1)
    return m1, m2


def truncated_normal_moments(center: float, sd: float, a: float, b: float) -> MomentSet:
    """MomentSet for a truncated normal posterior (power moments not computed)."""
    TruncatedNormal(center, sd, a, b)  # argument validation
    m1, m2 = truncated_normal_m1_m2(center, sd, a, b)
    return MomentSet(m1=float(m1), m2=float(m2))


def _moments_from_weights(x: np.ndarray, t: np.ndarray, k: float | None) -> MomentSet:
    z = float(t.sum())
    if not (math.isfinite(z) and z > 0):
        raise NumericalError("quadrature mass is zero or non-finite")
    m1 = float(np.dot(t, x)) / z
    m2 = float(np.dot(t, x * x)) / z
    if k is None:
        return MomentSet(m1=m1, m2=m2)
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    if np.any(x <= 0):
        raise DomainError("power moments need a grid on the positive half-line")
    mk = float(np.dot(t, x**k)) / z
    neg = t * x ** (-k)
    # A weighted integrand that keeps growing into the left edge signals a
    # (near-)divergent negative moment; refuse rather than return a grid
    # artefact.
    if neg[0] > 2.0 * neg[1] and neg[0] >= 1e-8 * neg.max():
        raise DivergentMomentError(f"E[theta^-{k}] integrand not integrable at the lower edge")
    mnegk = float(neg.sum()) / z
    return MomentSet(m1=m1, m2=m2, k=k, mk=mk, mnegk=mnegk)


def grid_moments_1d(model: Grid1D, k: float | None = None) -> MomentSet:
    """Moments by composite Gauss-Legendre quadrature of exp(log_density).

    Deterministic for a fixed node count; the density may be unnormalized.
    """
    lo, hi = model.support
    x, w = composite_gauss_legendre(lo, hi, model.nodes)
    ld = _checked_log_density(model.log_density(x), "Grid1D")
    if ld.shape != x.shape:
        raise NumericalError(f"log_density returned shape {ld.shape}, expected {x.shape}")
    peak = float(ld.max())
    if not math.isfinite(peak):
        raise NumericalError("density is zero everywhere on the grid")
    f = np.exp(ld - peak)
    if not model.hard_support:
        ld_ends = _checked_log_density(model.log_density(np.array([lo, hi])), "Grid1D")
        edge = float(np.exp(ld_ends.max() - peak))
        if edge > 1e-12:
            warnings.warn(
                f"density has not decayed at the support cutoff (edge/max = {edge:.2e})",
                DivergenceWarning,
                stacklevel=2,
            )
    return _moments_from_weights(x, w * f, k)


def _grid2d_eval(model: Grid2D):
    """Evaluate a Grid2D model: axis nodes, axis weights, weighted density matrix."""
    (lo1, hi1), (lo2, hi2) = model.supports
    x1, w1 = composite_gauss_legendre(lo1, hi1, model.nodes)
    x2, w2 = composite_gauss_legendre(lo2, hi2, model.nodes)
    ld = _checked_log_density(model.log_density(x1, x2), "Grid2D")
    if ld.shape != (x1.size, x2.size):
        raise NumericalError(f"log_density returned shape {ld.shape}, expected {(x1.size, x2.size)}")
    peak = float(ld.max())
    if not math.isfinite(peak):
        raise NumericalError("density is zero everywhere on the grid")
    t = (w1[:, None] * w2[None, :]) * np.exp(ld - peak)
    z = float(t.sum())
    if not (math.isfinite(z) and z > 0):
        raise NumericalError("quadrature mass is zero or non-finite")
    if not model.hard_support:
        edge = float(t[0, :].sum() + t[-1, :].sum() + t[1:-1, 0].sum() + t[1:-1, -1].sum())
        if edge > 1e-9 * z:
            raise EdgeMassError(
                f"outermost grid cells hold {edge / z:.2e} of the posterior mass (> 1e-9)"
            )
    return x1, x2, t


def grid_moments_2d(model: Grid2D, k: float | None = None) -> tuple[MomentSet, MomentSet]:
    """Per-coordinate marginal moments of a 2-D posterior by tensor-product quadrature."""
    x1, x2, t = _grid2d_eval(model)
    return (
        _moments_from_weights(x1, t.sum(axis=1), k),
        _moments_from_weights(x2, t.sum(axis=0), k),
    )


def mc_moments(samples, k: float | None = None) -> MomentSet:
    """Plug-in sample moments of theta, theta^2 and, if requested, theta^±k."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DomainError("need a 1-D sample of size >= 2")
    if not np.all(np.isfinite(arr)):
        raise NumericalError("non-finite sample values")
    m1 = float(arr.mean())
    m2 = float(np.mean(arr * arr))
    if k is None:
        return MomentSet(m1=m1, m2=m2)
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    if np.any(arr <= 0):
        raise DomainError("negative-power moments need strictly positive samples")
    mk = float(np.mean(arr**k))
    mnegk = float(np.mean(arr ** (-k)))
    return MomentSet(m1=m1, m2=m2, k=k, mk=mk, mnegk=mnegk)


def posterior_moments(model, k: float | None = None):
    """Dispatch a posterior model to its moment provider.

    For :class:`TruncatedNormal` the power moments are never computed (its
    consumers only need E[theta] and E[theta^2]), so ``k`` is ignored there.
    """
    if isinstance(model, BetaConjugate):
        return beta_moments(model.x, model.n, k)
    if isinstance(model, TruncatedNormal):
        return truncated_normal_moments(model.center, model.sd, model.a, model.b)
    if isinstance(model, Grid1D):
        return grid_moments_1d(model, k)
    if isinstance(model, Grid2D):
        return grid_moments_2d(model, k)
    if isinstance(model, MonteCarlo):
        return mc_moments(model.samples, k)
    raise DomainError(f"unknown posterior model {model!r}")


def posterior_quadrature(model, nodes: int = 2001):
    """Abscissae and normalized weights representing a 1-D posterior.

    This is the expectation machinery behind the numeric expected-loss
    minimizer: E[g(theta)] ~= sum_i p_i g(x_i).
    """
    if isinstance(model, MonteCarlo):
        x = model.samples
        return x, np.full(x.shape, 1.0 / x.size)
    if isinstance(model, BetaConjugate):
        alpha = model.x + 1.0
        beta = model.n - model.x + 1.0
        x, w = composite_gauss_legendre(0.0, 1.0, nodes)
        ld = (alpha - 1.0) * np.log(x) + (beta - 1.0) * np.log1p(-x)
        t = w * np.exp(ld - ld.max())
        return x, t / t.sum()
    if isinstance(model, TruncatedNormal):
        x, w = composite_gauss_legendre(model.a, model.b, nodes)
        z = (x - model.center) / model.sd
        t = w * np.exp(-0.5 * (z * z - np.min(z * z)))
        return x, t / t.sum()
    if isinstance(model, Grid1D):
        lo, hi = model.support
        x, w = composite_gauss_legendre(lo, hi, max(nodes, model.nodes))
        ld = _checked_log_density(model.log_density(x), "Grid1D")
        t = w * np.exp(ld - ld.max())
        return x, t / t.sum()
    raise DomainError(f"no 1-D quadrature for posterior model {model!r}")
