"""Self-contained cross-check suite: closed forms against independent oracles.

Four check families, each pitting an analytic path against a numeric one
that shares no code with it: moment formulas vs quadrature, closed-form
estimators vs brute-force expected-loss minimization, symmetry identities
vs direct evaluation, and the wide-interval limits of the interval
estimator.  Used by the ``verify`` CLI subcommand and by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .estimators import (
    interval_estimate,
    numeric_minimize,
    precautionary_estimate,
    scale_mean,
)
from .losses import (
    BrownLog,
    IntervalSquared,
    Precautionary,
    ScaleFamily,
    ScaleInvariantPrecautionary,
)
from .moments import (
    BetaConjugate,
    Grid1D,
    beta_moments,
    grid_moments_1d,
    grid_moments_2d,
    Grid2D,
    truncated_normal_moments,
)
from .spaces import Interval, PositiveHalfLine, symmetric_counterpart

__all__ = ["CheckResult", "run_checks", "FAMILIES"]

FAMILIES = ("moments", "estimators", "symmetry", "limits")


@dataclass(frozen=True)
class CheckResult:
    family: str
    name: str
    passed: bool
    detail: str


def _beta_log_density(alpha: float, beta: float):
    def ld(x: np.ndarray) -> np.ndarray:
        return (alpha - 1.0) * np.log(x) + (beta - 1.0) * np.log1p(-x)

    return ld


def _lognormal_grid(mu: float, sigma: float, nodes: int = 4001) -> Grid1D:
    # wide sigma makes the support span several decades; the node count must
    # keep each quadrature panel below ~2 linear standard deviations
    lo = math.exp(mu - 9.0 * sigma)
    hi = math.exp(mu + 9.0 * sigma)

    def ld(x: np.ndarray) -> np.ndarray:
        z = (np.log(x) - mu) / sigma
        return -0.5 * z * z - np.log(x)

    return Grid1D(support=(lo, hi), log_density=ld, nodes=nodes, hard_support=False)


def _check_moments() -> list[CheckResult]:
    out = []

    analytic = beta_moments(7, 15, k=2.0)
    grid = grid_moments_1d(Grid1D((0.0, 1.0), _beta_log_density(8.0, 9.0), nodes=2001), k=2.0)
    err = max(
        abs(analytic.m1 - grid.m1),
        abs(analytic.m2 - grid.m2),
        abs(analytic.mk - grid.mk),
        abs(analytic.mnegk - grid.mnegk),
    )
    out.append(CheckResult("moments", "beta vs quadrature", err < 1e-8, f"max abs err {err:.2e}"))

    tn = truncated_normal_moments(1.0, 0.5, -2.0, 2.0)

    def tn_ld(x: np.ndarray) -> np.ndarray:
        return -0.5 * ((x - 1.0) / 0.5) ** 2

    tng = grid_moments_1d(Grid1D((-2.0, 2.0), tn_ld, nodes=4001))
    err = max(abs(tn.m1 - tng.m1), abs(tn.m2 - tng.m2))
    out.append(CheckResult("moments", "truncated normal vs quadrature", err < 1e-9, f"max abs err {err:.2e}"))

    def sep_ld(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        f = _beta_log_density(8.0, 9.0)
        return f(u)[:, None] + f(v)[None, :]

    g1, g2 = grid_moments_2d(Grid2D(((0.0, 1.0), (0.0, 1.0)), sep_ld, nodes=401))
    ref = beta_moments(7, 15)
    err = max(abs(g1.m1 - ref.m1), abs(g1.m2 - ref.m2), abs(g2.m1 - ref.m1), abs(g2.m2 - ref.m2))
    out.append(CheckResult("moments", "separable 2-D vs per-axis", err < 1e-7, f"max abs err {err:.2e}"))

    coarse = grid_moments_1d(Grid1D((0.0, 1.0), _beta_log_density(8.0, 9.0), nodes=1001), k=1.0)
    fine = grid_moments_1d(Grid1D((0.0, 1.0), _beta_log_density(8.0, 9.0), nodes=2001), k=1.0)
    rel = max(
        abs(coarse.m1 - fine.m1) / fine.m1,
        abs(coarse.m2 - fine.m2) / fine.m2,
        abs(coarse.mk - fine.mk) / fine.mk,
        abs(coarse.mnegk - fine.mnegk) / fine.mnegk,
    )
    out.append(CheckResult("moments", "grid refinement self-convergence", rel < 1e-6, f"max rel change {rel:.2e}"))
    return out


def _check_estimators(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    worst = {"scale": 0.0, "precautionary": 0.0, "interval": 0.0}
    for trial in range(20):
        if trial % 2 == 0:
            x = int(rng.integers(3, 13))
            n = int(rng.integers(x + 3, 40))
            k = float(rng.uniform(0.5, min(3.0, x + 0.5)))
            moments = beta_moments(x, n, k=k)
            posterior = BetaConjugate(x, n)
            bracket = (1e-4, 1.0 - 1e-4)
            interval = (0.0, 1.0)
        else:
            mu = float(rng.uniform(-0.3, 1.2))
            sigma = float(rng.uniform(0.2, 0.7))
            k = float(rng.uniform(0.5, 3.0))
            posterior = _lognormal_grid(mu, sigma)
            moments = grid_moments_1d(posterior, k=k)
            # generous but not absurd: every closed-form minimizer sits well inside
            bracket = (0.01, 80.0)
            span = 4.0 * math.sqrt(max(moments.m2 - moments.m1**2, 1e-12))
            interval = (max(1e-6, moments.m1 - span), moments.m1 + span)

        got = scale_mean(moments).point
        ref = numeric_minimize(ScaleFamily(k), posterior, bracket).point
        worst["scale"] = max(worst["scale"], abs(got - ref))

        got = precautionary_estimate(moments).point
        ref = numeric_minimize(Precautionary(), posterior, bracket).point
        worst["precautionary"] = max(worst["precautionary"], abs(got - ref))

        a, b = interval
        got = interval_estimate(moments, a, b).point
        loss = IntervalSquared(a, b)
        lo = max(bracket[0], a + 1e-9 * (b - a))
        hi = min(bracket[1], b - 1e-9 * (b - a))
        ref = numeric_minimize(loss, posterior, (lo, hi)).point
        worst["interval"] = max(worst["interval"], abs(got - ref))

    for name, err in worst.items():
        out.append(
            CheckResult("estimators", f"{name} closed form vs numeric minimizer", err < 1e-6,
                        f"worst abs err {err:.2e} over 20 posteriors")
        )
    return out


def _rel_floor(x: float, y: float) -> float:
    return abs(x - y) / max(1.0, abs(x), abs(y))


def _check_symmetry(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []

    theta = rng.uniform(0.1, 10.0, size=2000)
    d = rng.uniform(0.1, 10.0, size=2000)
    ks = rng.uniform(0.5, 4.0, size=2000)
    worst = 0.0
    for loss_at in (lambda k: ScaleFamily(k), lambda k: ScaleInvariantPrecautionary(), lambda k: BrownLog()):
        for t, dd, k in zip(theta[:700], d[:700], ks[:700]):
            loss = loss_at(float(k))
            worst = max(worst, _rel_floor(loss.evaluate(t, dd), loss.evaluate(t, t * t / dd)))
    out.append(CheckResult("symmetry", "scale symmetry identities", worst < 1e-12, f"worst normalized err {worst:.2e}"))

    space = Interval(-1.0, 3.0)
    loss = IntervalSquared(-1.0, 3.0)
    worst = 0.0
    for _ in range(2000):
        t = float(rng.uniform(-0.9, 2.9))
        d1 = float(rng.uniform(-0.9, 2.9))
        d2 = symmetric_counterpart(space, t, d1)
        worst = max(worst, _rel_floor(loss.evaluate(t, d1), loss.evaluate(t, d2)))
    out.append(CheckResult("symmetry", "interval symmetry via counterpart", worst < 1e-10, f"worst normalized err {worst:.2e}"))

    prec = Precautionary()
    violated = any(
        _rel_floor(prec.evaluate(t, dd), prec.evaluate(2.0 * t, 2.0 * dd)) > 1e-6
        for t, dd in zip(theta[:100], d[:100])
        if abs(t - dd) > 1e-3
    )
    out.append(CheckResult("symmetry", "precautionary loss is not scale invariant", violated,
                           "found a rescaling that changes the loss" if violated else "no violation found"))

    brown = BrownLog()
    non_convex = False
    for _ in range(4000):
        t = float(rng.uniform(0.1, 5.0))
        d1 = float(rng.uniform(0.1, 50.0))
        d2 = float(rng.uniform(0.1, 50.0))
        lam = float(rng.uniform(0.05, 0.95))
        mid = lam * d1 + (1.0 - lam) * d2
        if brown.evaluate(t, mid) > lam * brown.evaluate(t, d1) + (1.0 - lam) * brown.evaluate(t, d2) + 1e-10:
            non_convex = True
            break
    out.append(CheckResult("symmetry", "log-distance loss fails a convexity sweep", non_convex,
                           "found a violating chord" if non_convex else "no violation found"))
    return out


def _check_limits(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst_mean = 0.0
    worst_prec = 0.0
    for _ in range(10):
        mu = float(rng.uniform(-0.5, 1.5))
        sigma = float(rng.uniform(0.15, 0.5))
        moments = grid_moments_1d(_lognormal_grid(mu, sigma))
        wide = interval_estimate(moments, -1e6, 1e6).point
        worst_mean = max(worst_mean, abs(wide - moments.m1))
        positive = interval_estimate(moments, 1e-9, 1e9).point
        worst_prec = max(worst_prec, abs(positive - math.sqrt(moments.m2)) / math.sqrt(moments.m2))
    return [
        CheckResult("limits", "huge symmetric interval recovers the posterior mean",
                    worst_mean < 1e-4, f"worst abs err {worst_mean:.2e}"),
        CheckResult("limits", "huge positive interval recovers sqrt(E[theta^2])",
                    worst_prec < 1e-6, f"worst rel err {worst_prec:.2e}"),
    ]


def run_checks(families=None, seed: int = 20240810) -> list[CheckResult]:
    """Run the requested check families (all by default), deterministically."""
    selected = tuple(families) if families else FAMILIES
    unknown = [f for f in selected if f not in FAMILIES]
    if unknown:
        raise DomainError(f"unknown check families {unknown}, expected subset of {FAMILIES}")
    out: list[CheckResult] = []
    if "moments" in selected:
        out.extend(_check_moments())
    if "estimators" in selected:
        out.extend(_check_estimators(seed))
    if "symmetry" in selected:
        out.extend(_check_symmetry(seed))
    if "limits" in selected:
        out.extend(_check_limits(seed))
    return out
