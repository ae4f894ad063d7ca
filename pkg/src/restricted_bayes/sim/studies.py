"""The four replication studies: binomial probability, restricted normal
mean, gamma parameters, and Weibull parameters.

Each study draws its data through inverse CDFs from per-grid-point streams
(see :mod:`.harness`), computes every requested estimator on every
replication, and aggregates MSE / bias / variance plus, for the binomial
study, confidence-interval coverage.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaincinv, ndtri
from scipy.stats import binom

from ..errors import ConfigError, NumericalError, RestrictedBayesError
from ..estimators import interval_point
from ..intervals import ci_delta_iq, ci_normal, ci_wilson_ac
from ..moments import truncated_normal_m1_m2
from . import fit2d
from .harness import (
    ExperimentSpec,
    Row,
    SweepResult,
    aggregate,
    map_grid,
    mse_difference,
    replication_uniforms,
)

__all__ = [
    "run_binomial_study",
    "run_restricted_normal_study",
    "run_gamma_study",
    "run_weibull_study",
    "run_study",
    "BINOMIAL_ESTIMATORS",
    "NORMAL_ESTIMATORS",
    "CI_KINDS",
]

BINOMIAL_ESTIMATORS = ("p_q", "p_AC", "p_iq")
NORMAL_ESTIMATORS = ("J", "U1", "U2", "U2prime")
CI_KINDS = ("normal_p_q", "normal_p_iq", "normal_p_AC", "wilson_ac", "delta_iq")
_CI_CENTER = {
    "normal_p_q": "p_q",
    "normal_p_iq": "p_iq",
    "normal_p_AC": "p_AC",
    "wilson_ac": "p_AC",
    "delta_iq": "p_iq",
}
_MAX_ABORT_FRACTION = 1e-3


def _check_tags(tags, allowed, what: str) -> None:
    unknown = [t for t in tags if t not in allowed]
    if unknown:
        raise ConfigError(f"unknown {what} {unknown}, expected subset of {allowed}")


def _stat_row(theta1, theta2, tag, agg, k=None) -> Row:
    return Row(
        param1=theta1,
        param2=theta2,
        estimator=tag,
        k=k,
        mse=agg.mse,
        bias=agg.bias,
        variance=agg.variance,
        mc_se=agg.mc_se,
    )


# ---------------------------------------------------------------------------
# binomial probability


def _binomial_estimator_tables(n: int) -> dict[str, np.ndarray]:
    xs = np.arange(n + 1, dtype=float)
    ratio = ((n - xs + 1.0) * (n - xs + 2.0)) / ((xs + 1.0) * (xs + 2.0))
    return {
        "p_q": (xs + 1.0) / (n + 2.0),
        "p_AC": (xs + 2.0) / (n + 4.0),
        "p_iq": 1.0 / (1.0 + np.sqrt(ratio)),
    }


def _binomial_task(args):
    spec, g = args
    theta = float(spec.grid[g])
    n = spec.n
    level = spec.extras.get("level", 0.95)
    ci_kinds = tuple(spec.extras.get("ci_kinds", ()))
    tables = _binomial_estimator_tables(n)

    u = replication_uniforms(spec.seed, g, spec.reps, 1)[:, 0]
    cdf = np.cumsum(binom.pmf(np.arange(n + 1), n, theta))
    x = np.minimum(np.searchsorted(cdf, u, side="left"), n)
    counts = np.bincount(x, minlength=n + 1)

    rows: list[Row] = []
    estimates: dict[str, np.ndarray] = {}
    for tag in spec.estimators:
        values = tables[tag][x]
        rows.append(_stat_row(theta, None, tag, aggregate(values, theta)))
        estimates[tag] = values

    for kind in ci_kinds:
        if kind.startswith("normal_"):
            center = _CI_CENTER[kind]
            covered = np.array(
                [ci_normal(tables[center][xv], n, level).covers(theta) for xv in range(n + 1)]
            )
        elif kind == "wilson_ac":
            covered = np.array([ci_wilson_ac(xv, n).covers(theta) for xv in range(n + 1)])
        else:
            covered = np.array([ci_delta_iq(xv, n).covers(theta) for xv in range(n + 1)])
        coverage = float(counts[covered].sum()) / spec.reps
        rows.append(
            Row(
                param1=theta,
                param2=None,
                estimator=_CI_CENTER[kind],
                coverage_kind=kind,
                coverage=coverage,
            )
        )
    return g, rows, estimates, 0


def run_binomial_study(spec: ExperimentSpec, workers: int = 1, keep_estimates: bool = False) -> SweepResult:
    """Estimator MSE sweep and CI coverage for a binomial proportion.

    Replications draw a count x ~ Bin(n, theta) per grid value; estimators
    are the posterior mean (x+1)/(n+2), the add-two estimate (x+2)/(n+4),
    and the interval-symmetric closed form.
    """
    if spec.study != "binomial":
        raise ConfigError(f"spec is for study {spec.study!r}")
    _check_tags(spec.estimators, BINOMIAL_ESTIMATORS, "estimator tags")
    _check_tags(spec.extras.get("ci_kinds", ()), CI_KINDS, "CI kinds")
    for theta in spec.grid:
        if not 0.0 < float(theta) < 1.0:
            raise ConfigError(f"grid value {theta} outside (0, 1)")
    return _assemble(spec, _binomial_task, workers, keep_estimates)


# ---------------------------------------------------------------------------
# restricted normal mean


def _normal_task(args):
    spec, g = args
    mu = float(spec.grid[g])
    n = spec.n
    sigma = math.sqrt(spec.extras.get("sigma2", 4.0))
    a = float(spec.extras["a"])

    u = replication_uniforms(spec.seed, g, spec.reps, n)
    xbar = (mu + sigma * ndtri(u)).mean(axis=1)
    m1, m2 = truncated_normal_m1_m2(xbar, sigma / math.sqrt(n), -a, a)

    estimates: dict[str, np.ndarray] = {}
    for tag in spec.estimators:
        if tag == "J":
            estimates[tag] = xbar
        elif tag == "U1":
            estimates[tag] = np.asarray(m1)
        elif tag == "U2":
            estimates[tag] = interval_point(m1, m2, -a, a)
        else:  # U2prime: same posterior, wider loss interval
            estimates[tag] = interval_point(m1, m2, -1.25 * a, 1.25 * a)
    rows = [_stat_row(mu, None, tag, aggregate(estimates[tag], mu)) for tag in spec.estimators]
    return g, rows, estimates, 0


def run_restricted_normal_study(spec: ExperimentSpec, workers: int = 1, keep_estimates: bool = False) -> SweepResult:
    """Normal-mean estimation with the parameter known to lie in (-a, a).

    J is the sample mean; U1 the mean of the normal posterior truncated to
    (-a, a); U2 the interval-loss Bayes estimate from the same truncated
    posterior; U2prime the same estimate with the loss interval widened by
    25% (the prior, hence the posterior, is unchanged).
    """
    if spec.study != "normal":
        raise ConfigError(f"spec is for study {spec.study!r}")
    _check_tags(spec.estimators, NORMAL_ESTIMATORS, "estimator tags")
    if "a" not in spec.extras:
        raise ConfigError("normal study needs extras['a']")
    a = float(spec.extras["a"])
    if a <= 0:
        raise ConfigError(f"interval half-width a must be positive, got {a}")
    for mu in spec.grid:
        if not -a < float(mu) < a:
            raise ConfigError(f"grid value {mu} outside (-{a}, {a})")
    return _assemble(spec, _normal_task, workers, keep_estimates)


# ---------------------------------------------------------------------------
# gamma parameters


def _gamma_task(args):
    spec, g = args
    shape_true, scale_true = (float(p) for p in spec.grid[g])
    n = spec.n
    reps = spec.reps
    nodes = spec.extras.get("nodes", 120)
    eps = spec.extras.get("prior_eps", fit2d.PRIOR_EPS)

    u = replication_uniforms(spec.seed, g, reps, n)
    data = scale_true * gammaincinv(shape_true, u)
    s_log = np.log(data).sum(axis=1)
    s_x = data.sum(axis=1)
    mode_u, mode_v, sd_u, sd_v, ok = fit2d.gamma_laplace(s_log, s_x, n, eps)

    want_pm = "postmean" in spec.estimators
    want_pc = "precautionary" in spec.estimators
    est = {
        tag: np.full(reps, np.nan)
        for tag in (
            (["alpha1_postmean", "alpha2_postmean"] if want_pm else [])
            + (["alpha1_precautionary", "alpha2_precautionary"] if want_pc else [])
        )
    }
    aborted = 0
    for r in range(reps):
        if not ok[r]:
            aborted += 1
            continue
        try:
            d1, d2 = fit2d.marginal_moments_2d(
                fit2d.gamma_log_density(s_log[r], s_x[r], n, eps),
                (mode_u[r], mode_v[r]),
                (sd_u[r], sd_v[r]),
                nodes,
            )
        except RestrictedBayesError:
            aborted += 1
            continue
        if want_pm:
            est["alpha1_postmean"][r] = d1["m1"]
            est["alpha2_postmean"][r] = d2["m1"]
        if want_pc:
            est["alpha1_precautionary"][r] = math.sqrt(d1["m2"])
            est["alpha2_precautionary"][r] = math.sqrt(d2["m2"])

    valid = np.ones(reps, dtype=bool)
    for arr in est.values():
        valid &= np.isfinite(arr)
    rows = []
    for tag, arr in est.items():
        truth = shape_true if tag.startswith("alpha1") else scale_true
        rows.append(_stat_row(shape_true, scale_true, tag, aggregate(arr[valid], truth)))
    if want_pm and want_pc:
        for i, truth in (("1", shape_true), ("2", scale_true)):
            diff, se = mse_difference(
                est[f"alpha{i}_postmean"][valid], est[f"alpha{i}_precautionary"][valid], truth
            )
            rows.append(
                Row(param1=shape_true, param2=scale_true, estimator=f"alpha{i}_msediff",
                    mse=diff, mc_se=se)
            )
    return g, rows, est, aborted


def run_gamma_study(spec: ExperimentSpec, workers: int = 1, keep_estimates: bool = False) -> SweepResult:
    """Joint estimation of gamma shape and scale at small n.

    Compares the posterior-mean pair against the conservative pair
    sqrt(E[alpha_i^2]) under the same weakly informative priors, reporting
    per-parameter stats plus the paired MSE difference (mean minus
    conservative).
    """
    if spec.study != "gamma":
        raise ConfigError(f"spec is for study {spec.study!r}")
    _check_tags(spec.estimators, ("postmean", "precautionary"), "estimator families")
    for p in spec.grid:
        a1, a2 = (float(v) for v in p)
        if not (0.0 < a1 < 10.0 and 0.0 < a2 < 10.0):
            raise ConfigError(f"grid point {p} outside (0, 10)^2")
    return _assemble(spec, _gamma_task, workers, keep_estimates)


# ---------------------------------------------------------------------------
# Weibull parameters


def _weibull_task(args):
    spec, g = args
    # grid points are (lambda, nu) = (shape, scale)
    shape_true, scale_true = (float(p) for p in spec.grid[g])
    n = spec.n
    reps = spec.reps
    nodes = spec.extras.get("nodes", 120)
    eps = spec.extras.get("prior_eps", fit2d.PRIOR_EPS)
    k_list = tuple(spec.extras.get("k_list", (1, 2, 3, 4)))

    u = replication_uniforms(spec.seed, g, reps, n)
    data = scale_true * (-np.log1p(-u)) ** (1.0 / shape_true)
    lt = np.log(data)
    mode_u, mode_v, sd_u, sd_v, ok = fit2d.weibull_laplace(lt, eps)

    want_pm = "postmean" in spec.estimators
    want_k = "scale_k" in spec.estimators
    tags: list[tuple[str, str, float | None]] = []  # (tag, coord, k); coord "1" = shape axis
    if want_pm:
        tags += [("lambda_postmean", "1", None), ("nu_postmean", "2", None)]
    if want_k:
        for k in k_list:
            tags += [(f"lambda_k{k}", "1", float(k)), (f"nu_k{k}", "2", float(k))]
    est = {tag: np.full(reps, np.nan) for tag, _, _ in tags}

    aborted = 0
    for r in range(reps):
        if not ok[r]:
            aborted += 1
            continue
        try:
            d_shape, d_scale = fit2d.marginal_moments_2d(
                fit2d.weibull_log_density(lt[r], eps),
                (mode_u[r], mode_v[r]),
                (sd_u[r], sd_v[r]),
                nodes,
                k_values=k_list if want_k else (),
            )
        except RestrictedBayesError:
            aborted += 1
            continue
        for tag, coord, k in tags:
            d = d_shape if coord == "1" else d_scale
            if k is None:
                est[tag][r] = d["m1"]
            else:
                est[tag][r] = (d[("mk", k)] / d[("mnegk", k)]) ** (1.0 / (2.0 * k))

    valid = np.ones(reps, dtype=bool)
    for arr in est.values():
        valid &= np.isfinite(arr)

    nu_factor = scale_true ** (-shape_true)  # reporting convention: nu-MSE scaled by 1/nu^lambda
    rows = []
    for tag, coord, k in tags:
        truth = shape_true if tag.startswith("lambda") else scale_true
        agg = aggregate(est[tag][valid], truth)
        rows.append(_stat_row(shape_true, scale_true, tag, agg, k=k))
        if tag.startswith("nu"):
            rows.append(
                Row(param1=shape_true, param2=scale_true, estimator=f"{tag}_scaled", k=k,
                    mse=agg.mse * nu_factor, mc_se=agg.mc_se * nu_factor)
            )
    if want_pm and want_k:
        for k in k_list:
            for name, truth, factor in (
                ("lambda", shape_true, 1.0),
                ("nu", scale_true, nu_factor),
            ):
                pm = est[f"{name}_postmean"][valid]
                ke = est[f"{name}_k{k}"][valid]
                diff, se = mse_difference(pm, ke, truth)
                rows.append(
                    Row(param1=shape_true, param2=scale_true, estimator=f"{name}_msediff_k{k}",
                        k=float(k), mse=diff * factor, mc_se=se * factor)
                )
    return g, rows, est, aborted


def run_weibull_study(spec: ExperimentSpec, workers: int = 1, keep_estimates: bool = False) -> SweepResult:
    """Joint estimation of Weibull shape (lambda) and scale (nu) at small n.

    Compares posterior means against the ratio-loss estimators
    (E[.^k]/E[.^-k])^(1/2k) for each requested k.  Scale-parameter MSEs are
    additionally reported multiplied by 1/nu^lambda ("_scaled" rows), the
    reporting convention that puts different scales on a common footing.
    """
    if spec.study != "weibull":
        raise ConfigError(f"spec is for study {spec.study!r}")
    _check_tags(spec.estimators, ("postmean", "scale_k"), "estimator families")
    k_list = tuple(spec.extras.get("k_list", (1, 2, 3, 4)))
    _check_tags(k_list, (1, 2, 3, 4), "loss orders")
    for p in spec.grid:
        lam, nu = (float(v) for v in p)
        if not (lam > 0 and nu > 0):
            raise ConfigError(f"grid point {p} must be strictly positive")
    return _assemble(spec, _weibull_task, workers, keep_estimates)


# ---------------------------------------------------------------------------


def _assemble(spec: ExperimentSpec, task, workers: int, keep_estimates: bool) -> SweepResult:
    results = map_grid(task, [(spec, g) for g in range(len(spec.grid))], workers)
    rows: list[Row] = []
    estimates: dict = {}
    aborted = 0
    for g, grid_rows, grid_estimates, grid_aborted in sorted(results, key=lambda r: r[0]):
        rows.extend(grid_rows)
        aborted += grid_aborted
        if keep_estimates:
            for tag, arr in grid_estimates.items():
                estimates[(g, tag)] = arr
    total = spec.reps * len(spec.grid)
    if aborted > _MAX_ABORT_FRACTION * total:
        raise NumericalError(f"{aborted} of {total} replications aborted (> {_MAX_ABORT_FRACTION:.1%})")
    return SweepResult(
        study=spec.study,
        n=spec.n,
        reps=spec.reps,
        seed=spec.seed,
        rows=rows,
        estimates=estimates,
        aborted=aborted,
    )


def run_study(spec: ExperimentSpec, workers: int = 1, keep_estimates: bool = False) -> SweepResult:
    """Dispatch on ``spec.study``."""
    runner = {
        "binomial": run_binomial_study,
        "normal": run_restricted_normal_study,
        "gamma": run_gamma_study,
        "weibull": run_weibull_study,
    }[spec.study]
    return runner(spec, workers=workers, keep_estimates=keep_estimates)
