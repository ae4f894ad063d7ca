"""Replication engine plumbing: specs, RNG streams, aggregation, CSV output.

Determinism contract: every random draw in a study is a pure function of
(seed, grid_index, replication_index).  Each grid point owns a counter-based
stream keyed by (seed, grid_index); replication r consumes row r of a
pre-shaped uniform matrix, and all transformations to model draws go through
inverse CDFs so the consumption pattern is fixed.  Aggregation uses exactly
rounded summation, so results do not depend on worker scheduling or count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigError

__all__ = [
    "ExperimentSpec",
    "AggregateStats",
    "Row",
    "SweepResult",
    "aggregate",
    "mse_difference",
    "grid_stream",
    "replication_uniforms",
    "write_csv",
    "CSV_COLUMNS",
]

STUDIES = ("binomial", "normal", "gamma", "weibull")

CSV_COLUMNS = (
    "study",
    "n",
    "reps",
    "seed",
    "param1",
    "param2",
    "estimator",
    "k",
    "mse",
    "bias",
    "variance",
    "mc_se",
    "coverage_kind",
    "coverage",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one simulation sweep.

    ``grid`` holds scalar true parameters for the one-parameter studies and
    (param1, param2) pairs for the two-parameter ones.  ``extras`` carries
    study-specific settings (sigma2, a, ci_kinds, k_list, nodes, ...).
    The seed plus the spec fully determine every draw.
    """

    study: str
    n: int
    reps: int
    grid: tuple
    estimators: tuple[str, ...]
    seed: int
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ConfigError(f"unknown study {self.study!r}, expected one of {STUDIES}")
        if self.n < 1:
            raise ConfigError(f"sample size must be positive, got {self.n}")
        if self.reps < 100:
            raise ConfigError(f"need at least 100 replications, got {self.reps}")
        if not self.grid:
            raise ConfigError("grid must be non-empty")
        if not self.estimators:
            raise ConfigError("need at least one estimator tag")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))


@dataclass(frozen=True)
class AggregateStats:
    """MSE, bias, variance and the Monte-Carlo standard error of the MSE."""

    mse: float
    bias: float
    variance: float
    mc_se: float


def aggregate(replication_estimates: Iterable[float], theta_true: float) -> AggregateStats:
    """Aggregate a stream of point estimates against the true parameter.

    MSE is the mean squared error, bias the mean error, and variance the
    population identity MSE - bias^2, all on the same replication set.
    Sums are exactly rounded (math.fsum), so any ordering or chunking of the
    same stream yields bit-identical results.
    """
    err = np.asarray(replication_estimates, dtype=float) - theta_true
    n = err.size
    if n < 2:
        raise ConfigError("need at least 2 replication estimates")
    sq = err * err
    mse = math.fsum(sq.tolist()) / n
    bias = math.fsum(err.tolist()) / n
    variance = mse - bias * bias
    dev = sq - mse
    mc_se = math.sqrt(math.fsum((dev * dev).tolist()) / (n - 1)) / math.sqrt(n)
    return AggregateStats(mse=mse, bias=bias, variance=variance, mc_se=mc_se)


def mse_difference(estimates_a, estimates_b, theta_true: float) -> tuple[float, float]:
    """Paired MSE difference (a minus b) and its Monte-Carlo standard error.

    Pairing uses the fact that both estimators were computed on the same
    replications, which makes ordering checks far sharper than comparing the
    two MSEs with independent error bars.
    """
    ea = np.asarray(estimates_a, dtype=float) - theta_true
    eb = np.asarray(estimates_b, dtype=float) - theta_true
    if ea.shape != eb.shape:
        raise ConfigError("paired estimate streams must have equal length")
    d = ea * ea - eb * eb
    n = d.size
    diff = math.fsum(d.tolist()) / n
    dev = d - diff
    se = math.sqrt(math.fsum((dev * dev).tolist()) / (n - 1)) / math.sqrt(n)
    return diff, se


def grid_stream(seed: int, grid_index: int) -> np.random.Generator:
    """Counter-based stream owned by one grid point of one experiment."""
    key = np.array([seed, grid_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def replication_uniforms(seed: int, grid_index: int, reps: int, per_rep: int) -> np.ndarray:
    """(reps, per_rep) uniforms; row r is replication r's entire budget."""
    return grid_stream(seed, grid_index).random((reps, per_rep))


@dataclass(frozen=True)
class Row:
    """One output record: either estimator statistics or a coverage entry."""

    param1: float
    param2: float | None
    estimator: str
    k: float | None = None
    mse: float | None = None
    bias: float | None = None
    variance: float | None = None
    mc_se: float | None = None
    coverage_kind: str | None = None
    coverage: float | None = None


@dataclass
class SweepResult:
    study: str
    n: int
    reps: int
    seed: int
    rows: list[Row]
    estimates: dict = field(default_factory=dict)  # (grid_index, estimator) -> ndarray
    aborted: int = 0

    def stat_rows(self) -> list[Row]:
        return [r for r in self.rows if r.coverage_kind is None]

    def coverage_rows(self) -> list[Row]:
        return [r for r in self.rows if r.coverage_kind is not None]

    def find(self, estimator: str, param1: float, param2: float | None = None,
             coverage_kind: str | None = None) -> Row:
        for r in self.rows:
            if (
                r.estimator == estimator
                and r.coverage_kind == coverage_kind
                and math.isclose(r.param1, param1, rel_tol=0.0, abs_tol=1e-12)
                and (
                    (r.param2 is None and param2 is None)
                    or (r.param2 is not None and param2 is not None
                        and math.isclose(r.param2, param2, rel_tol=0.0, abs_tol=1e-12))
                )
            ):
                return r
        raise KeyError(f"no row for estimator={estimator}, params=({param1}, {param2}), kind={coverage_kind}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17e")


def write_csv(result: SweepResult, path, meta_lines: Sequence[str] = ()) -> None:
    """Write a sweep to CSV: '#' metadata lines, a header, one row per record."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in meta_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in result.rows:
            fields = (
                result.study,
                result.n,
                result.reps,
                result.seed,
                r.param1,
                r.param2,
                r.estimator,
                r.k,
                r.mse,
                r.bias,
                r.variance,
                r.mc_se,
                r.coverage_kind,
                r.coverage,
            )
            fh.write(",".join(_fmt(f) for f in fields) + "\n")


def map_grid(fn, tasks: Sequence, workers: int):
    """Run one task per grid point, serially or in a process pool.

    Task order in the returned list always matches the input order, so the
    worker count cannot influence assembled results.
    """
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
