"""Deterministic Monte-Carlo harness for the estimator benchmarking studies."""

from .harness import (
    CSV_COLUMNS,
    AggregateStats,
    ExperimentSpec,
    Row,
    SweepResult,
    aggregate,
    grid_stream,
    mse_difference,
    replication_uniforms,
    write_csv,
)
from .studies import (
    BINOMIAL_ESTIMATORS,
    CI_KINDS,
    NORMAL_ESTIMATORS,
    run_binomial_study,
    run_gamma_study,
    run_restricted_normal_study,
    run_study,
    run_weibull_study,
)

__all__ = [
    "AggregateStats",
    "BINOMIAL_ESTIMATORS",
    "CI_KINDS",
    "CSV_COLUMNS",
    "ExperimentSpec",
    "NORMAL_ESTIMATORS",
    "Row",
    "SweepResult",
    "aggregate",
    "grid_stream",
    "mse_difference",
    "replication_uniforms",
    "run_binomial_study",
    "run_gamma_study",
    "run_restricted_normal_study",
    "run_study",
    "run_weibull_study",
    "write_csv",
]
