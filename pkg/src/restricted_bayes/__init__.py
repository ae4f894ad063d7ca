"""Loss functions on restricted parameter spaces and their Bayes estimators.

The package provides: the loss catalog and symmetry utilities
(:mod:`~restricted_bayes.losses`, :mod:`~restricted_bayes.spaces`), posterior
moment providers (:mod:`~restricted_bayes.moments`), closed-form Bayes
estimators with a numeric oracle (:mod:`~restricted_bayes.estimators`),
binomial confidence intervals (:mod:`~restricted_bayes.intervals`), and a
deterministic Monte-Carlo benchmarking harness (:mod:`~restricted_bayes.sim`).
"""

from . import errors, estimators, intervals, losses, moments, sim, spaces
from .errors import RestrictedBayesError

__version__ = "0.1.0"

__all__ = [
    "errors",
    "estimators",
    "intervals",
    "losses",
    "moments",
    "sim",
    "spaces",
    "RestrictedBayesError",
    "__version__",
]
