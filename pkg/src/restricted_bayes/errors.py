"""Exception types shared across the package."""


class RestrictedBayesError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RestrictedBayesError):
    """An input point lies on or outside the boundary of its parameter space."""


class DimensionError(RestrictedBayesError):
    """Vector arguments have incompatible lengths."""


class NumericalError(RestrictedBayesError):
    """A computation lost too much precision or produced a non-finite value."""


class DivergentMomentError(RestrictedBayesError):
    """A requested posterior moment does not exist (non-integrable)."""


class MissingMomentError(RestrictedBayesError):
    """An estimator needs a moment that was not computed for this posterior."""


class BracketError(RestrictedBayesError):
    """A scalar minimizer found its optimum pinned to the bracket boundary."""


class ConfigError(RestrictedBayesError):
    """An experiment or CLI configuration is invalid."""


class EdgeMassError(NumericalError):
    """A quadrature grid leaves non-negligible posterior mass in its outermost cells."""


class DivergenceWarning(RuntimeWarning):
    """A density has not decayed to negligible size at a numerical cutoff."""
