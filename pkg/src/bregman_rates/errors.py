"""Exception hierarchy for bregman_rates."""


class BregmanRatesError(Exception):
    """Base exception for all bregman_rates errors."""

    pass


# Linear algebra


class InvalidOperator(BregmanRatesError):
    """Raised when an operator matrix cannot be factorized."""

    pass


class DimensionError(BregmanRatesError):
    """Raised when vector and operator dimensions do not match."""

    pass


class InvalidExponent(BregmanRatesError):
    """Raised when a spectral exponent is outside its admissible interval."""

    pass


# Regularisers


class NotSingleValued(BregmanRatesError):
    """Raised when a subgradient is requested from a set-valued subdifferential."""

    pass


class OutOfDomain(BregmanRatesError):
    """Raised when a dual element lies outside the domain of the conjugate."""

    pass


class Unsupported(BregmanRatesError):
    """Raised when a regulariser does not support the requested operation."""

    pass


class SubgradientMismatch(BregmanRatesError):
    """Raised when a supplied dual element is not a subgradient at the point."""

    pass


# Solver


class InvalidAlpha(BregmanRatesError):
    """Raised when the regularisation parameter is not positive."""

    pass


class IterationLimit(BregmanRatesError):
    """Raised when the solver stops before meeting its residual target."""

    pass


# Sources


class InvalidNoise(BregmanRatesError):
    """Raised when the requested noise level is not positive."""

    pass


# Rate harness


class InadmissibleNu(BregmanRatesError, ValueError):
    """Raised when a source exponent is not admissible for a regime."""

    pass


class NonPositiveError(BregmanRatesError):
    """Raised when a log-log fit meets an error value that is not positive."""

    pass


class FitError(BregmanRatesError):
    """Raised when a slope fit has too few points."""

    pass
