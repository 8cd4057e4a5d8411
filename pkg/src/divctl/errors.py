"""Exception types raised across the library."""


class DivctlError(Exception):
    """Base class for all library-specific errors."""


class ConfigError(DivctlError):
    """A run configuration is malformed; the message names the offending key."""


class NoBracket(DivctlError):
    """Root finding was started on an interval without a sign change."""


class MaxIterExceeded(DivctlError):
    """An iterative routine hit its iteration budget before converging."""


class TargetUnreachable(DivctlError):
    """Monotone inversion could not bracket the target below the expansion ceiling."""


class QuadratureFailure(DivctlError):
    """Numerical integration did not reach the requested accuracy."""


class RegimeMismatch(DivctlError):
    """An operation requires a model regime (e.g. zero return drift) that does not hold."""


class RootIsolationFailure(DivctlError):
    """Denominator roots could not be isolated (clustered or missing real root)."""


class NumericalCancellation(DivctlError):
    """Imaginary parts of conjugate-pair sums failed to cancel to tolerance."""


class ParameterPole(DivctlError):
    """A confluent hypergeometric parameter sits on a pole (non-positive integer b)."""


class NonConvergence(DivctlError):
    """A series evaluation did not converge within its term budget."""


class BranchDomain(DivctlError):
    """Argument outside the principal branch of the requested function."""


class FlatProfile(DivctlError):
    """Empirical barrier profile shows no statistically significant optimum."""
