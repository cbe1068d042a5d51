"""Exception types raised by the cmainj package."""


class CmaError(Exception):
    """Base class for all cmainj errors."""


class InvalidMatrix(CmaError):
    """Matrix input contains non-finite entries or is not usable as a covariance."""


class DecompositionFailure(CmaError):
    """The symmetric eigensolver did not produce a usable factorization."""


class StaleDecomposition(CmaError):
    """A cached eigendecomposition does not match the matrix it is applied for."""


class InvalidDimension(CmaError):
    """Dimension or population size outside the supported range."""


class TooManyInjections(CmaError):
    """More injected candidate slots requested than the population holds."""


class DuplicateMeanShift(CmaError):
    """More than one mean-shift proposal supplied for a single generation."""


class InvalidInjection(CmaError):
    """Injected payload is malformed (non-finite entries, bad repeat count, ...)."""


class InvalidDirection(CmaError):
    """A direction proposal must be a nonzero vector."""


class InvalidFitness(CmaError):
    """A fitness value passed to tell() is not a finite number."""


class AllVariablesFrozen(CmaError):
    """Freezing every coordinate leaves nothing to optimize."""


class InconsistentHistory(CmaError):
    """The adaptive normalizer was queried with an empty or mismatched length record."""


class NoKnownOptimum(CmaError):
    """The objective does not expose a known optimum to perturb."""


class UnknownProblem(CmaError):
    """No benchmark problem registered under the requested name."""


class ConfigError(CmaError):
    """A scenario configuration value is missing, malformed, or inconsistent."""
