"""Exception hierarchy shared across the package."""


class RandsplitError(Exception):
    """Base class for all package errors."""


class InputError(RandsplitError, ValueError):
    """An argument violates a documented precondition."""


class InvariantError(RandsplitError):
    """A declared invariant of a domain object or result was violated."""


class DecompositionError(RandsplitError):
    """A matrix factorization failed (singular / indefinite input)."""


class SolverError(RandsplitError):
    """An iterative solver did not reach its residual target."""


class DivergenceError(RandsplitError):
    """An iteration left the trust region (norm blow-up)."""


class ConfigError(RandsplitError):
    """Experiment configuration is inconsistent or unusable."""
