"""Exception hierarchy for the nearly Hermitian spectral toolkit."""
from typing import Optional


class NearlyHermitianError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(NearlyHermitianError, ValueError):
    """Invalid experiment, ensemble or perturbation configuration."""


class ContractViolation(NearlyHermitianError, ValueError):
    """Input breaks the documented contract of an operation."""


class PreconditionError(NearlyHermitianError, ValueError):
    """A mathematical precondition of a construction does not hold."""


class DomainError(NearlyHermitianError, ValueError):
    """Argument lies outside the domain of an analytic function."""


class SolverError(NearlyHermitianError, RuntimeError):
    """Numerical solver failure."""

    def __init__(self, message: str, matrix_size: Optional[int] = None):
        super().__init__(message)
        self.matrix_size = matrix_size


class ResolventError(SolverError):
    """Shift too close to the spectrum for a reliable resolvent solve."""

    def __init__(
        self,
        message: str,
        matrix_size: Optional[int] = None,
        condition_estimate: Optional[float] = None,
    ):
        super().__init__(message, matrix_size=matrix_size)
        self.condition_estimate = condition_estimate


class ExperimentError(NearlyHermitianError, RuntimeError):
    """Unexpected failure while running an experiment or writing its output."""
