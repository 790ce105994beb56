"""Exception hierarchy for BoltzBesov.

Every error a caller is expected to handle derives from ``BoltzBesovError``.
The CLI maps the families below onto its exit codes.
"""

from typing import Any, Optional


class BoltzBesovError(Exception):
    """Base class for all library errors."""


class ConfigurationError(BoltzBesovError):
    """Invalid lattice, grid, kernel or run configuration."""


class ArgumentError(BoltzBesovError, ValueError):
    """Malformed operation arguments (mismatched lattices, empty trajectories...)."""


class DomainError(BoltzBesovError, ValueError):
    """Input outside the mathematical domain of a function."""


class RangeError(BoltzBesovError, IndexError):
    """Index outside the resolved dyadic range."""


class BudgetExceededError(BoltzBesovError):
    """Quadrature sweep would exceed the configured operation budget."""


class PreconditionError(BoltzBesovError):
    """An estimate was requested outside the parameter regime where it applies."""


class NumericalError(BoltzBesovError):
    """Ill-conditioned linear algebra."""

    def __init__(self, message: str, condition_number: Optional[float] = None):
        super().__init__(message)
        self.condition_number = condition_number


class NumericalAbort(BoltzBesovError):
    """Non-finite values detected while stepping."""

    def __init__(self, message: str, substep: str, step_index: Optional[int] = None):
        super().__init__(message)
        self.substep = substep
        self.step_index = step_index


class ConvergenceError(NumericalAbort):
    """Inner fixed-point iteration failed to converge."""

    def __init__(self, message: str, iterate_norms: list[float]):
        super().__init__(message, substep="collision")
        self.iterate_norms = iterate_norms


class ContractionError(BoltzBesovError):
    """Picard iteration stopped contracting."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report
