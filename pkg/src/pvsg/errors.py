"""Exception types shared across the simulator."""


class PvsgError(Exception):
    """Base class for all package errors."""


class DomainError(PvsgError, ValueError):
    """Input outside the physically meaningful domain of an operation."""


class SolverError(PvsgError):
    """An iterative solve failed to converge.

    Carries the last residual so callers can log diagnostics.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EstimationError(PvsgError):
    """MPP-voltage estimation produced no candidate inside a valid segment."""


class InstabilityError(PvsgError):
    """A simulated state left its stability envelope.

    Carries the simulation time and a snapshot of the offending state.
    """

    def __init__(self, message, t=None, snapshot=None):
        super().__init__(message)
        self.t = t
        self.snapshot = snapshot


class ConfigError(PvsgError):
    """Malformed scenario configuration; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
