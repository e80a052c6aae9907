"""Exception types raised by the solver."""


class AllspeedError(Exception):
    """Base class for all solver errors."""


class ConfigurationError(AllspeedError):
    """Invalid run configuration (unknown key, out-of-range parameter, ...)."""


class DomainError(AllspeedError):
    """State left the physically admissible set (e.g. non-positive density)."""


class PositivityError(AllspeedError):
    """An intermediate state lost positivity; signals a too small relaxation speed."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class VacuumError(AllspeedError):
    """A hydrostatic profile would require non-positive density."""


class SolverError(AllspeedError):
    """The linear solver failed to reach the requested tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
