"""Exception and warning types raised by the lab."""


class LabError(Exception):
    """Base class; ``operation`` names the routine that failed."""

    def __init__(self, message, operation=None):
        self.operation = operation
        if operation:
            message = f"{operation}: {message}"
        super().__init__(message)


class NonConvergence(LabError):
    def __init__(self, message, operation=None, estimate=None, error=None):
        super().__init__(message, operation)
        self.estimate = estimate
        self.error = error


class SlowConvergence(NonConvergence):
    pass


class NotHermitian(LabError):
    pass


class DomainError(LabError, ValueError):
    pass


class NotIntegrable(LabError, ValueError):
    pass


class BoundaryRoot(LabError):
    pass


class WindingAmbiguous(LabError):
    pass


class ConstructionFailed(LabError):
    pass


class HypothesisFailed(LabError):
    pass


class UnsupportedForm(LabError, NotImplementedError):
    pass


class ConfigError(LabError, ValueError):
    """Invalid experiment configuration (CLI exit status 2)."""


class NumericalDiagnostic(UserWarning):
    """Soft numerical issue: clipped negative eigenvalue, empty region, ..."""


class EmptyRegion(NumericalDiagnostic):
    """A query region contained no sample point."""
