"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """Argument outside the supported domain."""


class CapacityError(InvalidParameterError):
    """Problem too large for dense statevector / matrix treatment."""


class ContractViolation(ValueError):
    """Input breaks a structural precondition (e.g. a non-symmetric matrix)."""


class InsufficientDataError(ValueError):
    """Not enough usable points for a fit."""


class OptimizationFailure(RuntimeError):
    """Every optimizer restart failed."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])
