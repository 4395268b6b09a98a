"""Exception types shared across the solver modules."""


class ParameterError(ValueError):
    """Raised when an input fails domain validation."""


class NoFeasibleDeviationError(ParameterError):
    """Raised when the budget grid leaves the irresponsible developer no move."""


class ConvergenceError(RuntimeError):
    """Raised when a fixed-point iteration exhausts its budget.

    Carries the last residual so callers can report how far off it was.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
