"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A computation failed numerically (non-PSD matrix, failed factorization, ...)."""


class SolverStalledError(NumericalError):
    """The QP solver hit its iteration cap before reaching the requested tolerance.

    Carries the best iterate found so far and its residual, so callers can
    inspect or salvage a near-solution.
    """

    def __init__(self, message, best_alpha=None, residual=None):
        super().__init__(message)
        self.best_alpha = best_alpha
        self.residual = residual
