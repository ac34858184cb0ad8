"""Exception types shared across the package."""


class DcSmoothError(Exception):
    """Base class for every error this package raises on purpose."""


class ParameterError(DcSmoothError, ValueError):
    """An argument is outside its documented range."""


class DomainError(DcSmoothError, ValueError):
    """A smoothing parameter lies outside the range where the operation is defined."""


class LineSearchFailure(DcSmoothError, RuntimeError):
    """Backtracking exhausted its shrink budget.

    Signals a violated descent assumption or a bad gradient; the caller
    should treat the current solve as failed rather than loop forever.
    """


class NumericalFailure(DcSmoothError, RuntimeError):
    """A non-finite value or gradient showed up during a solve."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class OracleError(DcSmoothError, RuntimeError):
    """A brute-force verifier could not certify its own answer."""
