"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NonConvergenceError(ArithmeticError):
    """A quadrature or series failed to reach the requested tolerance.

    The last two partial results are kept so callers can judge how far off
    the computation was.
    """

    def __init__(self, message, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous


class BracketError(RuntimeError):
    """A root finder could not establish a sign change on its interval."""
