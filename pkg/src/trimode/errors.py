"""Exception hierarchy shared by all modules."""


class TrimodeError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(TrimodeError, ValueError):
    """A parameter is outside its documented domain."""


class InvalidStateError(TrimodeError, ValueError):
    """A covariance matrix does not describe a state with the required property."""


class UnsupportedStateError(TrimodeError, ValueError):
    """The state lacks the symmetry a closed-form procedure relies on."""


class NumericalDomainError(TrimodeError, ArithmeticError):
    """A numerical routine was handed an input it cannot process (e.g. a singular matrix)."""


class NoSolutionError(TrimodeError, RuntimeError):
    """An iterative solver did not reach its tolerance.

    The best point found is kept on the exception so callers can inspect it.
    """

    def __init__(self, message, best=None, residual=float("inf")):
        super().__init__(message)
        self.best = best
        self.residual = residual
