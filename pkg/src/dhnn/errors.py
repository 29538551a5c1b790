"""Exception hierarchy shared by every module in the package."""


class DHNNError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(DHNNError, ValueError):
    """An argument is outside the documented domain."""


class NumericalFailure(DHNNError, ArithmeticError):
    """A computation produced non-finite values."""


class FactorizationError(DHNNError, ArithmeticError):
    """A Cholesky factorization met a non-positive pivot."""


class SolverFailure(DHNNError, ArithmeticError):
    """The linear solve could not produce a usable solution.

    ``diagnostics`` carries whatever conditioning information was gathered
    before giving up.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UnsupportedOperation(DHNNError):
    """The requested operation needs data the object does not carry."""


class ConfigError(DHNNError, ValueError):
    """An experiment configuration could not be parsed or validated."""
