"""Exception hierarchy shared by all modules."""


class SpdSimError(Exception):
    """Base class for errors raised by spdsim."""


class ParameterError(SpdSimError, ValueError):
    """An argument is outside its documented range."""


class DomainError(SpdSimError, ValueError):
    """The input matrix does not satisfy an operation's mathematical precondition."""


class NumericalError(SpdSimError, ArithmeticError):
    """A numerical routine failed (non-convergence, breakdown, degeneracy)."""


class ConsistencyError(SpdSimError, RuntimeError):
    """A generated result violates one of its invariants.

    ``where`` carries the offending ``(i, j)`` pair (1-based) or the
    offending minimum eigenvalue, whichever applies.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class FormatError(ParameterError):
    """A serialized graph, matrix, config or CSV file is malformed."""
