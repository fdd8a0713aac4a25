"""Exception types shared across the package."""


class ZokError(Exception):
    """Base class for all zok-specific errors."""


class ParseError(ZokError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ZokError):
    """Input data violates a dataset contract (labels, classes, finiteness)."""


class IndefiniteOperatorError(ZokError):
    """CG detected negative curvature: the operator is not positive semidefinite."""


class SolverError(ZokError):
    """Training failed in a way the solver could not recover from."""
