"""Exception taxonomy shared across the toolkit.

The CLI maps these onto exit codes (see ``logitron.cli``), so raising the
right class matters more than the message text.
"""


class LogitronError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LogitronError):
    """A scalar/array input was nonfinite where a finite value is required."""


class DomainError(LogitronError):
    """An argument fell outside the restricted domain of an extended function."""


class ParameterError(LogitronError):
    """Inconsistent model parameters (family/alpha/margin/q combinations)."""


class ShapeError(LogitronError):
    """Dimension mismatch between model, features, or statistics."""


class DataError(LogitronError):
    """Dataset-level problem (parsing, degeneracy, empty data)."""


class ParseError(DataError):
    """A delimited file could not be parsed; carries row/column context."""


class DegenerateDataError(DataError):
    """A training problem is vacuous, e.g. only one class present."""


class ConfigurationError(LogitronError):
    """Invalid run configuration (fold counts, empty splits, bad flags)."""


class NumericalFailure(LogitronError):
    """The optimizer hit a nonfinite objective; carries the last finite iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class IncompleteTableError(LogitronError):
    """An accuracy table has missing cells where a complete table is required."""


class SearchFailure(LogitronError):
    """Every cell of a cross-validation grid failed to train."""
