"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class CadnetError(Exception):
    """Base class for every error this package raises deliberately."""


class ArgumentError(CadnetError):
    """An argument value violates a documented precondition."""


class OutOfRangeError(ArgumentError):
    """A requested window or index falls outside the available data."""


class ParseError(CadnetError):
    """Malformed text input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(CadnetError):
    """A file is well formed but its header or fields break the schema."""


class DegenerateSignalError(CadnetError):
    """A segment has no amplitude variation, so it cannot be normalized."""


class EmptyDatasetError(CadnetError):
    """An operation produced or received a dataset with no segments."""


class DataError(CadnetError):
    """Dataset content makes the requested operation meaningless."""


class ShapeError(CadnetError):
    """Array shapes disagree with what the receiving code requires."""


class NumericError(CadnetError):
    """A non-finite value reached a boundary where finiteness is checked."""


class StateError(CadnetError):
    """An object was used in an order its lifecycle does not allow."""


class DivergenceError(CadnetError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, batch: int):
        super().__init__(f"non-finite loss at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch


class FormatError(CadnetError):
    """A binary file does not start with the expected magic or version."""


class CorruptionError(CadnetError):
    """A binary file is structurally recognized but internally inconsistent."""
