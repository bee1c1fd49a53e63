"""
Error hierarchy shared by every package.

Library code raises these; the CLI maps ``exit_code`` to the process status.
"""
from typing import Optional


class PlannerError(Exception):
    """Base class for all planner errors."""

    exit_code: int = 1


class ConfigError(PlannerError):
    """Invalid configuration value or stage/dataset mismatch."""

    exit_code = 2


class DatasetIOError(PlannerError):
    """File could not be read or written."""

    exit_code = 3


class RecordError(PlannerError):
    """A JSONL record could not be turned into a domain value."""

    exit_code = 3

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class RecordParseError(RecordError):
    """Malformed JSON text."""


class SchemaError(RecordError):
    """Well-formed JSON that does not match the record schema."""

    def __init__(self, message: str, field: Optional[str] = None, line_number: Optional[int] = None):
        self.field = field
        super().__init__(message, line_number)


class SerializationError(PlannerError):
    """Value cannot be written as a record (e.g. non-finite numbers)."""


class NumericError(PlannerError):
    """Non-finite values reached a numeric routine."""


class ShapeError(PlannerError):
    """Operand shapes are incompatible."""

    def __init__(self, op: str, *shapes):
        self.shapes = shapes
        rendered = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


class ArityError(PlannerError):
    """Wrong number of items (lengths differ, missing views, empty input)."""


class IndexRangeError(PlannerError, IndexError):
    """Index outside its closed range."""


class NotFoundError(PlannerError):
    """Requested record does not exist."""

    exit_code = 4
