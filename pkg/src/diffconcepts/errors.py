"""Exception hierarchy for diffconcepts."""

from __future__ import annotations


class DiffConceptsError(Exception):
    """Base class for every error raised by the library."""


class InvalidValueError(DiffConceptsError, ValueError):
    """Raised when a numeric input is not finite."""


class InvalidArgumentError(DiffConceptsError, ValueError):
    """Raised when an argument has the wrong shape or range."""


class SchemaError(DiffConceptsError):
    """Raised when attribute names do not match a series schema."""


class ParseError(DiffConceptsError):
    """Raised when a CSV or JSON input cannot be parsed.

    ``row`` and ``column`` are 1-based positions in the source text when known.
    """

    def __init__(
        self,
        message: str,
        *,
        row: int | None = None,
        column: int | None = None,
    ):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class DerivationError(DiffConceptsError):
    """Raised when sensor attributes cannot be derived from a polyline."""


class CapacityError(DiffConceptsError):
    """Raised when a configured breakpoint or concept cap is exceeded."""


class ConfigError(DiffConceptsError):
    """Raised when an environment setting cannot be interpreted."""
