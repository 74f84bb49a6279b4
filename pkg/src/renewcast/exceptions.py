"""Exception hierarchy shared across the package."""


class RenewcastError(Exception):
    """Base class for all package errors."""


class InsufficientDataError(RenewcastError, ValueError):
    """A series is too short for the requested operation."""


class ParseError(RenewcastError, ValueError):
    """A CSV table could not be parsed.

    ``row`` is the 1-based line number in the file and ``column`` the
    0-based field index, either may be ``None`` when not applicable.
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class EmptyDatasetError(RenewcastError):
    """Cleaning dropped every column."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ModelSpecError(RenewcastError, ValueError):
    """An order or configuration is invalid or inconsistent with its params."""


class GridSearchError(RenewcastError):
    """Every candidate in a search failed; ``reasons`` maps candidate to message."""

    def __init__(self, message, reasons=None):
        super().__init__(message)
        self.reasons = dict(reasons or {})
