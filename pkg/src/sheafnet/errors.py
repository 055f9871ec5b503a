"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class SheafNetError(Exception):
    """Base class for all library errors."""


class MalformedCellError(SheafNetError, ValueError):
    pass


class NotInComplexError(SheafNetError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class NotClosedError(SheafNetError, ValueError):
    pass


class InvalidRestrictionError(SheafNetError, ValueError):
    pass


class IncompleteSectionError(SheafNetError, ValueError):
    pass


class EnumerationCapError(SheafNetError, RuntimeError):
    def __init__(self, count: int, cap: int) -> None:
        super().__init__(f"{count} nodes exceeds enumeration cap {cap} (raise it with --cap)")
        self.count = count
        self.cap = cap


class DegenerateGeometryError(SheafNetError, ValueError):
    pass


class InputFormatError(SheafNetError, ValueError):
    """Bad input file. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MissingScoreError(SheafNetError, ValueError):
    pass
