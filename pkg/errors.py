"""Exception hierarchy shared by the library, the CLI and the HTTP API."""

from typing import Optional


class OntFactorError(Exception):
    """Base class for every error raised by ontfactor."""


class StructuralError(OntFactorError):
    """Shapes disagree: grid dimensions, labels, factor sizes, missing metadata."""


class InvalidTableError(StructuralError):
    """A table failed validate_table where the operation requires a valid one."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ResourceError(OntFactorError):
    """A configured cap would be exceeded."""


class TableParseError(OntFactorError):
    """Malformed JSON document, non-rational token or dimension mismatch."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class RationalizationError(OntFactorError):
    """A Born-rule block column is not rational at the requested tolerance."""
