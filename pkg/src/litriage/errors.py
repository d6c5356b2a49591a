"""Exception types shared across the toolkit."""

from __future__ import annotations


class LitriageError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(LitriageError):
    """Unparseable input corpus (malformed XML, bad JSONL line, ...).

    ``line`` and ``byte_offset`` locate the failure in the source when the
    parser can tell; either may be None.
    """

    def __init__(self, message: str, *, line: int | None = None,
                 byte_offset: int | None = None):
        self.line = line
        self.byte_offset = byte_offset
        parts = [message]
        if line is not None:
            parts.append(f"line {line}")
        if byte_offset is not None:
            parts.append(f"byte offset {byte_offset}")
        super().__init__(": ".join(parts) if len(parts) > 1 else message)


class DegenerateCorpusError(LitriageError):
    """A labeled corpus with an empty class; statistics are undefined."""


class DegenerateTableError(LitriageError):
    """A 2x2 table with a zero margin; chi-square is undefined."""


class AlignmentError(LitriageError):
    """Prediction/gold sequences do not cover the same citation ids."""


class MissingArtifactError(LitriageError):
    """A required on-disk artifact (e.g. indicator profile) is absent."""
