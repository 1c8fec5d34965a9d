"""Exception types raised across the alignment engine.

Argument-level misuse (bad shapes, out-of-range indices, invalid
parameters) raises the built-in ``ValueError``; the classes here cover
failures tied to external inputs: files, formats, and configuration.
"""


class EremError(Exception):
    """Base class for engine-specific errors."""


class ParseError(EremError):
    """A text input line does not match the expected layout."""

    def __init__(self, source: str, line_no: int, message: str):
        super().__init__(f"{source}: line {line_no}: {message}")
        self.source = source
        self.line_no = line_no


class ReferentialError(EremError):
    """A record references an identifier that was never declared."""


class FormatError(EremError):
    """A binary or structured file is not in a recognized format."""


class ConsistencyError(EremError):
    """File contents disagree with externally supplied expectations."""


class DataError(EremError):
    """Input values are structurally valid but numerically unusable."""


class ConfigError(EremError):
    """A configuration key is unknown, mistyped, or out of range."""
