"""Exception hierarchy shared across the package.

The split mirrors what a caller can do about the failure: fix the
configuration (``ConfigError``), fix the input file (``ParseError`` for
structure, ``ValidationError`` for values and references), or report a
bug (anything else).
"""

__all__ = ["OcevalError", "ConfigError", "ParseError", "ValidationError"]


class OcevalError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OcevalError):
    """Invalid parameters or option combinations (a usage problem)."""


class ParseError(OcevalError):
    """An input file is structurally malformed."""


class ValidationError(OcevalError):
    """Input data carries invalid values or dangling references."""
