"""Exception types shared across the package.

The CLI maps these onto exit codes: schema errors exit with 2, domain
errors with 3, and guard violations with 4.
"""


class SchemaError(ValueError):
    """Malformed input (bad weight shape, unparsable matrix, ...)."""


class DomainError(ValueError):
    """Input is well formed but outside the mathematical domain of the operation."""


class UnsupportedError(DomainError):
    """Input is meaningful but the requested case is not implemented."""


class GuardExceeded(RuntimeError):
    """An enumeration would exceed its size guard."""
