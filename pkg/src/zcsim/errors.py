"""Exception types shared across the package.

ConfigError maps to CLI exit code 1, NumericalError (and subclasses) to
exit code 2.
"""


class ZcsimError(Exception):
    """Base class for package errors."""


class ConfigError(ZcsimError):
    """Malformed configuration: unknown keys, bad values, unparsable files."""


class NumericalError(ZcsimError):
    """A numerical routine left its domain of validity."""


class GramSingularError(NumericalError):
    """Gram matrix numerically singular for the requested degree/node count."""

    def __init__(self, message: str, condition_number: float = float("inf")):
        super().__init__(f"{message} (condition number {condition_number:.3e})")
        self.condition_number = condition_number


class SolverError(NumericalError):
    """Root solver failed to produce a validated zero set."""
