"""Exception hierarchy shared by all chemfv modules."""


class ChemfvError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ChemfvError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CorruptionError(ChemfvError):
    """A field or state contains non-finite values or violates a scheme invariant."""


class ConfigError(ChemfvError):
    """A configuration file failed to parse or violates a semantic constraint.

    ``line`` carries the 1-based line number for parse errors when known.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line
