"""Exception types shared by every module."""


class DunklError(Exception):
    """Base class for all library errors."""


class DomainError(DunklError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DimensionMismatchError(DunklError, ValueError):
    """Points, grids or multiplicities of different dimension were combined."""


class HypothesisViolationError(DunklError):
    """A kernel does not meet the hypotheses required by a measurement."""


class ConfigError(DunklError):
    """Invalid experiment configuration. `line` is the 1-based YAML line, when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DecayWarning(UserWarning):
    """A sampled function has not decayed at the edge of its truncation box."""
