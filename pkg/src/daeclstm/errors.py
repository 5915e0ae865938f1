"""Exception types shared across the library.

The CLI maps these onto exit codes: configuration problems exit 1, data
problems exit 2, verification failures exit 3.
"""


class DimensionError(ValueError):
    """Operand shapes do not line up."""


class DomainError(ValueError):
    """Input is outside an operation's domain (empty, too short, degenerate)."""


class ConfigError(ValueError):
    """Bad or inconsistent configuration value."""


class ParseError(DomainError):
    """A file could not be parsed; message names the offending line."""


class EvaluationError(RuntimeError):
    """A numeric evaluation produced a non-finite value."""


class CheckpointError(RuntimeError):
    """Checkpoint file is malformed or has an unsupported format version."""


class StaleResidualsError(DomainError):
    """A residual series was produced by different model parameters."""
