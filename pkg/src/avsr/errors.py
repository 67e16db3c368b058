"""Exception hierarchy shared by every subsystem.

The CLI maps :class:`ConfigError` to exit status 2 and :class:`DataError`
to exit status 3.
"""


class AVSRError(Exception):
    """Base class for all package errors."""


class ConfigError(AVSRError, ValueError):
    """Invalid configuration value or combination."""


class ShapeError(AVSRError, ValueError):
    """Tensor extents do not satisfy an operation's contract."""


class DataError(AVSRError, ValueError):
    """Input data is malformed or out of range."""


class InputError(DataError):
    """A caller-supplied array or signal violates a precondition."""


class AlignmentError(DataError):
    """Two feature streams disagree on length or frame rate."""


class PipelineError(AVSRError, RuntimeError):
    """A pipeline stage is missing a prerequisite artifact."""


class TrainingError(AVSRError, RuntimeError):
    """Optimization diverged (non-finite loss or gradient)."""
