"""Exception and warning taxonomy used across the package.

CLI exit-code mapping lives in :mod:`depthclick.cli`.
"""


class DepthClickError(Exception):
    """Base class for all package errors."""


class ShapeError(DepthClickError):
    """Tensor shapes violate an operation's contract."""


class BroadcastError(ShapeError):
    """Operand shapes are not broadcast-compatible."""


class BoundsError(DepthClickError):
    """A coordinate lies outside the image."""


class EmptyMaskError(DepthClickError):
    """An operation requires at least one foreground pixel."""


class DegenerateMaskError(DepthClickError):
    """Mask is all-foreground or all-background where both classes are required."""


class DegenerateMetricError(DepthClickError):
    """Metric undefined for the given inputs (e.g. zero denominator)."""


class DegenerateBatchError(DepthClickError):
    """A loss has nothing valid to average over."""


class SceneError(DepthClickError):
    """Scene specification cannot be rendered."""


class ConfigError(DepthClickError):
    """Invalid or inconsistent configuration."""


class IoError(DepthClickError):
    """Filesystem failure; carries the offending path."""

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{message}: {path}")
        self.path = path


class FormatError(DepthClickError):
    """Malformed on-disk payload; carries the byte offset where parsing failed."""

    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (byte {offset})")
        self.offset = offset


class NumericWarning(UserWarning):
    """Recorded when a computation produced IEEE inf/nan or a degenerate value."""
