"""Exception types shared across the package.

Every error raised by the library is one of these, so callers can catch
``GainmapError`` for anything, or the specific subclass their contract names.
"""


class GainmapError(Exception):
    """Base class for all library errors."""


class ShapeError(GainmapError, ValueError):
    """Array shape or dimension mismatch."""


class DomainError(GainmapError, ValueError):
    """Values outside the domain an operation is defined on (NaN, negatives, out of range)."""


class UnsupportedConversionError(GainmapError, ValueError):
    """Requested a color conversion with no registered path."""


class PreconditionError(GainmapError, ValueError):
    """Input violates a documented precondition (wrong tag, wrong mode, bad config)."""


class StateError(GainmapError, ValueError):
    """Object is in the wrong state for the operation (e.g. residual already normalized)."""


class MetadataError(GainmapError, ValueError):
    """Residual metadata is missing, inconsistent, or corrupt."""


class CorruptStreamError(GainmapError, ValueError):
    """Serialized container fails magic/version/length validation."""


class NotEmbeddedError(GainmapError, ValueError):
    """Carrier file holds no embedded payload trailer."""
