"""Exception types shared across the toolkit."""


class LcrError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(LcrError):
    """Operand shapes are not conformable."""


class RankError(LcrError):
    """Tensor rank differs from what the operation requires."""


class InputError(LcrError):
    """A value is outside the operation's accepted domain."""


class NumericError(LcrError):
    """A non-finite value appeared where finite math is required."""


class StateError(LcrError):
    """An operation was called against stale or missing mutable state."""


class FormatError(LcrError):
    """A serialized byte stream violates its declared format."""


class DegenerateUnitError(LcrError):
    """A traced unit produced a zero spectral norm where a positive one is required."""


class ChecksumError(FormatError):
    """Stored CRC does not match the payload."""
