"""Shared exception types."""


class AlgebraError(Exception):
    """Base class for all kernel errors."""


class RingMismatchError(AlgebraError):
    """Operands belong to different rings."""


class OverflowGuardError(AlgebraError):
    """An exponent or total degree exceeded the 16-bit-safe guard."""


class DivisionError(AlgebraError):
    """An exact division that must succeed (domain invariant) failed."""


class PreconditionError(AlgebraError):
    """An operation was called with arguments violating its stated preconditions."""
