"""Exact commutative algebra over prime fields.

Kernel: multivariate polynomial arithmetic, Buchberger's algorithm, ideal
operations (colon, saturation, elimination), Frobenius root ideals, test
ideals of pairs, F-splitting certificates, symbolic powers, and a CLI
harness that verifies uniform symbolic-power containments on small rings.
"""

from .poly import PrimeField, TermOrder, PolyRing, Polynomial, ParseError
from .groebner import Ideal, ResourceLimits, ResourceLimitExceeded
from .errors import AlgebraError, RingMismatchError, OverflowGuardError

__all__ = [
    "PrimeField",
    "TermOrder",
    "PolyRing",
    "Polynomial",
    "ParseError",
    "Ideal",
    "ResourceLimits",
    "ResourceLimitExceeded",
    "AlgebraError",
    "RingMismatchError",
    "OverflowGuardError",
]
