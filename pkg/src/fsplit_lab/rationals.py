"""Exact rational helpers used by exponent arithmetic.

All fractional exponents in the kernel are `fractions.Fraction` values;
ceil/floor must be exact because several containment bounds sit right on
integer boundaries.
"""

from __future__ import annotations

import math
from fractions import Fraction


def exact_ceil(x: Fraction | int) -> int:
    return math.ceil(x)


def exact_floor(x: Fraction | int) -> int:
    return math.floor(x)


def parse_rational(text: str) -> Fraction:
    """Parse 'NUM/DEN' or 'NUM' into an exact Fraction."""
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def epsilon_below(x: Fraction) -> Fraction:
    """A positive rational e with x - e > ceil(x) - 1.

    For integer x any e < 1 works; otherwise any e < x - floor(x) works.
    """
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(1, 2)
    return (x - exact_floor(x)) / 2
