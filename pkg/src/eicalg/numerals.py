"""Exact conversion between decimal literals and rationals.

A decimal literal is a ratio over a power of ten; parsing never round-trips
through binary floats.
"""

import re
from fractions import Fraction

_DECIMAL_RE = re.compile(r"^[0-9]+(\.[0-9]+)?$")


def is_decimal_literal(text: str) -> bool:
    return bool(_DECIMAL_RE.match(text))


def parse_decimal(text: str) -> Fraction:
    """Parse an unsigned decimal literal exactly into a rational."""
    if not _DECIMAL_RE.match(text):
        raise ValueError(f"not a decimal literal: {text!r}")
    return Fraction(text)


def format_decimal(q: Fraction) -> str | None:
    """Render q as an exact decimal literal, or None if impossible.

    Exact decimal rendering exists iff the reduced denominator is 2^a * 5^b.
    The sign is included for negative inputs.
    """
    den = q.denominator
    two = five = 0
    while den % 2 == 0:
        den //= 2
        two += 1
    while den % 5 == 0:
        den //= 5
        five += 1
    if den != 1:
        return None
    k = max(two, five)
    mantissa = abs(q.numerator) * 10**k // q.denominator
    sign = "-" if q < 0 else ""
    if k == 0:
        return sign + str(mantissa)
    digits = str(mantissa).rjust(k + 1, "0")
    head, tail = digits[:-k], digits[-k:]
    tail = tail.rstrip("0")
    return sign + (head if not tail else f"{head}.{tail}")
