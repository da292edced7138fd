"""Exact rational (de)serialization as ``"p/q"`` strings."""
from fractions import Fraction
import re

from .errors import InputError

_FRACTION_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def format_fraction(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, bool):
        raise InputError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise InputError(f"rationals must be given as 'p/q' strings, got {s!r}")
    match = _FRACTION_RE.match(s)
    if match is None:
        raise InputError(f"not a rational: {s!r}")
    num, den = match.groups()
    den = int(den) if den is not None else 1
    if den == 0:
        raise InputError(f"zero denominator in {s!r}")
    return Fraction(int(num), den)
