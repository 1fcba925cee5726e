"""Extended distances: exact nonnegative rationals plus a single infinity."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import InputError


class _Infinity:
    """The distance between points of different coarse components.

    Compares greater than every rational, absorbs addition and positive
    scaling. There is exactly one instance, ``INF``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("coarse_ends.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or isinstance(other, Rational):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if isinstance(other, Rational):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, Rational):
            return True
        return NotImplemented

    def __ge__(self, other):
        if other is self or isinstance(other, Rational):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, Rational):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Rational):
            if other < 0:
                raise InputError("cannot scale an extended distance by a negative factor")
            if other == 0:
                raise InputError("0 * inf is undefined")
            return self
        return NotImplemented

    __rmul__ = __mul__


INF = _Infinity()

ExtDist = Union[int, Fraction, _Infinity]


def is_finite(d) -> bool:
    return d is not INF


def normalize(value) -> ExtDist:
    """Return ``value`` as an int when integral, a Fraction otherwise, or INF."""
    if value is INF:
        return INF
    if type(value) is int:
        if value < 0:
            raise InputError(f"distances are nonnegative, got {value}")
        return value
    if isinstance(value, bool) or not isinstance(value, Rational):
        raise InputError(f"extended distances are exact rationals or INF, got {value!r}")
    value = Fraction(value)
    if value < 0:
        raise InputError(f"distances are nonnegative, got {value}")
    return value.numerator if value.denominator == 1 else value


def parse(value) -> ExtDist:
    """Parse an int, a ``"p/q"`` string or ``"inf"`` into an ExtDist.

    >>> parse("3/6")
    Fraction(1, 2)
    >>> parse("inf")
    INF
    >>> parse(4)
    4
    """
    if value is INF:
        return INF
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "infinity", "∞"):
            return INF
        try:
            return normalize(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not an exact distance: {value!r}") from exc
    if isinstance(value, float):
        raise InputError("floating point distances are not accepted; use 'p/q' strings")
    return normalize(value)


def parse_rational(value) -> Fraction | int:
    """Parse a possibly negative exact rational (ints or ``"p/q"`` strings)."""
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"expected an integer or 'p/q' string, got {value!r}")
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not an exact rational: {value!r}") from exc
    if not isinstance(value, Rational):
        raise InputError(f"expected an integer or 'p/q' string, got {value!r}")
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else value


def to_json(d):
    """Serialize an ExtDist: ints stay ints, fractions become ``"p/q"``, INF ``"inf"``."""
    if d is INF:
        return "inf"
    if isinstance(d, Fraction):
        if d.denominator == 1:
            return d.numerator
        return f"{d.numerator}/{d.denominator}"
    return d


def floor(d) -> int:
    """Largest integer <= d; INF has no floor."""
    if d is INF:
        raise InputError("INF has no integer floor")
    return math.floor(d)


def ext_max(values, default=0) -> ExtDist:
    best = default
    for v in values:
        if v > best:
            best = v
    return best
