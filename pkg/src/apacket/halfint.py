"""Exact half-integers stored as doubled ints."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from numbers import Integral, Rational
import sys

_P = sys.hash_info.modulus
_INV2 = pow(2, _P - 2, _P)


@total_ordering
class HalfInt:
    """A number in (1/2)Z, stored as ``twice = 2 * value``.

    Accepts ints, Fractions with denominator 1 or 2, other HalfInts and
    strings like ``"3/2"``, ``"-1/2"`` or ``"4"``.

    >>> HalfInt("3/2") + HalfInt(1)
    HalfInt('5/2')
    >>> HalfInt("1/2").is_integral
    False
    """

    __slots__ = ("twice",)

    def __init__(self, value=0):
        object.__setattr__(self, "twice", _to_twice(value))

    @classmethod
    def from_twice(cls, twice: int) -> "HalfInt":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "twice", int(twice))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    def __reduce__(self):
        return (HalfInt.from_twice, (self.twice,))

    @property
    def is_integral(self) -> bool:
        return self.twice % 2 == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def floor(self) -> int:
        return self.twice // 2

    def __int__(self):
        if not self.is_integral:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __index__(self):
        return self.__int__()

    def __float__(self):
        return self.twice / 2

    def __bool__(self):
        return self.twice != 0

    def __hash__(self):
        # agrees with hash(Fraction(twice, 2)) without building the Fraction
        t = self.twice
        if t % 2 == 0:
            return hash(t // 2)
        h = (abs(t) % _P) * _INV2 % _P
        h = -h if t < 0 else h
        return -2 if h == -1 else h

    def __eq__(self, other):
        try:
            return self.twice == _to_twice(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        try:
            return self.twice < _to_twice(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __neg__(self):
        return HalfInt.from_twice(-self.twice)

    def __pos__(self):
        return self

    def __abs__(self):
        return HalfInt.from_twice(abs(self.twice))

    def __add__(self, other):
        try:
            return HalfInt.from_twice(self.twice + _to_twice(other))
        except (TypeError, ValueError):
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return HalfInt.from_twice(self.twice - _to_twice(other))
        except (TypeError, ValueError):
            return NotImplemented

    def __rsub__(self, other):
        try:
            return HalfInt.from_twice(_to_twice(other) - self.twice)
        except (TypeError, ValueError):
            return NotImplemented

    def __mul__(self, other):
        # only integer scalars keep us inside (1/2)Z
        if isinstance(other, Integral):
            return HalfInt.from_twice(self.twice * int(other))
        return NotImplemented

    __rmul__ = __mul__

    def half(self) -> "HalfInt":
        """Return self/2; requires self to be an integer."""
        if self.twice % 2:
            raise ValueError(f"{self}/2 is not a half-integer")
        return HalfInt.from_twice(self.twice // 2)

    def __str__(self):
        if self.is_integral:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self):
        return f"HalfInt('{self}')"


def _to_twice(value) -> int:
    if type(value) is HalfInt:
        return value.twice
    if type(value) is int:
        return 2 * value
    if isinstance(value, HalfInt):
        return value.twice
    if isinstance(value, bool):
        raise TypeError("bool is not a half-integer")
    if isinstance(value, Integral):
        return 2 * int(value)
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Rational):
        doubled = Fraction(value) * 2
        if doubled.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return int(doubled)
    if isinstance(value, float):
        doubled = value * 2
        if doubled != int(doubled):
            raise ValueError(f"{value} is not a half-integer")
        return int(doubled)
    raise TypeError(f"cannot convert {type(value).__name__} to HalfInt")


def hi(value) -> HalfInt:
    """Shorthand constructor."""
    return value if isinstance(value, HalfInt) else HalfInt(value)


ZERO = HalfInt(0)
HALF = HalfInt.from_twice(1)
ONE = HalfInt(1)
