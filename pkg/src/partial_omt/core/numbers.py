"""
Exact numbers: rationals and rationals extended with an infinitesimal
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Fraction
Number = Union[int, Fraction]

_DELTA_TEXT = re.compile(r"^\s*(?P<real>[-+]?\d+(?:/\d+)?)(?:(?P<sign>[-+])(?P<delta>\d+(?:/\d+)?)d)?\s*$")


def to_rational(value: Number | str) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction (never via float)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def floor_rational(q: Fraction) -> int:
    return math.floor(q)


@total_ordering
@dataclass(frozen=True, slots=True)
class DeltaRational:
    """
    A value ``real + delta * δ`` where δ is a positive infinitesimal.

    Ordering is lexicographic on (real, delta). A value with zero delta
    compares equal to its rational part.
    """

    real: Fraction
    delta: Fraction = Fraction(0)

    @classmethod
    def of(cls, real: Number, delta: Number = 0) -> DeltaRational:
        return cls(to_rational(real), to_rational(delta))

    @classmethod
    def parse(cls, text: str) -> DeltaRational:
        """Inverse of ``str``: ``"-12"``, ``"3/2"``, ``"0+1d"``, ``"4-1/2d"``."""
        match = _DELTA_TEXT.match(text)
        if not match:
            raise ValueError(f"not a delta-rational: {text!r}")
        real = Fraction(match["real"])
        delta = Fraction(0)
        if match["delta"]:
            delta = Fraction(match["delta"])
            if match["sign"] == "-":
                delta = -delta
        return cls(real, delta)

    @property
    def is_rational(self) -> bool:
        return self.delta == 0

    def _coerce(self, other) -> DeltaRational | None:
        if isinstance(other, DeltaRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return DeltaRational(Fraction(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DeltaRational(self.real + o.real, self.delta + o.delta)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DeltaRational(self.real - o.real, self.delta - o.delta)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return DeltaRational(-self.real, -self.delta)

    def __mul__(self, k):
        # only scaling by a rational is defined; δ·δ never arises in linear arithmetic
        if isinstance(k, DeltaRational) or isinstance(k, bool):
            return NotImplemented
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return DeltaRational(self.real * k, self.delta * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, DeltaRational) or not isinstance(k, (int, Fraction)):
            return NotImplemented
        k = Fraction(k)
        return DeltaRational(self.real / k, self.delta / k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.real == o.real and self.delta == o.delta

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.real, self.delta) < (o.real, o.delta)

    def __hash__(self):
        if self.delta == 0:
            return hash(self.real)
        return hash((self.real, self.delta))

    def substitute(self, delta_value: Fraction) -> Fraction:
        """Concrete rational obtained by fixing δ."""
        return self.real + self.delta * delta_value

    def __str__(self) -> str:
        if self.delta == 0:
            return format_rational(self.real)
        sign = "+" if self.delta > 0 else "-"
        return f"{format_rational(self.real)}{sign}{format_rational(abs(self.delta))}d"

    def __repr__(self) -> str:
        return f"DeltaRational({self})"


ZERO = DeltaRational(Fraction(0))
