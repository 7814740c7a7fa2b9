"""Closed intervals of floats with outward rounding.

Every arithmetic result is widened by one ulp on each side, which dominates
the rounding error of a single IEEE operation. Exact rationals are rounded
outward exactly once via :func:`from_rational`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = ["Enclosure", "from_rational", "down", "up", "as_fraction"]


def down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def up(x: float) -> float:
    return math.nextafter(x, math.inf)


def as_fraction(x) -> Fraction:
    """Exact rational value of ``x`` (decimal strings are read exactly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        # every finite binary float is a rational number
        return Fraction(float(x))
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational number")


def from_rational(q) -> "Enclosure":
    """Tightest float enclosure of an exact rational ``q``."""
    q = as_fraction(q)
    f = float(q)
    lo = f if Fraction(f) <= q else down(f)
    hi = f if Fraction(f) >= q else up(f)
    return Enclosure(lo, hi)


@dataclass(frozen=True)
class Enclosure:
    """Certified bounds ``lo <= value <= hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("NaN endpoint")
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo!r}, {hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "Enclosure":
        if isinstance(x, Enclosure):
            return x
        if isinstance(x, (Fraction, Rational)) and not isinstance(x, int):
            return from_rational(x)
        x = float(x)
        return cls(x, x)

    @classmethod
    def around(cls, value: float, radius: float) -> "Enclosure":
        return cls(down(value - radius), up(value + radius))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Fraction):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def strictly_inside(self, other: "Enclosure") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def sign(self) -> int:
        """+1 or -1 when the sign is certified, 0 otherwise."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def widen(self, radius: float) -> "Enclosure":
        return Enclosure(down(self.lo - radius), up(self.hi + radius))

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return Enclosure(down(self.lo + o.lo), up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return Enclosure(down(self.lo - o.hi), up(self.hi - o.lo))

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(down(min(p)), up(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        q = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Enclosure(down(min(q)), up(max(q)))

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Enclosure(1.0, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"Enclosure({self.lo!r}, {self.hi!r})"

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


def _coerce(x):
    if isinstance(x, Enclosure):
        return x
    if isinstance(x, (int, float, Fraction, Rational, np.floating, np.integer)):
        return Enclosure.point(x)
    return NotImplemented
