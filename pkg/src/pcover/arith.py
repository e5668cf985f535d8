"""Exact scalar arithmetic: rationals plus a formal infinitesimal term.

Every number on the solver path is a `fractions.Fraction`; floats are
rejected at the boundary.  On top of plain rationals sits `DeltaRational`,
the value ``value + delta * d`` for a formal infinitesimal ``d > 0``,
ordered lexicographically.  The infinitesimal is never instantiated as a
small concrete number, so perturbed multiplier runs need no tolerance
tuning: ties are decided exactly by the delta coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Fraction

RationalLike = Union[int, Fraction, str]


def as_rational(x: RationalLike) -> Fraction:
    """Coerce to Fraction, rejecting floats to keep the arithmetic exact."""
    if isinstance(x, float):
        raise TypeError(f"floats are not allowed in exact arithmetic: {x!r}")
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse 'num' or 'num/den' into a Fraction."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc
    return value


def format_rational(x: Fraction) -> str:
    """Canonical text form: 'num' for integers, otherwise 'num/den'."""
    return str(Fraction(x))


class DeltaRational:
    """The exact value ``value + delta * d`` for an infinitesimal d > 0.

    Supports addition, subtraction, negation, multiplication by a plain
    rational scalar, and total lexicographic ordering.  Multiplying two
    DeltaRationals is undefined (it would create a d**2 term) and raises.
    """

    __slots__ = ("value", "delta")

    def __init__(self, value: RationalLike = 0, delta: RationalLike = 0):
        self.value = as_rational(value)
        self.delta = as_rational(delta)

    @staticmethod
    def of(x: "DeltaRational | RationalLike") -> "DeltaRational":
        if isinstance(x, DeltaRational):
            return x
        return DeltaRational(x)

    def __add__(self, other):
        other = DeltaRational.of(other)
        return DeltaRational(self.value + other.value, self.delta + other.delta)

    __radd__ = __add__

    def __sub__(self, other):
        other = DeltaRational.of(other)
        return DeltaRational(self.value - other.value, self.delta - other.delta)

    def __rsub__(self, other):
        return DeltaRational.of(other) - self

    def __neg__(self):
        return DeltaRational(-self.value, -self.delta)

    def __mul__(self, scalar):
        if isinstance(scalar, DeltaRational):
            raise TypeError("cannot multiply two DeltaRationals (d**2 is undefined)")
        s = as_rational(scalar)
        return DeltaRational(self.value * s, self.delta * s)

    __rmul__ = __mul__

    def _key(self):
        return (self.value, self.delta)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DeltaRational(other)
        if not isinstance(other, DeltaRational):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        return self._key() < DeltaRational.of(other)._key()

    def __le__(self, other):
        return self._key() <= DeltaRational.of(other)._key()

    def __gt__(self, other):
        return self._key() > DeltaRational.of(other)._key()

    def __ge__(self, other):
        return self._key() >= DeltaRational.of(other)._key()

    def __hash__(self):
        return hash(self._key())

    def is_zero(self) -> bool:
        return not self.value and not self.delta

    def is_positive(self) -> bool:
        """Strictly positive for every sufficiently small infinitesimal."""
        return self.value > 0 or (self.value == 0 and self.delta > 0)

    def is_nonnegative(self) -> bool:
        return not (-self).is_positive()

    def at(self, d: RationalLike) -> Fraction:
        """Evaluate at a concrete rational d (used only by tests)."""
        return self.value + self.delta * as_rational(d)

    def __repr__(self):
        return f"DeltaRational({self.value}, {self.delta})"

    def __str__(self):
        if not self.delta:
            return format_rational(self.value)
        sign = "+" if self.delta > 0 else "-"
        return f"{format_rational(self.value)}{sign}{format_rational(abs(self.delta))}d"


DR_ZERO = DeltaRational(0)


def delta_cmp(a: DeltaRational, b: DeltaRational) -> int:
    """Three-way lexicographic comparison: -1, 0, or +1."""
    ka, kb = a._key(), b._key()
    return (ka > kb) - (ka < kb)
