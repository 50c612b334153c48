"""Exact nonnegative square roots of rationals.

A :class:`Surd` stores ``q`` and stands for the real number ``sqrt(q)``.
Products and quotients stay exact.  Sums are exact only when the result is
again the square root of a rational, which covers every rational sum and
every sum of commensurable roots; anything else raises :class:`InexactSum`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction, str]


class InexactSum(ArithmeticError):
    """Raised when a sum of roots leaves the set of square roots of rationals."""


def _rational_sqrt(q: Fraction) -> Fraction | None:
    # q is reduced, so it is a square iff numerator and denominator are
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return Fraction(value)


class Surd:
    __slots__ = ("square",)

    def __init__(self, square: RationalLike = 0):
        sq = as_fraction(square)
        if sq < 0:
            raise ValueError(f"negative radicand {sq}")
        self.square = sq

    @classmethod
    def of(cls, value: RationalLike | "Surd") -> "Surd":
        """Embed a nonnegative rational (or pass a Surd through)."""
        if isinstance(value, Surd):
            return value
        r = as_fraction(value)
        if r < 0:
            raise ValueError(f"negative value {r}")
        return cls(r * r)

    @classmethod
    def sqrt(cls, value: RationalLike | "Surd") -> "Surd":
        """Square root of a rational, or of a Surd whose value is rational."""
        if isinstance(value, Surd):
            r = value.rational()
            if r is None:
                raise InexactSum(f"sqrt of irrational {value} is not a surd")
            return cls(r)
        return cls(value)

    def rational(self) -> Fraction | None:
        return _rational_sqrt(self.square)

    @property
    def is_rational(self) -> bool:
        return self.rational() is not None

    def to_fraction(self) -> Fraction:
        r = self.rational()
        if r is None:
            raise ValueError(f"{self} is irrational")
        return r

    def __bool__(self) -> bool:
        return self.square != 0

    def __float__(self) -> float:
        return math.sqrt(self.square)

    def __complex__(self) -> complex:
        return complex(float(self))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.of(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return Surd(self.square * other.square)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.of(other)
        if not isinstance(other, Surd):
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by a zero surd")
        return Surd(self.square / other.square)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.of(other)
        if not isinstance(other, Surd):
            return NotImplemented
        a, b = self.square, other.square
        if not a:
            return other
        if not b:
            return self
        # sqrt(a) + sqrt(b) = sqrt(a + b + 2 sqrt(ab))
        cross = _rational_sqrt(a * b)
        if cross is None:
            raise InexactSum(f"sqrt({a}) + sqrt({b}) is not a square root of a rational")
        return Surd(a + b + 2 * cross)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.of(other)
        if not isinstance(other, Surd):
            return NotImplemented
        a, b = self.square, other.square
        if b > a:
            raise ValueError("surds are nonnegative")
        if not b:
            return self
        cross = _rational_sqrt(a * b)
        if cross is None:
            raise InexactSum(f"sqrt({a}) - sqrt({b}) is not a square root of a rational")
        return Surd(a + b - 2 * cross)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            if other < 0:
                return False
            return self.square == Fraction(other) ** 2
        if isinstance(other, Surd):
            return self.square == other.square
        return NotImplemented

    def __hash__(self):
        return hash(("surd", self.square))

    def __lt__(self, other):
        return self.square < Surd.of(other).square

    def __le__(self, other):
        return self.square <= Surd.of(other).square

    def __gt__(self, other):
        return self.square > Surd.of(other).square

    def __ge__(self, other):
        return self.square >= Surd.of(other).square

    def to_json(self) -> str | dict:
        """Rational values as 'p/q'; irrational ones as {"sqrt": "p/q"}."""
        r = self.rational()
        if r is not None:
            return _fmt(r)
        return {"sqrt": _fmt(self.square)}

    @classmethod
    def from_json(cls, payload) -> "Surd":
        if isinstance(payload, dict):
            if set(payload) != {"sqrt"}:
                raise ValueError(f"bad surd payload {payload!r}")
            return cls(Fraction(payload["sqrt"]))
        if isinstance(payload, (int, str)) and not isinstance(payload, bool):
            return cls.of(Fraction(payload))
        raise ValueError(f"bad weight {payload!r}")

    def __repr__(self):
        r = self.rational()
        if r is not None:
            return f"Surd({_fmt(r)})"
        return f"Surd(sqrt {_fmt(self.square)})"

    __str__ = __repr__


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


ZERO = Surd(0)
ONE = Surd(1)
