"""Exact rational and complex-rational scalar arithmetic.

Everything here is built on fractions.Fraction so that equality tests in the
lattice, quadratic-form and period-domain code are decided by arithmetic,
never by rounding.  Floats are accepted as inputs (they are dyadic rationals,
so the conversion is exact), but are never produced unless asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions, floats and 'p/q' strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact: floats are dyadic
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def format_fraction(f: Fraction) -> str:
    """Serialize as 'p' or 'p/q'; inverse of to_fraction on strings."""
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def frac_vector(values) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in values)


def sqrt_exact(f: Fraction):
    """Return the exact nonnegative rational square root of f, or None.

    None means f is not the square of a rational (callers then decide
    between a float fallback and an error).
    """
    f = Fraction(f)
    if f < 0:
        return None
    if f == 0:
        return Fraction(0)
    n, d = f.numerator, f.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_perfect_square(f) -> bool:
    return sqrt_exact(to_fraction(f)) is not None


@dataclass(frozen=True)
class ComplexRational:
    """Exact element of Q(i): re + im*i with Fraction parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, complex):
            return ComplexRational(to_fraction(value.real), to_fraction(value.imag))
        if isinstance(value, tuple) and len(value) == 2:
            return ComplexRational(to_fraction(value[0]), to_fraction(value[1]))
        return ComplexRational(to_fraction(value))

    def __add__(self, other):
        o = ComplexRational.of(other)
        return ComplexRational(self.re + o.re, self.im + o.im)

    def __sub__(self, other):
        o = ComplexRational.of(other)
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __mul__(self, other):
        o = ComplexRational.of(other)
        return ComplexRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    def __truediv__(self, other):
        o = ComplexRational.of(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * ComplexRational(o.re / n, -o.im / n)

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """The field norm re^2 + im^2 (a nonnegative rational)."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if self.im == 0:
            return format_fraction(self.re)
        return f"{format_fraction(self.re)}+{format_fraction(self.im)}i"
