"""Exact arithmetic in the quadratic field Q[sqrt 2].

Every Haar amplitude is of the form +-2^(-k/2), so values built from
Haar coefficients, shifts and inner products stay inside Q[sqrt 2].
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

SQRT2_SYMBOLS = ("√2", "sqrt2", "r2")

Number = Union[int, Fraction, "Sqrt2Scalar"]


class Sqrt2Scalar:
    """The number ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0):
        self.a = a if type(a) is Fraction else Fraction(a)
        self.b = b if type(b) is Fraction else Fraction(b)

    @classmethod
    def coerce(cls, x) -> "Sqrt2Scalar":
        if isinstance(x, Sqrt2Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, Rational):
            return cls(Fraction(x.numerator, x.denominator))
        raise TypeError(f"cannot represent {x!r} exactly in Q[sqrt2]")

    # arithmetic -----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Sqrt2Scalar):
            return Sqrt2Scalar(self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return Sqrt2Scalar(self.a + other, self.b)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Sqrt2Scalar):
            return Sqrt2Scalar(self.a - other.a, self.b - other.b)
        if isinstance(other, (int, Fraction)):
            return Sqrt2Scalar(self.a - other, self.b)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return Sqrt2Scalar(other - self.a, -self.b)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Sqrt2Scalar):
            a, b, c, d = self.a, self.b, other.a, other.b
            if not b:
                return Sqrt2Scalar(a * c, a * d) if d else Sqrt2Scalar(a * c)
            if not d:
                return Sqrt2Scalar(a * c, b * c)
            return Sqrt2Scalar(a * c + 2 * b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return Sqrt2Scalar(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Sqrt2Scalar(-self.a, -self.b)

    def __pos__(self):
        return self

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 2 b^2`` (product with the conjugate)."""
        return self.a * self.a - 2 * self.b * self.b

    def conjugate(self) -> "Sqrt2Scalar":
        return Sqrt2Scalar(self.a, -self.b)

    def inverse(self) -> "Sqrt2Scalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q[sqrt2]")
        return Sqrt2Scalar(self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q[sqrt2]")
            return Sqrt2Scalar(self.a / other, self.b / other)
        if isinstance(other, Sqrt2Scalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Sqrt2Scalar(other) * self.inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Sqrt2Scalar(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def square(self) -> "Sqrt2Scalar":
        a, b = self.a, self.b
        return Sqrt2Scalar(a * a + 2 * b * b, 2 * a * b)

    # comparison -----------------------------------------------------

    def sign(self) -> int:
        """Exact sign of ``a + b sqrt2`` (-1, 0 or 1)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 against 2 b^2
        n = self.norm()
        return sa if n > 0 else sb

    def _cmp(self, other) -> int:
        if not isinstance(other, Sqrt2Scalar):
            other = Sqrt2Scalar.coerce(other)
        return (self - other).sign()

    def __eq__(self, other):
        if isinstance(other, Sqrt2Scalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # conversion -----------------------------------------------------

    def is_rational(self) -> bool:
        return not self.b

    def rational_part(self) -> Fraction:
        return self.a

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return self.a

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __repr__(self):
        return f"Sqrt2Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Canonical text form: ``p/q``, ``r/s√2`` or ``p/q+r/s√2``."""
    x = Sqrt2Scalar.coerce(x)
    if not x.b:
        return _fmt_rational(x.a)
    irr = _fmt_rational(abs(x.b)) + "√2"
    if not x.a:
        return ("-" if x.b < 0 else "") + irr
    return _fmt_rational(x.a) + ("-" if x.b < 0 else "+") + irr


def _parse_rational(text: str) -> Fraction:
    if not re.fullmatch(r"[+-]?\d+(?:/\d+)?", text):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


def parse_scalar(text: str) -> Sqrt2Scalar:
    """Parse ``"p/q"``, ``"p/q+r/s√2"``, ``"-√2"`` and friends exactly.

    ``sqrt2`` is accepted as an ASCII spelling of ``√2``.
    """
    if not isinstance(text, str):
        raise TypeError("scalar text must be a string")
    s = text.replace(" ", "").replace("*", "")
    for sym in SQRT2_SYMBOLS:
        if s.endswith(sym):
            s = s[: -len(sym)]
            break
    else:
        return Sqrt2Scalar(_parse_rational(s))
    # split "a+b" at the last sign that is not leading
    cut = max(s.rfind("+"), s.rfind("-"))
    if cut > 0:
        a, coef = _parse_rational(s[:cut]), s[cut:]
    else:
        a, coef = Fraction(0), s
    if coef in ("", "+"):
        b = Fraction(1)
    elif coef == "-":
        b = Fraction(-1)
    else:
        b = _parse_rational(coef)
    return Sqrt2Scalar(a, b)


@lru_cache(maxsize=4096)
def pow2_half(n: int) -> Sqrt2Scalar:
    """Exact ``2^(n/2)``; rational for even ``n``, a multiple of sqrt 2 otherwise."""
    if n % 2 == 0:
        return Sqrt2Scalar(Fraction(2) ** (n // 2))
    return Sqrt2Scalar(0, Fraction(2) ** ((n - 1) // 2))


def pow2(n: int) -> Fraction:
    return Fraction(1 << n) if n >= 0 else Fraction(1, 1 << -n)


ZERO = Sqrt2Scalar(0)
ONE = Sqrt2Scalar(1)
SQRT2 = Sqrt2Scalar(0, 1)
