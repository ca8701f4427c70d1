"""Exact coefficient field: rationals, optionally extended by i.

Every number in the engine is a Gaussian rational a + b*i with exact
rational parts.  Most quantities are real (b = 0); the imaginary unit only
enters through the half-integer-power backend where sqrt(-1) is needed.
Arithmetic never leaves the field and never rounds.
"""

from __future__ import annotations

import math
from fractions import Fraction

try:  # gmpy2.mpq is drop-in compatible with Fraction and much faster
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

__all__ = ["Rat", "rat", "GQ", "FieldError", "rat_sqrt", "rat_from_str", "rat_to_str"]

Rat = _Q


class FieldError(ArithmeticError):
    """Operation leaves the fixed coefficient field (e.g. irrational sqrt)."""


def rat(p, q=None):
    """Exact rational from ints, a Fraction/mpq, or a 'p/q' string."""
    if q is not None:
        return _Q(p, q)
    if isinstance(p, str):
        return _Q(Fraction(p))
    return _Q(p)


def rat_from_str(s):
    return _Q(Fraction(s.strip()))


def rat_to_str(x):
    return str(x) if "/" in str(x) else str(x)


def _isqrt_exact(n):
    # exact integer square root or None
    if n < 0:
        return None
    r = math.isqrt(int(n))
    return r if r * r == n else None


def rat_sqrt(x):
    """Square root of a nonnegative rational; FieldError if irrational."""
    if x < 0:
        raise FieldError("negative radicand for rational sqrt")
    num = _isqrt_exact(x.numerator)
    den = _isqrt_exact(x.denominator)
    if num is None or den is None:
        raise FieldError("rational %s is not a perfect square" % (x,))
    return _Q(num, den)


class GQ:
    """Gaussian rational a + b*i, the coefficient scalar of the engine."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_Q(0)) else rat(re)
        self.im = im if type(im) is type(_Q(0)) else rat(im)

    # -- constructors ----------------------------------------------------
    @staticmethod
    def from_rat(x):
        return GQ(x)

    @staticmethod
    def i():
        return GQ(0, 1)

    @staticmethod
    def zero():
        return _ZERO

    @staticmethod
    def one():
        return _ONE

    # -- ring protocol (shared with Series and the jet/dual wrappers) ----
    def zero_like(self):
        return _ZERO

    def one_like(self):
        return _ONE

    def is_zero(self):
        return not self.re and not self.im

    def rational_order0(self):
        """Rational part of the order-0 value; used by quotient-ring lifts."""
        if self.im:
            raise FieldError("nonreal scalar where a rational was required")
        return self.re

    def const_like(self, q):
        return GQ(q)

    def content_valuation(self):
        return None if self.is_zero() else 0

    def shift_valuation(self, k):
        if k:
            raise FieldError("bare scalars carry no expansion variable")
        return self

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.im and not other.im:
            return GQ(self.re * other.re)
        return GQ(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.im:
            if not other.re:
                raise ZeroDivisionError("division by zero scalar")
            return GQ(self.re / other.re, self.im / other.re)
        n = other.re * other.re + other.im * other.im
        return GQ(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return GQ(-self.re, -self.im)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out, base = _ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure ---------------------------------------------------------
    def conj(self):
        return GQ(self.re, -self.im)

    def is_real(self):
        return not self.im

    def sqrt(self):
        """Principal square root inside the Gaussian field, or FieldError."""
        if not self.im:
            if self.re >= 0:
                return GQ(rat_sqrt(self.re))
            return GQ(0, rat_sqrt(-self.re))
        # sqrt(a+bi) = x+yi with x^2 = (a+|z|)/2, y = b/(2x); |z| must be rational
        n = rat_sqrt(self.re * self.re + self.im * self.im)
        x2 = (self.re + n) / 2
        x = rat_sqrt(x2)
        if not x:
            raise FieldError("no Gaussian square root")
        y = self.im / (2 * x)
        return GQ(x, y)

    # -- comparisons / hashing ----------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    # -- text -----------------------------------------------------------------
    def __repr__(self):
        return "GQ(%s)" % self.to_str()

    def to_str(self):
        """Serialize as 'p/q' or 'p/q+r/s i' (exact round-trip)."""
        if not self.im:
            return str(self.re)
        if not self.re:
            return "%s i" % (self.im,)
        sign = "+" if self.im >= 0 else "-"
        return "%s%s%s i" % (self.re, sign, abs(self.im))

    @staticmethod
    def from_str(s):
        s = s.strip()
        if s.endswith("i"):
            body = s[:-1].strip()
            # split at the last +/- that is not the leading sign or inside a fraction
            for k in range(len(body) - 1, 0, -1):
                if body[k] in "+-" and body[k - 1] not in "+-/":
                    re_part = body[:k].strip()
                    im_part = (body[k] + body[k + 1 :]).strip()
                    return GQ(rat_from_str(re_part), rat_from_str(im_part or "1"))
            return GQ(0, rat_from_str(body or "1"))
        return GQ(rat_from_str(s))


def _coerce(x):
    if isinstance(x, GQ):
        return x
    if isinstance(x, int) or type(x) is type(_Q(0)) or isinstance(x, Fraction):
        return GQ(x)
    return NotImplemented


_ZERO = GQ(0)
_ONE = GQ(1)
