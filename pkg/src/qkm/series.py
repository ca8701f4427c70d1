"""Truncated Laurent series in one named formal variable.

A ``Series`` stores exact coefficients for v^lo .. v^(order-1) and claims
nothing beyond ``order`` (the first unknown exponent).  All operations
propagate the truncation window honestly: a product knows min(lo_a+ord_b,
lo_b+ord_a), a quotient keeps the relative precision of its least precise
operand, and asking for a coefficient at or past ``order`` raises.

Coefficients are any ring elements implementing +,-,*,/ together with
``is_zero``/``zero_like``/``one_like`` (GQ scalars, nested Series, dual
numbers, jets), so short coefficient towers come for free.

Half-integer powers are realized by the substitution h^2 = lambda over the
Gaussian scalars (``lift_to_h`` / ``drop_to_lambda``), not by a dedicated
Puiseux type.
"""

from __future__ import annotations

from .scalars import GQ, rat, FieldError

__all__ = ["Series", "PrecisionError"]

_RATLIKE = ("mpq", "Fraction")


class PrecisionError(ArithmeticError):
    """A coefficient beyond the known truncation window was requested."""


def _is_ratlike(x):
    return isinstance(x, int) or type(x).__name__ in _RATLIKE


class Series:
    __slots__ = ("var", "lo", "coeffs", "order")

    def __init__(self, var, lo, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = lo + len(coeffs)
        if order < lo + len(coeffs):
            coeffs = coeffs[: max(0, order - lo)]
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
            lo += 1
        if not coeffs:
            lo = order
        self.var = var
        self.lo = lo
        self.coeffs = coeffs
        self.order = order

    # ------------------------------------------------------------------ build
    @staticmethod
    def const(var, value, order):
        if _is_ratlike(value) or isinstance(value, str):
            value = GQ(rat(value))
        if order <= 0:
            return Series(var, order, [], order)
        return Series(var, 0, [value], order)

    @staticmethod
    def zero(var, order):
        return Series(var, order, [], order)

    @staticmethod
    def gen(var, order, scalar_one=None):
        """The variable itself, v, known to ``order``."""
        one = scalar_one if scalar_one is not None else GQ.one()
        return Series(var, 1, [one], order)

    @staticmethod
    def from_terms(var, terms, order):
        """terms: iterable of (exponent, coefficient)."""
        terms = [(e, c) for e, c in terms if e < order]
        if not terms:
            return Series.zero(var, order)
        terms.sort(key=lambda t: t[0])
        lo = terms[0][0]
        hi = terms[-1][0]
        sample = terms[0][1]
        coeffs = [sample.zero_like() for _ in range(hi - lo + 1)]
        for e, c in terms:
            coeffs[e - lo] = coeffs[e - lo] + c
        return Series(var, lo, coeffs, order)

    # ------------------------------------------------------------------ info
    def is_zero(self):
        return not self.coeffs

    def zero_like(self):
        return Series(self.var, self.order, [], self.order)

    def one_like(self):
        one = self.coeffs[0].one_like() if self.coeffs else GQ.one()
        return Series(self.var, 0, [one], max(self.order, 1))

    def valuation(self):
        """Exponent of the first nonzero known coefficient, None if all zero."""
        return self.lo if self.coeffs else None

    def _zero_coeff(self):
        return self.coeffs[0].zero_like() if self.coeffs else GQ.zero()

    def coeff(self, e):
        """Coefficient of v^e; raises PrecisionError past the window."""
        if e >= self.order:
            raise PrecisionError(
                "coefficient of %s^%d unknown (order %d)" % (self.var, e, self.order)
            )
        if e < self.lo or e - self.lo >= len(self.coeffs):
            return self._zero_coeff()
        return self.coeffs[e - self.lo]

    def coeff_or_zero(self, e):
        if e < self.lo:
            return self._zero_coeff()
        return self.coeff(e)

    def terms(self):
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield self.lo + k, c

    # ------------------------------------------------------------- arithmetic
    def _check(self, other):
        if self.var != other.var:
            raise ValueError("variable mismatch: %s vs %s" % (self.var, other.var))

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        if not self.coeffs and not other.coeffs:
            return Series(self.var, order, [], order)
        lo = min((s.lo for s in (self, other) if s.coeffs), default=order)
        lo = min(lo, order)
        sample = self.coeffs[0] if self.coeffs else other.coeffs[0]
        out = [sample.zero_like() for _ in range(order - lo)]
        for src in (self, other):
            for k, c in enumerate(src.coeffs):
                e = src.lo + k
                if lo <= e < order:
                    out[e - lo] = out[e - lo] + c
        return Series(self.var, lo, out, order)

    def __sub__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Series(self.var, self.lo, [-c for c in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, Series):
            # ints, rationals, GQ, or any coefficient-ring element
            return self.scale(other)
        self._check(other)
        if not self.coeffs or not other.coeffs:
            order = min(self.order + other.lo, other.order + self.lo)
            return Series(self.var, order, [], order)
        order = min(self.lo + other.order, other.lo + self.order)
        lo = self.lo + other.lo
        sample = self.coeffs[0]
        out = [sample.zero_like() for _ in range(order - lo)]
        n = len(out)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            base = i  # (self.lo+i)+(other.lo+j) - lo == i+j
            jmax = min(len(other.coeffs), n - base)
            for j in range(jmax):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[base + j] = out[base + j] + a * b
        return Series(self.var, lo, out, order)

    __rmul__ = __mul__

    def scale(self, c):
        """Multiply every coefficient by c (int, rational, or ring element)."""
        if not self.coeffs:
            return self
        if _is_ratlike(c) and isinstance(self.coeffs[0], GQ):
            c = GQ(rat(c))
        return Series(self.var, self.lo, [x * c for x in self.coeffs], self.order)

    def shift(self, k):
        """Multiply by v^k (exact exponent shift)."""
        return Series(self.var, self.lo + k, list(self.coeffs), self.order + k)

    def invert(self):
        """Reciprocal; requires a nonzero coefficient in the window."""
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError(
                "division by a series that is zero to its truncation order"
            )
        n = self.order - v  # relative precision
        u = [self.coeff(v + k) for k in range(n)]
        b0 = u[0]
        inv0 = b0.one_like() / b0
        out = [inv0]
        for m in range(1, n):
            s = None
            for k in range(1, m + 1):
                t = u[k] * out[m - k]
                s = t if s is None else s + t
            out.append(-(s * inv0))
        return Series(self.var, -v, out, -v + n)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            if _is_ratlike(other):
                return self.scale(rat(1, 1) / rat(other))
            if isinstance(other, GQ):
                return self.scale(GQ(1) / other)
            return NotImplemented
        return self * other.invert()

    def pow_int(self, n):
        if n < 0:
            return self.invert().pow_int(-n)
        if n == 0:
            return self.one_like().truncate(max(self.order, 1))
        out, base = None, self
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # ------------------------------------------------------------- calculus
    def derivative(self):
        out = [c * (self.lo + k) for k, c in enumerate(self.coeffs)]
        return Series(self.var, self.lo - 1, out, self.order - 1)

    def integrate(self):
        """Antiderivative with zero constant; exponent -1 must be absent."""
        out = []
        for k, c in enumerate(self.coeffs):
            e = self.lo + k
            if e == -1:
                if not c.is_zero():
                    raise ValueError("residue obstructs integration")
                out.append(c)
            else:
                out.append(c * rat(1, e + 1))
        return Series(self.var, self.lo + 1, out, self.order + 1)

    def sqrt(self):
        """Square root staying in the field: even valuation, square lead."""
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("sqrt of zero-to-truncation series")
        if v % 2:
            raise FieldError("odd valuation: no sqrt in the Laurent ring")
        n = self.order - v
        u = [self.coeff(v + k) for k in range(n)]
        s0 = u[0].sqrt()
        inv2s0 = s0.one_like() / (s0 + s0)
        out = [s0]
        for m in range(1, n):
            acc = u[m]
            for k in range(1, m):
                acc = acc - out[k] * out[m - k]
            out.append(acc * inv2s0)
        return Series(self.var, v // 2, out, v // 2 + n)

    def log(self):
        """log of a series with constant term 1 (log-derivative definition)."""
        if self.valuation() != 0 or not (self.coeff(0) - self.coeff(0).one_like()).is_zero():
            raise ValueError("series_log requires constant term 1")
        return (self.derivative() / self).integrate()

    def exp(self):
        """exp of a series with positive valuation, term by term."""
        v = self.valuation()
        if v is not None and v <= 0:
            raise ValueError("series_exp requires positive valuation")
        order = self.order
        one = (self.coeffs[0] if self.coeffs else GQ.zero()).one_like()
        ap = self.derivative()
        coeffs = [one]
        for m in range(1, order):
            acc = None
            for k in range(1, m + 1):
                c_ap = ap.coeff_or_zero(k - 1)
                t = c_ap * coeffs[m - k]
                acc = t if acc is None else acc + t
            if acc is None:
                acc = one.zero_like()
            coeffs.append(acc * rat(1, m))
        return Series(self.var, 0, coeffs, order)

    def compose(self, inner):
        """self(inner); inner must have positive valuation."""
        self._check(inner)
        if self.lo < 0 and self.coeffs:
            raise ValueError("compose: outer series must be a power series")
        vb = inner.valuation()
        if vb is None or vb < 1:
            raise ValueError("compose: inner series needs positive lowest exponent")
        cap = min(vb * self.order, inner.order)
        acc = Series.zero(self.var, cap)
        for e in range(self.order - 1, self.lo - 1, -1):
            acc = acc * inner + Series(self.var, 0, [self.coeff(e)], cap)
        if self.lo > 0:
            acc = acc * inner.pow_int(self.lo)
        return acc.truncate(cap)

    def revert(self):
        """Compositional inverse of c1*v + O(v^2), c1 invertible."""
        if self.valuation() != 1:
            raise ValueError("revert requires a series of valuation exactly 1")
        c1 = self.coeff(1)
        inv_c1 = c1.one_like() / c1
        order = self.order
        g = Series(self.var, 1, [inv_c1], 2)
        for target in range(3, order + 1):
            g = Series(self.var, g.lo, list(g.coeffs), target)
            err = self.compose(g) - Series.gen(self.var, target, c1.one_like())
            n = target - 1
            c_err = err.coeff_or_zero(n) if n < err.order else err._zero_coeff()
            g = g - Series(self.var, n, [c_err * inv_c1], target)
        return g

    def residue(self):
        """Coefficient of exponent -1 (0 if provably absent)."""
        if -1 >= self.order:
            raise PrecisionError("residue unknown at this truncation")
        return self.coeff_or_zero(-1)

    # ------------------------------------------------- variable substitution
    def lift_to_h(self, hvar="h"):
        """Reinterpret a series in v as one in h with h^2 = v."""
        return Series.from_terms(hvar, [(2 * e, c) for e, c in self.terms()], 2 * self.order)

    def drop_to_lambda(self, lvar="lambda", strict=True):
        """Inverse of lift_to_h; odd powers must vanish (reality check)."""
        if strict:
            for e, c in self.terms():
                if e % 2:
                    raise FieldError(
                        "odd power %s^%d survives; not a series in %s^2"
                        % (self.var, e, self.var)
                    )
        terms = [(e // 2, c) for e, c in self.terms() if e % 2 == 0]
        return Series.from_terms(lvar, terms, -(-self.order // 2))

    def rename(self, var):
        return Series(var, self.lo, list(self.coeffs), self.order)

    def truncate(self, order):
        if order >= self.order:
            return self
        return Series(self.var, self.lo, self.coeffs[: max(0, order - self.lo)], order)

    # --------------------------------------------------------------- checks
    def is_real(self):
        return all(c.is_real() for c in self.coeffs if isinstance(c, GQ))

    def has_only_even_powers(self):
        return all(e % 2 == 0 for e, _ in self.terms())

    def rational_order0(self):
        """Rational value at 0 for order-0 lifts; requires lo >= 0."""
        v = self.valuation()
        if v is not None and v < 0:
            raise FieldError("negative valuation has no order-0 value")
        if self.order <= 0:
            raise PrecisionError("constant term unknown")
        return self.coeff_or_zero(0).rational_order0()

    def const_like(self, q):
        """A constant of this series' shape with exact rational value q."""
        if self.coeffs:
            return Series(self.var, 0, [self.coeffs[0].const_like(q)], self.order)
        return Series.const(self.var, q, self.order)

    def content_valuation(self):
        return self.valuation()

    def shift_valuation(self, k):
        return self.shift(k)

    def eq_window(self, other, upto=None):
        """Equality of all coefficients on the common known window."""
        return self.first_mismatch(other, upto) is None

    def first_mismatch(self, other, upto=None):
        if self.var != other.var:
            raise ValueError("variable mismatch")
        hi = min(self.order, other.order)
        if upto is not None:
            hi = min(hi, upto + 1)
        lo = min(self.lo, other.lo, hi)
        for e in range(lo, hi):
            if not (self.coeff_or_zero(e) - other.coeff_or_zero(e)).is_zero():
                return e
        return None

    # ----------------------------------------------------------------- text
    def __repr__(self):
        return "<Series %s>" % self.to_str()

    def to_str(self):
        parts = []
        for e, c in self.terms():
            cs = c.to_str() if isinstance(c, GQ) else repr(c)
            if e == 0:
                parts.append("(%s)" % cs)
            else:
                parts.append("(%s)*%s^%d" % (cs, self.var, e))
        body = " + ".join(parts) if parts else "0"
        return "%s + O(%s^%d)" % (body, self.var, self.order)

    @staticmethod
    def from_str(text):
        """Parse the exact format produced by ``to_str`` (GQ coefficients)."""
        text = text.strip()
        head, tail = text.rsplit("+ O(", 1)
        var_pow = tail.rstrip(") ")
        var, order = var_pow.split("^")
        order = int(order)
        head = head.strip()
        terms = []
        if head and head != "0":
            for piece in head.split(" + "):
                piece = piece.strip()
                if piece.endswith(")"):
                    terms.append((0, GQ.from_str(piece[1:-1])))
                else:
                    cpart, vpart = piece.rsplit("*", 1)
                    coeff = GQ.from_str(cpart.strip()[1:-1])
                    terms.append((int(vpart.split("^")[1]), coeff))
        if not terms:
            return Series.zero(var, order)
        return Series.from_terms(var, terms, order)

    # ----------------------------------------------------------------- json
    def to_json(self):
        return {
            "variable": self.var,
            "lowest_exponent": self.lo,
            "order": self.order,
            "coefficients": [c.to_str() for c in self.coeffs],
        }

    @staticmethod
    def from_json(obj):
        coeffs = [GQ.from_str(s) for s in obj["coefficients"]]
        return Series(obj["variable"], obj["lowest_exponent"], coeffs, obj["order"])
