"""Polynomials and rational functions in one symbol over series coefficients.

The symbol (canonically z) is polynomial only; coefficients live in the
truncated-series field (or any ring with the same protocol: duals, jets).
Symmetric functions of the roots of a monic polynomial P are evaluated
without extracting roots:

* power sums via Newton's identities,
* sums of a rational function over the roots via the trace of
  multiplication in the quotient ring (``trace_over_roots``), with the
  inverse of the denominator obtained by a quadratic lift from its exact
  order-0 rational inverse,
* products over roots via the determinant of multiplication
  (``product_over_roots``), equivalently the resultant for monic P.

Coefficients are allowed to carry overall powers of the expansion variable
(positive or negative); denominators whose content is a pure power of the
variable are inverted by stripping that valuation first.
"""

from __future__ import annotations

from itertools import permutations

from .scalars import GQ, rat, Rat, FieldError
from .series import Series

__all__ = [
    "Poly",
    "RatFunc",
    "QuotientRing",
    "QRElement",
    "invert_mod",
    "trace_over_roots",
    "product_over_roots",
]


class Poly:
    """Dense polynomial a0 + a1*z + ... over a coefficient ring."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = coeffs

    # ------------------------------------------------------------------
    @staticmethod
    def from_roots(roots, one):
        """Monic polynomial with the given roots (coefficient ring elements)."""
        p = Poly([one])
        for r in roots:
            p = p * Poly([-r, one])
        return p

    @staticmethod
    def constant(c):
        return Poly([c])

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return len(self.coeffs) - 1

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self._zero()

    def _zero(self):
        if not self.coeffs:
            raise ValueError("cannot infer coefficient ring from zero polynomial")
        return self.coeffs[0].zero_like()

    def _one(self):
        return self.coeffs[0].one_like()

    # ------------------------------------------------------------------
    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else None
            b = other.coeffs[k] if k < len(other.coeffs) else None
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return Poly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [self._zero() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return Poly(out)

    def scale(self, c):
        return Poly([x * c for x in self.coeffs])

    def shift_var(self):
        """Multiply by z."""
        if self.is_zero():
            return self
        return Poly([self._zero()] + self.coeffs)

    def monic(self):
        """Divide by the leading coefficient (must be invertible)."""
        lc = self.lc()
        inv = lc.one_like() / lc
        return Poly([c * inv for c in self.coeffs])

    def neg_arg(self):
        """p(-z)."""
        return Poly([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)])

    def derivative(self):
        return Poly([c * k for k, c in enumerate(self.coeffs[1:], start=1)])

    def eval(self, x, lift=None):
        """Horner evaluation at a ring element x; ``lift`` maps coefficients
        into x's ring when the two differ."""
        if not self.coeffs:
            return x.zero_like()
        conv = lift if lift is not None else (lambda c: c)
        acc = conv(self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + conv(c)
        return acc

    def divmod_monic(self, m):
        """Division with remainder by a monic polynomial (no inversions)."""
        if self.is_zero():
            return Poly([]), Poly([])
        if not (m.lc() - m.lc().one_like()).is_zero():
            raise ValueError("divisor must be monic")
        dm = m.degree()
        rem = list(self.coeffs)
        quo = [self._zero()] * max(0, len(rem) - dm)
        for k in range(len(rem) - 1, dm - 1, -1):
            c = rem[k]
            if c.is_zero():
                continue
            quo[k - dm] = c
            for j in range(dm + 1):
                rem[k - dm + j] = rem[k - dm + j] - c * m.coeffs[j]
        return Poly(quo), Poly(rem[:dm])

    def mod_monic(self, m):
        return self.divmod_monic(m)[1]

    def __repr__(self):
        return "Poly(%r)" % (self.coeffs,)


# ----------------------------------------------------------------- rational


class RatFunc:
    """Numerator/denominator pair, kept unreduced (degrees stay desk-scale;
    gcd reduction would need nothing the evaluators don't already check)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def from_poly(p):
        if p.is_zero():
            raise ValueError("build zero via RatFunc.zero_like patterns")
        return RatFunc(p, Poly([p._one()]))

    def __add__(self, other):
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            return RatFunc(self.num * other, self.den)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            return RatFunc(self.num, self.den * other)
        if other.num.is_zero():
            raise ZeroDivisionError
        return RatFunc(self.num * other.den, self.den * other.num)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def scale(self, c):
        return RatFunc(self.num.scale(c), self.den)

    def neg_arg(self):
        return RatFunc(self.num.neg_arg(), self.den.neg_arg())

    def derivative(self):
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def eval(self, x, lift=None):
        return self.num.eval(x, lift) / self.den.eval(x, lift)

    def __repr__(self):
        return "RatFunc(%r / %r)" % (self.num.coeffs, self.den.coeffs)


# ------------------------------------------------------- symmetric functions


def newton_power_sums(p_monic, upto):
    """Power sums p_0..p_upto of the roots of a monic polynomial."""
    d = p_monic.degree()
    one = p_monic._one()
    # e_k with sign: p(z) = z^d + c_{d-1} z^{d-1} + ...; a_j := coeff(d - j)
    a = [p_monic.coeff(d - j) for j in range(d + 1)]
    sums = [one * d]
    for m in range(1, upto + 1):
        acc = a[m] * (-m) if m <= d else None
        for j in range(1, min(m, d) + 1):
            if m - j < 1:
                continue
            t = a[j] * sums[m - j]
            acc = -t if acc is None else acc - t
        if acc is None:
            acc = one.zero_like()
        sums.append(acc)
    return sums


def poly_content_valuation(p):
    """Minimal series-valuation over the coefficients (None if p == 0)."""
    vals = [v for v in (c.content_valuation() for c in p.coeffs) if v is not None]
    return min(vals) if vals else None


def poly_shift_valuation(p, k):
    return Poly([c.shift_valuation(k) for c in p.coeffs])


def invert_mod(b, p_monic, base_ring_from_rat=None):
    """Inverse of b in R[z]/(p), solving the multiplication linear system by
    Gaussian elimination with minimal-valuation pivoting.

    Valuation pivoting makes elements whose per-root values carry fractional
    coupling valuations (e.g. powers of z+eps, whose square reduces to a
    multiple of the coupling) invertible whenever the determinant of
    multiplication is nonzero to the window; the window shrinks only by the
    honest content of that determinant.
    """
    b = b.mod_monic(p_monic)
    if b.is_zero():
        raise ZeroDivisionError("denominator is zero modulo P")
    d = p_monic.degree()
    cols = []
    col = b
    for _ in range(d):
        cols.append([col.coeff(i) for i in range(d)])
        col = col.shift_var().mod_monic(p_monic)
    one = p_monic._one()
    zero = one.zero_like()
    # augmented system: sum_j M[i][j] x_j = e0[i]
    rows = [[cols[j][i] for j in range(d)] + [one if i == 0 else zero] for i in range(d)]
    for c in range(d):
        pivot_row, pivot_val = None, None
        for r in range(c, d):
            v = rows[r][c].content_valuation()
            if v is not None and (pivot_val is None or v < pivot_val):
                pivot_row, pivot_val = r, v
        if pivot_row is None:
            raise FieldError(
                "denominator not invertible modulo P to the truncation window "
                "(ramification-point collision)"
            )
        rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
        piv = rows[c][c]
        for r in range(c + 1, d):
            head = rows[r][c]
            if head.is_zero():
                continue
            factor = head / piv
            rows[r] = [
                rows[r][k] - factor * rows[c][k] for k in range(d + 1)
            ]
    xs = [zero] * d
    for c in range(d - 1, -1, -1):
        acc = rows[c][d]
        for k in range(c + 1, d):
            acc = acc - rows[c][k] * xs[k]
        xs[c] = acc / rows[c][c]
    return Poly(xs)


def trace_over_roots(p, f):
    """Sum of f over the roots of p (monic after normalization).

    f is a RatFunc in the same symbol; its denominator must be invertible
    in the quotient ring to the window.  No root is ever extracted.
    """
    pm = p.monic()
    sample = pm.coeffs[0]
    den_inv = invert_mod(f.den, pm)
    g = (f.num.mod_monic(pm) * den_inv).mod_monic(pm)
    if g.is_zero():
        return sample.zero_like()
    d = pm.degree()
    sums = newton_power_sums(pm, d - 1)
    acc = None
    for k, c in enumerate(g.coeffs):
        t = c * sums[k]
        acc = t if acc is None else acc + t
    return acc


class QuotientRing:
    """Arithmetic in R[z]/(P) for a monic P, with root-sum extraction.

    Keeping every root-function reduced (degree < deg P) stops the
    denominator pile-up that plain num/den arithmetic produces, and the
    valuation-pivoted inversion tolerates elements whose per-root values
    carry fractional coupling content.
    """

    def __init__(self, p):
        self.pm = p.monic()
        self.d = self.pm.degree()
        self._sums = newton_power_sums(self.pm, self.d - 1)
        self._one = self.pm._one()

    def reduce(self, poly):
        return QRElement(self, poly.mod_monic(self.pm))

    def of_const(self, c):
        return QRElement(self, Poly([c]))

    def generator(self, shift=None):
        coeffs = [self._one.zero_like() if shift is None else shift, self._one]
        return self.reduce(Poly(coeffs))

    def of_ratfunc(self, f):
        return self.reduce(f.num) / self.reduce(f.den)

    def trace(self, el):
        acc = None
        for k, c in enumerate(el.vec.coeffs):
            t = c * self._sums[k]
            acc = t if acc is None else acc + t
        return acc if acc is not None else self._one.zero_like()


class QRElement:
    __slots__ = ("ring", "vec")

    def __init__(self, ring, vec):
        self.ring = ring
        self.vec = vec

    def __add__(self, other):
        return QRElement(self.ring, self.vec + other.vec)

    def __sub__(self, other):
        return QRElement(self.ring, self.vec - other.vec)

    def __neg__(self):
        return QRElement(self.ring, -self.vec)

    def __mul__(self, other):
        if not isinstance(other, QRElement):
            return QRElement(self.ring, self.vec.scale(other))
        return QRElement(self.ring, (self.vec * other.vec).mod_monic(self.ring.pm))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, QRElement):
            return QRElement(self.ring, self.vec.scale(rat(1, 1) / rat(other)))
        inv = invert_mod(other.vec, self.ring.pm)
        return QRElement(self.ring, (self.vec * inv).mod_monic(self.ring.pm))

    def inv(self):
        return QRElement(self.ring, invert_mod(self.vec, self.ring.pm))

    def pow_int(self, k):
        if k < 0:
            return self.inv().pow_int(-k)
        out = QRElement(self.ring, Poly([self.ring._one]))
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def trace(self):
        return self.ring.trace(self)

    def __repr__(self):
        return "QRElement(%r)" % (self.vec,)


def product_over_roots(p, g):
    """Product of g over the roots of p: det of multiplication by g mod p.

    Equals Res(p, g) / lc(p)^{deg g} for the normalized monic p.  The
    determinant is expanded over permutations (degrees here are tiny),
    which keeps the routine division-free and valid over duals/jets.
    """
    pm = p.monic()
    d = pm.degree()
    gm = g.mod_monic(pm)
    cols = []
    col = gm
    for _ in range(d):
        cols.append([col.coeff(i) for i in range(d)])
        col = col.shift_var().mod_monic(pm)
    zero = pm.coeffs[0].zero_like()
    acc = zero
    for perm in permutations(range(d)):
        sign = _perm_sign(perm)
        term = None
        for i in range(d):
            c = cols[perm[i]][i]
            if c.is_zero():
                term = None
                break
            term = c if term is None else term * c
        if term is None:
            continue
        acc = acc + term if sign > 0 else acc - term
    return acc


def _perm_sign(perm):
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign
