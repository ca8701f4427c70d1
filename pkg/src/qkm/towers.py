"""Small ring extensions layered over series: dual numbers and jets.

``Dual`` carries a value together with its derivative with respect to one
chosen eigenvalue (forward-mode differentiation through any series
computation: solver sweeps, root-symmetric products, logs).

``Jet`` adjoins up to three pairwise-annihilating nilpotents; the
coefficient of the top product is the corresponding mixed partial
derivative.  Used for the closed-form three-point correlator, where three
first derivatives act on a rational expression.

Both satisfy the coefficient-ring protocol of ``Series``/``Poly``:
+, -, *, /, is_zero, zero_like, one_like, const_like, content_valuation,
shift_valuation, rational_order0.
"""

from __future__ import annotations

from .scalars import rat
from .series import Series

__all__ = ["Dual", "Jet"]

_RATLIKE = ("mpq", "Fraction")


def _is_ratlike(x):
    return isinstance(x, int) or type(x).__name__ in _RATLIKE


class Dual:
    __slots__ = ("val", "der")

    def __init__(self, val, der):
        self.val = val
        self.der = der

    @staticmethod
    def lift(x):
        return Dual(x, x.zero_like())

    @staticmethod
    def seed(x):
        return Dual(x, x.one_like())

    # ---------------------------------------------------------------- ring
    def __add__(self, other):
        if not isinstance(other, Dual):
            return NotImplemented
        return Dual(self.val + other.val, self.der + other.der)

    def __sub__(self, other):
        if not isinstance(other, Dual):
            return NotImplemented
        return Dual(self.val - other.val, self.der - other.der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __mul__(self, other):
        if not isinstance(other, Dual):
            if _is_ratlike(other):
                return Dual(self.val * other, self.der * other)
            return NotImplemented
        return Dual(
            self.val * other.val, self.der * other.val + self.val * other.der
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Dual):
            if _is_ratlike(other):
                return self * rat(1, other) if isinstance(other, int) else self * (1 / rat(other))
            return NotImplemented
        q = self.val / other.val
        return Dual(q, (self.der - q * other.der) / other.val)

    # ------------------------------------------------------------- protocol
    def is_zero(self):
        return self.val.is_zero() and self.der.is_zero()

    def zero_like(self):
        return Dual(self.val.zero_like(), self.val.zero_like())

    def one_like(self):
        return Dual(self.val.one_like(), self.val.zero_like())

    def const_like(self, q):
        return Dual(self.val.const_like(q), self.val.zero_like())

    def content_valuation(self):
        vs = [v for v in (self.val.content_valuation(), self.der.content_valuation()) if v is not None]
        return min(vs) if vs else None

    def shift_valuation(self, k):
        return Dual(self.val.shift_valuation(k), self.der.shift_valuation(k))

    def rational_order0(self):
        # quotient-ring base inversion works from the value part; the dual
        # part is nilpotent and is absorbed by the lifting iteration
        return self.val.rational_order0()

    # ------------------------------------------------------------- extras
    def log(self):
        """log of a dual whose value part has constant term 1."""
        return Dual(self.val.log(), self.der / self.val)

    def sqrt(self):
        r = self.val.sqrt()
        return Dual(r, self.der / (r + r) if not self.der.is_zero() else self.der)

    def __repr__(self):
        return "Dual(val=%r, der=%r)" % (self.val, self.der)


class Jet:
    """Truncated polynomial in nilpotents eta_0..eta_{n-1} (eta_i^2 = 0)."""

    __slots__ = ("ndir", "comps")

    def __init__(self, ndir, comps):
        self.ndir = ndir
        sample = next(iter(comps.values()))
        filtered = {k: v for k, v in comps.items() if not v.is_zero()}
        self.comps = filtered if filtered else {frozenset(): sample.zero_like()}

    @staticmethod
    def lift(ndir, x):
        return Jet(ndir, {frozenset(): x})

    @staticmethod
    def variable(ndir, x, direction):
        """x + eta_direction (seed for a first derivative in one slot)."""
        return Jet(ndir, {frozenset(): x, frozenset([direction]): x.one_like()})

    def body(self):
        got = self.comps.get(frozenset())
        if got is not None:
            return got
        return next(iter(self.comps.values())).zero_like()

    def part(self, dirs):
        got = self.comps.get(frozenset(dirs))
        if got is not None:
            return got
        return self.body().zero_like()

    # ---------------------------------------------------------------- ring
    def _zip(self, other, op):
        keys = set(self.comps) | set(other.comps)
        z = self.body().zero_like()
        out = {}
        for k in keys:
            out[k] = op(self.comps.get(k, z), other.comps.get(k, z))
        return Jet(self.ndir, out)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return Jet(self.ndir, {k: -v for k, v in self.comps.items()})

    def __mul__(self, other):
        if not isinstance(other, Jet):
            if _is_ratlike(other):
                return Jet(self.ndir, {k: v * other for k, v in self.comps.items()})
            return NotImplemented
        out = {}
        for ka, va in self.comps.items():
            if va.is_zero():
                continue
            for kb, vb in other.comps.items():
                if vb.is_zero() or (ka & kb):
                    continue
                key = ka | kb
                prod = va * vb
                out[key] = out[key] + prod if key in out else prod
        if not out:
            out = {frozenset(): self.body().zero_like()}
        return Jet(self.ndir, out)

    __rmul__ = __mul__

    def invert(self):
        b = self.body()
        binv = b.one_like() / b
        # n = 1 - self/b is nilpotent; geometric series terminates
        one = self.one_like()
        n = one - self * Jet.lift(self.ndir, binv)
        acc = one
        power = n
        for _ in range(self.ndir):
            acc = acc + power
            power = power * n
        return acc * Jet.lift(self.ndir, binv)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            if _is_ratlike(other):
                inv = 1 / rat(other)
                return Jet(self.ndir, {k: v * inv for k, v in self.comps.items()})
            return NotImplemented
        return self * other.invert()

    # ------------------------------------------------------------- protocol
    def is_zero(self):
        return all(v.is_zero() for v in self.comps.values())

    def zero_like(self):
        return Jet(self.ndir, {frozenset(): self.body().zero_like()})

    def one_like(self):
        return Jet(self.ndir, {frozenset(): self.body().one_like()})

    def const_like(self, q):
        return Jet(self.ndir, {frozenset(): self.body().const_like(q)})

    def content_valuation(self):
        vs = [v.content_valuation() for v in self.comps.values()]
        vs = [v for v in vs if v is not None]
        return min(vs) if vs else None

    def shift_valuation(self, k):
        return Jet(self.ndir, {key: v.shift_valuation(k) for key, v in self.comps.items()})

    def rational_order0(self):
        return self.body().rational_order0()

    def __repr__(self):
        keys = sorted(self.comps, key=lambda k: (len(k), sorted(k)))
        return "Jet(%s)" % ", ".join(
            "%s:%r" % (sorted(k) if k else "1", self.comps[k]) for k in keys
        )
