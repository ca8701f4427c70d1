"""Rational functions of a branch point, summed over all branch points.

The branch points are the roots of the monic numerator P of x'; nothing
here ever extracts a root.  Every expression lives in the quotient ring
R[z]/(P) (bounded degree, one valuation-pivoted inversion per division),
and the final sum over roots is the trace.  Sums over the other roots
evaluated at a root are rewritten through P itself:

    sum_j 1/(w + beta_j)   = -P'(-w)/P(-w)
    sum_j 1/(w + beta_j)^2 = (P'(-w)^2 - P''(-w) P(-w))/P(-w)^2
    sum_{j!=i} 1/(beta_i - beta_j)^2 = P''^2/(4 P'^2) - P'''/(3 P') at beta_i
"""

from __future__ import annotations

from .poly import Poly, QuotientRing
from .series import Series
from .spectral import LAMBDA

__all__ = ["RootCalculus"]


class RootCalculus:
    """Quotient-ring calculus for one deformation's branch points."""

    def __init__(self, deformation):
        self.de = deformation
        self.P = deformation.xprime_numerator()
        self.qr = QuotientRing(self.P)
        self.order = deformation.order
        self._xd = {}

    # -- building blocks ---------------------------------------------------
    def one(self):
        return Series.const(LAMBDA, 1, self.order)

    def _series(self, c):
        return c if isinstance(c, Series) else Series.const(LAMBDA, c, self.order)

    def const(self, c):
        return self.qr.of_const(self._series(c))

    def sym(self, shift=None):
        """The root symbol beta (+ shift) as a ring element."""
        return self.qr.generator(None if shift is None else self._series(shift))

    def xderiv(self, n, mirrored=False):
        """x^(n) at the root symbol; mirrored: x^(n)(-beta)."""
        key = (n, mirrored)
        if key not in self._xd:
            f = self.de.x_deriv(n)
            if mirrored:
                f = f.neg_arg()
            self._xd[key] = self.qr.of_ratfunc(f)
        return self._xd[key]

    # -- sums over the other roots, as functions of the root symbol --------
    def sum_inv_w_plus_roots(self):
        """beta -> sum_j 1/(beta + beta_j)."""
        return -(self.qr.reduce(self.P.derivative().neg_arg()) / self.qr.reduce(self.P.neg_arg()))

    def sum_inv_sq_w_plus_roots(self):
        """beta -> sum_j 1/(beta + beta_j)^2."""
        pm = self.qr.reduce(self.P.neg_arg())
        pm1 = self.qr.reduce(self.P.derivative().neg_arg())
        pm2 = self.qr.reduce(self.P.derivative().derivative().neg_arg())
        return (pm1 * pm1 - pm2 * pm) / (pm * pm)

    def sum_inv_sq_offdiag(self):
        """beta_i -> sum_{j != i} 1/(beta_i - beta_j)^2."""
        p1 = self.qr.reduce(self.P.derivative())
        p2 = self.qr.reduce(self.P.derivative().derivative())
        p3 = self.qr.reduce(self.P.derivative().derivative().derivative())
        return (p2 * p2) / (p1 * p1 * 4) - p3 / (p1 * 3)

    def sum_inv_eigen(self, power, sign=+1):
        """beta -> sum_k 1/(eps_k + sign*beta)^power."""
        acc = None
        one = self.one()
        for eps in self.de.eps:
            lin = self.qr.reduce(
                Poly([eps, one if sign > 0 else -one])
            )
            term = lin.pow_int(-power)
            acc = term if acc is None else acc + term
        return acc

    # -- the summation ------------------------------------------------------
    def sum_over_roots(self, el):
        return el.trace()
