"""Deformed spectral data of the quartic matrix model with external field.

The external field has d distinct positive eigenvalues e_k with integer
multiplicities r_k (matrix size N, default sum of the r_k).  The change of
variable x(z) = z - (coupling/N) * sum_k rho_k/(eps_k + z) is fixed by the
two conditions x(eps_k) = e_k and rho_k * x'(eps_k) = r_k, which we solve
as exact power series in the coupling by fixed-point iteration (each sweep
is exact and gains at least one order).

Internally every formula uses the normalized weights rho_k/N, so the
single-eigenvalue case with r = N collapses to weight 1; conversion back
happens only at the I/O boundary.

For d = 1 the two branch points of x are conjugate and are represented as
series in h with h^2 = coupling over the Gaussian scalars, together with
the global coordinate t in which x = -eps + gamma*(t + 1/t) and the sheet
swap is t -> 1/t.
"""

from __future__ import annotations

import json

from .scalars import GQ, rat, rat_sqrt, FieldError
from .series import Series
from .poly import Poly, RatFunc

__all__ = [
    "SpectralInput",
    "Deformation",
    "RamificationData",
    "solve_deformation",
    "closed_form_eps_rho_d1",
    "LAMBDA",
    "HVAR",
]

LAMBDA = "lambda"
HVAR = "h"


class SpectralInput:
    """Validated model data: eigenvalues, multiplicities, N, truncation order."""

    def __init__(self, eigenvalues, multiplicities, n_size=None, order=8):
        if len(eigenvalues) != len(multiplicities):
            raise ValueError("eigenvalues and multiplicities must pair up")
        if not eigenvalues:
            raise ValueError("need at least one eigenvalue")
        es = [rat(e) for e in eigenvalues]
        rs = [int(r) for r in multiplicities]
        if any(e <= 0 for e in es):
            raise ValueError("eigenvalues must be positive")
        if len(set(es)) != len(es):
            raise ValueError("eigenvalues must be pairwise distinct")
        if any(r < 1 for r in rs):
            raise ValueError("multiplicities must be >= 1")
        if int(order) < 1:
            raise ValueError("truncation order must be >= 1")
        self.eigenvalues = es
        self.multiplicities = rs
        self.n_size = rat(n_size) if n_size is not None else rat(sum(rs))
        self.order = int(order)

    @property
    def d(self):
        return len(self.eigenvalues)

    def with_order(self, order):
        return SpectralInput(self.eigenvalues, self.multiplicities, self.n_size, order)

    def with_eigenvalue(self, k, e):
        es = list(self.eigenvalues)
        es[k] = rat(e)
        return SpectralInput(es, self.multiplicities, self.n_size, self.order)

    # JSON config: {"d":..,"N":..,"eigenvalues":[{"e":"1/2","r":1},..],"order":..}
    @staticmethod
    def from_dict(obj):
        eig = obj["eigenvalues"]
        es = [item["e"] for item in eig]
        rs = [item["r"] for item in eig]
        if "d" in obj and int(obj["d"]) != len(es):
            raise ValueError("declared d does not match the eigenvalue list")
        n = obj.get("N")
        order = obj.get("order", 8)
        return SpectralInput(es, rs, n, order)

    @staticmethod
    def from_json(text):
        return SpectralInput.from_dict(json.loads(text))

    def to_dict(self):
        return {
            "d": self.d,
            "N": str(self.n_size),
            "eigenvalues": [
                {"e": str(e), "r": r}
                for e, r in zip(self.eigenvalues, self.multiplicities)
            ],
            "order": self.order,
        }


def default_input(order=8):
    """The single-eigenvalue combinatorial limit with 2e = 1, r = N = 1."""
    return SpectralInput([rat(1, 2)], [1], 1, order)


class Deformation:
    """Solved eps_k, rho_k series plus builders for x and its derivatives."""

    def __init__(self, inp, eps, rho):
        self.input = inp
        self.eps = eps            # list of coupling series
        self.rho = rho            # list of coupling series (un-normalized)
        n = inp.n_size
        self.rho_hat = [r / Series.const(LAMBDA, n, inp.order) for r in rho]

    @property
    def d(self):
        return self.input.d

    @property
    def order(self):
        return self.input.order

    def _one(self):
        return Series.const(LAMBDA, 1, self.order)

    def _lam(self):
        return Series.gen(LAMBDA, self.order)

    # -- x and derivatives as rational functions of z ----------------------
    def x_deriv(self, n):
        """n-th z-derivative of x as a RatFunc over coupling series.

        x(z) = z - lam * sum_k rho_hat_k/(eps_k+z); the k-th derivative of
        1/(eps+z) is (-1)^n n!/(eps+z)^(n+1).
        """
        if n < 0:
            raise ValueError("derivative order must be >= 0")
        one = self._one()
        lam = self._lam()
        lead = Poly([Series.zero(LAMBDA, self.order), one]) if n == 0 else (
            Poly([one]) if n == 1 else Poly([])
        )
        den = Poly([one])
        lin = [Poly([e, one]) for e in self.eps]
        for p in lin:
            for _ in range(n + 1):
                den = den * p
        total_num = Poly([])
        fact = 1
        for m in range(2, n + 1):
            fact *= m
        sign = -1 if n % 2 == 0 else 1  # from -(-1)^n
        for k in range(self.d):
            rest = Poly([one])
            for l, p in enumerate(lin):
                power = n + 1 if l != k else 0
                for _ in range(power):
                    rest = rest * p
            total_num = total_num + rest.scale(self.rho_hat[k])
        total_num = total_num.scale(lam * (sign * fact))
        if not lead.is_zero():
            num = lead * den + total_num
        else:
            num = total_num
        return RatFunc(num, den)

    def x_at(self, point, deriv=0):
        """Evaluate x^(deriv) at an exact point or a series point."""
        f = self.x_deriv(deriv)
        if isinstance(point, Series) and point.var == HVAR:
            return f.eval(point, lift=lambda c: c.lift_to_h(HVAR))
        if isinstance(point, Series):
            return f.eval(point)
        pt = Series.const(LAMBDA, point, self.order)
        return f.eval(pt)

    def xprime_numerator(self):
        """Monic degree-2d numerator P of x'; its roots are the branch points.

        P(z) = prod_k (z+eps_k)^2 + lam * sum_k rho_hat_k prod_{l!=k} (z+eps_l)^2
        """
        one = self._one()
        lam = self._lam()
        lin = [Poly([e, one]) for e in self.eps]
        prod_all = Poly([one])
        for p in lin:
            prod_all = prod_all * p * p
        acc = prod_all
        for k in range(self.d):
            rest = Poly([one])
            for l, p in enumerate(lin):
                if l != k:
                    rest = rest * p * p
            acc = acc + rest.scale(lam * self.rho_hat[k])
        return acc

    # -- residual diagnostics -----------------------------------------------
    def residuals(self):
        """Max failing order of x(eps_k)=e_k and rho_k x'(eps_k)=r_k (None=ok)."""
        worst = None
        for k in range(self.d):
            r1 = self.x_at(self.eps[k]) - Series.const(
                LAMBDA, self.input.eigenvalues[k], self.order
            )
            r2 = self.rho[k] * self.x_at(self.eps[k], deriv=1) - Series.const(
                LAMBDA, self.input.multiplicities[k], self.order
            )
            for r in (r1, r2):
                v = r.valuation()
                if v is not None and (worst is None or v < worst):
                    worst = v
        return worst

    def ramification(self):
        return RamificationData(self)


class RamificationData:
    """Branch-point data: the numerator polynomial P at any d; for d = 1
    also the conjugate branch points and branch values as h-series."""

    def __init__(self, deformation):
        self.deformation = deformation
        self.P = deformation.xprime_numerator()
        self.gamma = None
        self.beta_plus = None
        self.beta_minus = None
        self.b_plus = None
        self.b_minus = None
        if deformation.d == 1:
            self._populate_d1()

    def _populate_d1(self):
        de = self.deformation
        horder = 2 * de.order
        rho_hat_h = de.rho_hat[0].lift_to_h(HVAR)
        try:
            root = rho_hat_h.sqrt()
        except FieldError as exc:
            raise FieldError(
                "weight/N ratio must be a perfect square at order 0 "
                "(use r = N in the single-eigenvalue case): %s" % exc
            )
        # gamma = i*h*sqrt(rho_hat); gamma^2 = -lam*rho_hat
        i_h = Series.from_terms(HVAR, [(1, GQ.i())], horder)
        self.gamma = i_h * root
        eps_h = de.eps[0].lift_to_h(HVAR)
        self.beta_plus = -eps_h + self.gamma
        self.beta_minus = -eps_h - self.gamma
        self.b_plus = -eps_h + self.gamma.scale(2)
        self.b_minus = -eps_h - self.gamma.scale(2)

    def branch_points_h(self):
        if self.deformation.d != 1:
            raise ValueError("individual branch points are exposed only at d=1")
        return [self.beta_plus, self.beta_minus]


class Zhukovsky:
    """Global coordinate for d = 1: z(t) = -eps + gamma*t, x = -eps + gamma(t+1/t),
    sheet swap t -> 1/t, branch points at t = +-1."""

    def __init__(self, deformation):
        if deformation.d != 1:
            raise ValueError("the global coordinate exists only at d=1")
        self.deformation = deformation
        ram = deformation.ramification()
        self.gamma = ram.gamma
        self.eps_h = deformation.eps[0].lift_to_h(HVAR)

    def t_of_z(self, z_h):
        """t(z) = (eps+z)/gamma for an h-series point z."""
        return (self.eps_h + z_h) / self.gamma

    def z_of_t(self, t_h):
        return -self.eps_h + self.gamma * t_h

    def t_of_point(self, z_value):
        horder = 2 * self.deformation.order
        return self.t_of_z(Series.const(HVAR, z_value, horder))

    def sigma(self, t_h):
        """The involution t -> 1/t."""
        return t_h.invert()


def run_deformation_sweeps(es, rs, lam_over_n, one, sweeps):
    """Fixed-point sweeps over any coefficient ring (series, duals).

    Sweep: eps_k <- e_k + (lam/N) sum_l rho_l/(eps_l+eps_k), then
    rho_k <- r_k / x'(eps_k).  Seeded at (e_k, r_k); each sweep multiplies
    the error by the coupling, so ``sweeps`` = order saturates the window.
    """
    d = len(es)
    eps = list(es)
    rho = list(rs)
    for _ in range(sweeps):
        new_eps = []
        for k in range(d):
            acc = None
            for l in range(d):
                t = rho[l] / (eps[l] + eps[k])
                acc = t if acc is None else acc + t
            new_eps.append(es[k] + lam_over_n * acc)
        eps = new_eps
        new_rho = []
        for k in range(d):
            acc = None
            for l in range(d):
                s = eps[l] + eps[k]
                t = rho[l] / (s * s)
                acc = t if acc is None else acc + t
            xp = one + lam_over_n * acc
            new_rho.append(rs[k] / xp)
        rho = new_rho
    return eps, rho


def solve_deformation(inp):
    """Exact series solution of the defining equations (see sweeps above)."""
    order = inp.order
    es = [Series.const(LAMBDA, e, order) for e in inp.eigenvalues]
    rs = [Series.const(LAMBDA, r, order) for r in inp.multiplicities]
    lam_over_n = Series.gen(LAMBDA, order) / Series.const(LAMBDA, inp.n_size, order)
    one = Series.const(LAMBDA, 1, order)
    eps, rho = run_deformation_sweeps(es, rs, lam_over_n, one, order)
    return Deformation(inp, eps, rho)


def closed_form_eps_rho_d1(e, n_size, order):
    """Independent d=1 oracle: eps and rho from the explicit closed forms

        eps = (4e + sqrt(4e^2 + 12 lam))/6
        rho = N*(2e*sqrt(4e^2+12 lam) - 4e^2 + 12 lam)/(18 lam)

    (requires 4e^2 to be a rational square, which the callers arrange).
    """
    e = rat(e)
    lam = Series.gen(LAMBDA, order + 1)
    inner = Series.const(LAMBDA, 4 * e * e, order + 1) + lam.scale(12)
    root = inner.sqrt()
    eps = (Series.const(LAMBDA, 4 * e, order + 1) + root).scale(rat(1, 6))
    num = root.scale(2 * e) + lam.scale(12) - Series.const(LAMBDA, 4 * e * e, order + 1)
    rho = (num / lam).scale(rat(n_size) / 18)
    return eps.truncate(order), rho.truncate(order)
