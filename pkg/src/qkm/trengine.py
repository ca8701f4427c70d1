"""Recursion core and closed forms for the one-boundary correlators.

d = 1 recursion: in the global coordinate t (x = -eps + gamma(t + 1/t))
the sheet swap t -> 1/t is global and the two simple branch points sit at
t = +-1.  Stable correlators, stripped of their differentials, are exact
finite sums of pole terms

    W_{g,n}(t_1..t_n) = sum c * prod_j (t_j - a_j)^(-m_j),   a_j in {+1,-1},

with half-power-series coefficients (h^2 = coupling, Gaussian scalars).
Residues at the branch points are coefficient extractions after local
re-expansion in u = t -+ 1; the kernel's dependence on the outer variable
is tracked through formal pole symbols, so the output is again a pole sum.
Two bracket conventions are supported: the standard one (normalized
two-boundary kernel only) and the polar projection of the full recursion,
whose two-boundary input carries the reflected kernel as well.

Any d: closed forms for the one-boundary genus-one correlator and its
holomorphic complement, evaluated either through quotient-ring traces
(no root extraction) or, at d = 1, through the explicit conjugate branch
points.  Power normalization of the closed forms follows the equal-point
tables (see the decision log); the split into polar and holomorphic parts
is by pole location (branch points vs the origin).
"""

from __future__ import annotations

from .scalars import GQ, rat
from .series import Series
from .poly import Poly
from .rootfuncs import RootCalculus
from .spectral import LAMBDA, HVAR, Zhukovsky
from .towers import Dual
from .insertion import DELTA

__all__ = [
    "MultiPole",
    "TREngine",
    "omega11_closed_at",
    "omega11_blob_at",
    "omega11_closed",
    "omega11_blob",
    "omega11_tr_from_closed",
    "holomorphic_part_at",
    "blob_split_check",
    "symplectic_check",
    "bergman_projective_extraction",
]

UVAR = "u"
OUT_SLOT = -1  # kernel output slot, renamed to 0 on extraction


# ----------------------------------------------------------------- MultiPole


class MultiPole:
    """Finite sum of products of formal pole factors over named slots.

    terms: {key: coeff} with key = tuple of (slot, center, power), sorted;
    the empty key is the scalar part.  Coefficients are h-series.  Products
    merge keys; the same slot may repeat only with the same center (powers
    add), which is all the recursion ever produces.
    """

    __slots__ = ("terms", "proto")

    def __init__(self, terms, proto):
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        self.proto = proto

    @staticmethod
    def scalar(f):
        return MultiPole({(): f}, f.zero_like())

    @staticmethod
    def pole(slot, center, power, f_one):
        return MultiPole({((slot, center, power),): f_one}, f_one.zero_like())

    def is_zero(self):
        return not self.terms

    def zero_like(self):
        return MultiPole({}, self.proto)

    def one_like(self):
        return MultiPole.scalar(self.proto.one_like())

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return MultiPole(out, self.proto)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MultiPole({k: -v for k, v in self.terms.items()}, self.proto)

    @staticmethod
    def _merge_keys(ka, kb):
        slots = {}
        for slot, center, power in ka + kb:
            if slot in slots:
                c0, p0 = slots[slot]
                if c0 != center:
                    raise ValueError("pole centers collide in slot %r" % (slot,))
                slots[slot] = (c0, p0 + power)
            else:
                slots[slot] = (center, power)
        return tuple(sorted((s, c, p) for s, (c, p) in slots.items()))

    def __mul__(self, other):
        if not isinstance(other, MultiPole):
            # scale by an h-series or rational
            return MultiPole({k: v * other for k, v in self.terms.items()}, self.proto)
        out = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                key = self._merge_keys(ka, kb)
                prod = va * vb
                out[key] = out[key] + prod if key in out else prod
        return MultiPole(out, self.proto)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPole):
            if any(k for k in other.terms):
                raise ValueError("can only divide by a scalar part")
            return self * (self.proto.one_like() / other.terms.get((), self.proto))
        return self * (self.proto.one_like() / other)

    def scalar_part(self):
        return self.terms.get((), self.proto)

    def __repr__(self):
        return "MultiPole(%d terms)" % len(self.terms)


# ------------------------------------------------------------------- engine


class TREngine:
    """Branch-point recursion for d = 1 in the global coordinate."""

    # recursion-variable pole-order bounds per target (g, n)
    POLE_ORDER = {(0, 3): 4, (1, 1): 4, (1, 2): 6, (2, 1): 10}

    def __init__(self, deformation, u_order=None):
        if deformation.d != 1:
            raise ValueError("the recursion engine runs at d=1 only")
        self.de = deformation
        self.zh = Zhukovsky(deformation)
        self.horder = 2 * deformation.order
        self.gamma = self.zh.gamma
        self.eps_h = self.zh.eps_h
        self.one_h = Series.const(HVAR, 1, self.horder)
        # reflected-kernel pole line: t1 + t2 = 2 eps / gamma
        self.reflect_center = (self.eps_h + self.eps_h) / self.gamma
        self.u_order = u_order if u_order is not None else 16
        self._memo = {}

    # -- scalar helpers -----------------------------------------------------
    def _mp(self, f):
        return MultiPole.scalar(f)

    def _u_const(self, mp):
        return Series.const(UVAR, mp, self.u_order)

    def _u_from_F(self, f):
        return self._u_const(self._mp(f))

    def _u_gen(self):
        return Series.gen(UVAR, self.u_order, scalar_one=self._mp(self.one_h))

    def _F_const(self, c):
        return Series.const(HVAR, c, self.horder)

    # -- local data at a branch point ----------------------------------------
    def _branch(self, a):
        one = self.one_h
        a_f = self._F_const(a)
        u = self._u_gen()
        q = self._u_from_F(a_f) + u
        invq = q.invert()
        w = invq - self._u_from_F(a_f)
        sigma_prime = -(invq * invq)
        # x'(t) = gamma (1 - 1/t^2); y(t) = -eps + gamma t - gamma^2/(2 eps - gamma t)
        gam = self._mp(self.gamma)
        xp = (self._u_from_F(one) - invq * invq) * gam
        two_eps = self._F_const(2) * self.eps_h

        def y_of(tser):
            den = self._u_from_F(two_eps) - tser * gam
            return (
                self._u_from_F(-self.eps_h)
                + tser * gam
                - self._u_from_F(self.gamma * self.gamma) / den
            )

        dy = y_of(q) - y_of(invq)
        delta = dy * xp
        return {
            "a": a,
            "q": q,
            "invq": invq,
            "w": w,
            "sigma_prime": sigma_prime,
            "delta": delta,
        }

    def _kernel_z(self, bd, m_max):
        """(1/2) * sum_m (u^m - w^m) / (z - a)^(m+1) as a u-series whose
        coefficients carry the formal pole in the output slot."""
        a = bd["a"]
        u = self._u_gen()
        w = bd["w"]
        acc = None
        u_pow = self._u_from_F(self.one_h)
        w_pow = self._u_from_F(self.one_h)
        for m in range(m_max + 1):
            diff = u_pow - w_pow
            pole = MultiPole.pole(OUT_SLOT, a, m + 1, self.one_h)
            term = diff * self._u_const(pole)
            acc = term if acc is None else acc + term
            u_pow = u_pow * u
            w_pow = w_pow * w
        return acc * self._u_const(self._mp(self.one_h * GQ(rat(1, 2))))

    # -- evaluation of stored tensors ----------------------------------------
    def _spectator_b(self, slot, a, pi):
        """1/(Z_slot - p(u))^2 with p = a + pi(u):
        sum_m (m+1) pi^m / (Z - a)^(m+2)."""
        acc = None
        pi_pow = self._u_from_F(self.one_h)
        # enough terms to cover the u-window
        for m in range(self.u_order + 2):
            pole = MultiPole.pole(slot, a, m + 2, self.one_h)
            term = pi_pow * self._u_const(pole) * (m + 1)
            acc = term if acc is None else acc + term
            pi_pow = pi_pow * pi
            if pi_pow.is_zero():
                break
        return acc

    def _w02_scalar(self, p1, p2):
        """1/(p1-p2)^2 for two local series."""
        d = p1 - p2
        one = self._u_from_F(self.one_h)
        return one / (d * d)

    def _w02_reflected(self, p1, p2):
        """1/(p1+p2-2eps/gamma)^2, the reflected-kernel contribution."""
        s = p1 + p2 - self._u_from_F(self.reflect_center)
        one = self._u_from_F(self.one_h)
        return one / (s * s)

    def _eval_tensor(self, tensor, assigns, bd):
        """Evaluate a stored pole sum with each slot bound to a local series
        or kept symbolic (pass ("sym", name))."""
        acc = None
        inv_cache = {}

        def inv_power(idx, center, power):
            key = (idx, center, power)
            if key not in inv_cache:
                base_key = (idx, center, 1)
                if base_key not in inv_cache:
                    p = assigns[idx][1]
                    shifted = p - self._u_from_F(self._F_const(center))
                    inv_cache[base_key] = self._u_from_F(self.one_h) / shifted
                inv1 = inv_cache[base_key]
                out = inv1
                for _ in range(power - 1):
                    out = out * inv1
                inv_cache[key] = out
            return inv_cache[key]

        for key, coeff in tensor.items():
            term = self._u_from_F(coeff)
            for slot, center, power in key:
                mode = assigns[slot][0]
                if mode == "sym":
                    term = term * self._u_const(
                        MultiPole.pole(assigns[slot][1], center, power, self.one_h)
                    )
                else:
                    term = term * inv_power(slot, center, power)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = self._u_const(self._mp(Series.zero(HVAR, self.horder)))
        return acc

    # -- the recursion --------------------------------------------------------
    def pure(self, g, n):
        """Pole-sum tensor of the standard-recursion W_{g,n} (slots 0..n-1)."""
        key = (g, n, "pure")
        if key in self._memo:
            return self._memo[key]
        if (g, n) not in self.POLE_ORDER:
            raise ValueError("unsupported target (g,n)=(%d,%d)" % (g, n))
        tensor = self._recurse(g, n, blobbed=False)
        self._memo[key] = tensor
        return tensor

    def polar_blobbed(self, g, n):
        """Polar projection of the full recursion (reflected kernel included
        in the two-boundary input); only (1,1) is data-backed."""
        key = (g, n, "blob")
        if key in self._memo:
            return self._memo[key]
        if (g, n) != (1, 1):
            raise ValueError(
                "polar projection with full two-boundary input is exposed "
                "only for (g,n)=(1,1)"
            )
        tensor = self._recurse(g, n, blobbed=True)
        self._memo[key] = tensor
        return tensor

    def _recurse(self, g, n, blobbed):
        m_max = self.POLE_ORDER[(g, n)]
        out = {}
        for a in (1, -1):
            bd = self._branch(a)
            bracket = self._bracket(g, n, a, bd, blobbed)
            integrand = (
                self._kernel_z(bd, m_max)
                * bracket
                * bd["sigma_prime"]
                / bd["delta"]
            )
            res = integrand.residue()  # MultiPole
            for key_mp, coeff in res.terms.items():
                key_out = self._shift_out_key(key_mp)
                out[key_out] = out[key_out] + coeff if key_out in out else coeff
        return {k: v for k, v in out.items() if not v.is_zero()}

    @staticmethod
    def _shift_out_key(key_mp):
        """Rename the kernel slot to slot 0; spectator slots keep their index."""
        parts = []
        for slot, center, power in key_mp:
            idx = 0 if slot == OUT_SLOT else slot
            parts.append((idx, center, power))
        return tuple(sorted(parts))

    def _bracket(self, g, n, a, bd, blobbed):
        """The recursion bracket as a u-series with spectator pole symbols.

        Spectator slots are named 1..n-1 (slot 0 is the recursion variable)."""
        q, invq, w = bd["q"], bd["invq"], bd["w"]
        u = self._u_gen()

        def b_sym(slot, local_pi):
            return self._spectator_b(slot, a, local_pi)

        if (g, n) == (1, 1):
            base = self._w02_scalar(q, invq)
            if blobbed:
                base = base + self._w02_reflected(q, invq)
            return base
        if (g, n) == (0, 3):
            return b_sym(1, u) * b_sym(2, w) + b_sym(2, u) * b_sym(1, w)
        if (g, n) == (1, 2):
            w11 = self.pure(1, 1)
            t1 = self._eval_tensor(w11, {0: ("ser", q)}, bd) * b_sym(1, w)
            t2 = b_sym(1, u) * self._eval_tensor(w11, {0: ("ser", invq)}, bd)
            w03 = self.pure(0, 3)
            t3 = self._eval_tensor(
                w03, {0: ("sym", 1), 1: ("ser", q), 2: ("ser", invq)}, bd
            )
            return t1 + t2 + t3
        if (g, n) == (2, 1):
            w11 = self.pure(1, 1)
            t1 = self._eval_tensor(w11, {0: ("ser", q)}, bd) * self._eval_tensor(
                w11, {0: ("ser", invq)}, bd
            )
            w12 = self.pure(1, 2)
            t2 = self._eval_tensor(w12, {0: ("ser", q), 1: ("ser", invq)}, bd)
            return t1 + t2
        raise ValueError("unsupported bracket (%d,%d)" % (g, n))

    # -- output extraction ------------------------------------------------------
    def tensor_value(self, tensor, t_points):
        """Evaluate a pole-sum tensor at h-series points per slot."""
        acc = None
        for key, coeff in tensor.items():
            term = coeff
            for slot, center, power in key:
                base = t_points[slot] - self._F_const(center)
                term = term / base.pow_int(power)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = Series.zero(HVAR, self.horder)
        return acc

    def omega_g1_at_eps(self, g, convention="pure"):
        """Lambda-series of the one-boundary correlator at the deformed
        eigenvalue: Omega_{g,1}(eps) = coupling^(2g-1) W(t(eps))/(gamma x'(eps))."""
        tensor = self.pure(g, 1) if convention == "pure" else self.polar_blobbed(g, 1)
        t_eps = self.zh.t_of_z(self.eps_h)
        w_val = self.tensor_value(tensor, {0: t_eps})
        xp_eps = self.de.x_at(self.de.eps[0], deriv=1).lift_to_h(HVAR)
        lam_pow = Series.from_terms(
            HVAR, [(2 * (2 * g - 1), GQ.one())], self.horder + 2 * (2 * g - 1)
        )
        val_h = lam_pow * w_val / (self.gamma * xp_eps)
        return val_h.drop_to_lambda(LAMBDA)

    def omega_diag_at_eps(self, g, n):
        """Equal-point value of a multi-boundary pure-recursion correlator:
        coupling^(2g-2+n) W(t_eps,..)/ (gamma x'(eps))^n."""
        tensor = self.pure(g, n)
        t_eps = self.zh.t_of_z(self.eps_h)
        w_val = self.tensor_value(tensor, {k: t_eps for k in range(n)})
        xp_eps = self.de.x_at(self.de.eps[0], deriv=1).lift_to_h(HVAR)
        power = 2 * (2 * g - 2 + n)
        lam_pow = Series.from_terms(HVAR, [(power, GQ.one())], self.horder + power)
        denom = (self.gamma * xp_eps).pow_int(n)
        return (lam_pow * w_val / denom).drop_to_lambda(LAMBDA)

    def w_value_at_z(self, tensor, z_value):
        """W(t(z)) for a rational z (one-slot tensors)."""
        t_z = self.zh.t_of_point(z_value)
        return self.tensor_value(tensor, {0: t_z})

    def linear_loop_check(self, tensor, include_holomorphic=True):
        """(W(t) + W(1/t) d(1/t)/dt-part) must be holomorphic at t = +-1:
        returns the worst (most negative) u-valuation found, or None."""
        worst = None
        for a in (1, -1):
            bd = self._branch(a)
            q, invq = bd["q"], bd["invq"]
            w_q = self._eval_tensor(tensor, {0: ("ser", q)}, bd)
            w_iq = self._eval_tensor(tensor, {0: ("ser", invq)}, bd)
            total = w_q + w_iq * bd["sigma_prime"]
            if include_holomorphic:
                zq = self._u_from_F(-self.eps_h) + q * self._mp(self.gamma)
                ziq = self._u_from_F(-self.eps_h) + invq * self._mp(self.gamma)
                h_q = _holomorphic_w_local(self, zq)
                h_iq = _holomorphic_w_local(self, ziq)
                total = total + h_q + h_iq * bd["sigma_prime"]
            v = total.valuation()
            if v is not None and v < 0 and (worst is None or v < worst):
                worst = v
        return worst


def _holomorphic_w_local(eng, z_local):
    """The origin-pole part of the genus-one one-boundary form in the honest
    form normalization (coupling^(2-2g-n) times the correlator), as a scalar
    in the t-coordinate (times dt): gamma * h(z(t)) with
    h(z) = -1/(8 x'(0)^2 z^3) + x''(0)/(16 x'(0)^3 z^2)."""
    de = eng.de
    xp0 = de.x_at(rat(0), deriv=1).lift_to_h(HVAR)
    xpp0 = de.x_at(rat(0), deriv=2).lift_to_h(HVAR)
    one = eng._u_from_F(eng.one_h)
    z2 = z_local * z_local
    z3 = z2 * z_local
    t1 = -(one / z3) * eng._mp(eng.one_h / (xp0 * xp0 * GQ(8)))
    t2 = (one / z2) * eng._mp(xpp0 / (xp0 * xp0 * xp0 * GQ(16)))
    return (t1 + t2) * eng._mp(eng.gamma)


# -------------------------------------------------- closed forms (any d)


def _omega11_pieces(de, z_point, backend):
    """(origin part, branch-sum bracket, blob branch-sum) of the genus-one
    one-boundary closed form, evaluated at z_point (a coupling series).

    All three parts enter the full form with coupling^2 (the origin terms
    carry it explicitly here; the callers supply it for the branch sums);
    this uniform power is fixed by the equal-point tables (decision log)."""
    order = de.order
    lam = Series.gen(LAMBDA, order)
    one = Series.const(LAMBDA, 1, order)
    zp = z_point if isinstance(z_point, Series) else Series.const(LAMBDA, z_point, order)
    xp0 = de.x_at(rat(0), deriv=1)
    xpp0 = de.x_at(rat(0), deriv=2)
    z2 = zp * zp
    z3 = z2 * zp
    origin = -(lam * lam) / (z3 * xp0 * xp0).scale(8) + (
        lam * lam * xpp0
    ) / (z2 * xp0 * xp0 * xp0).scale(16)

    if backend == "trace":
        rc = RootCalculus(de)
        sym = rc.sym()
        c1 = rc.const(1)
        zq = rc.const(zp)
        dzb = zq - sym
        xp_m = rc.xderiv(1, mirrored=True)
        xpp = rc.xderiv(2)
        xppp = rc.xderiv(3)
        xppp_m = rc.xderiv(3, mirrored=True)
        xpp_m = rc.xderiv(2, mirrored=True)
        xpppp = rc.xderiv(4)
        inv2 = c1 / (dzb * dzb)
        inv3 = inv2 / dzb
        inv4 = inv3 / dzb
        blob = rc.sum_over_roots(
            c1 / (sym * sym * xpp * xp_m) * inv2 / 8
        )
        bracket_el = (
            -(c1 / (xp_m * xpp) * inv4) / 8
            + (xppp / (xpp * xpp * xp_m) * inv3) / 24
            + (xppp_m / (xpp * xp_m * xp_m) * inv2) / 48
            + (xppp * xpp_m / (xpp * xpp * xp_m * xp_m) * inv2) / 48
            + (xpppp / (xpp * xpp * xp_m) * inv2) / 48
            - (xppp * xppp / (xpp * xpp * xpp * xp_m) * inv2) / 48
        )
        bracket = rc.sum_over_roots(bracket_el)
        return origin, bracket, blob

    if backend != "pair" or de.d != 1:
        raise ValueError("pair backend requires d=1")
    # explicit conjugate branch points over the half-power ring
    horder = 2 * order
    ram = de.ramification()
    zp_h = zp.lift_to_h(HVAR)
    one_h = Series.const(HVAR, 1, horder)
    bracket = None
    blob = None
    for beta in ram.branch_points_h():
        xp_m = de.x_deriv(1).neg_arg().eval(beta, lift=lambda c: c.lift_to_h(HVAR))
        xpp = de.x_deriv(2).eval(beta, lift=lambda c: c.lift_to_h(HVAR))
        xppp = de.x_deriv(3).eval(beta, lift=lambda c: c.lift_to_h(HVAR))
        xppp_m = de.x_deriv(3).neg_arg().eval(beta, lift=lambda c: c.lift_to_h(HVAR))
        xpp_m = de.x_deriv(2).neg_arg().eval(beta, lift=lambda c: c.lift_to_h(HVAR))
        xpppp = de.x_deriv(4).eval(beta, lift=lambda c: c.lift_to_h(HVAR))
        dzb = zp_h - beta
        inv2 = one_h / (dzb * dzb)
        inv3 = inv2 / dzb
        inv4 = inv3 / dzb
        b_el = (
            -(inv4 / (xp_m * xpp)).scale(rat(1, 8))
            + (xppp * inv3 / (xpp * xpp * xp_m)).scale(rat(1, 24))
            + (xppp_m * inv2 / (xpp * xp_m * xp_m)).scale(rat(1, 48))
            + (xppp * xpp_m * inv2 / (xpp * xpp * xp_m * xp_m)).scale(rat(1, 48))
            + (xpppp * inv2 / (xpp * xpp * xp_m)).scale(rat(1, 48))
            - (xppp * xppp * inv2 / (xpp * xpp * xpp * xp_m)).scale(rat(1, 48))
        )
        bl_el = (inv2 / (beta * beta * xpp * xp_m)).scale(rat(1, 8))
        bracket = b_el if bracket is None else bracket + b_el
        blob = bl_el if blob is None else blob + bl_el
    return origin, bracket.drop_to_lambda(LAMBDA), blob.drop_to_lambda(LAMBDA)


def omega11_closed_at(de, z_point, backend="trace"):
    """Omega_{1,1}(z) from the closed form: the full one-boundary genus-one
    correlator divided by coupling*x'(z)."""
    order = de.order
    lam = Series.gen(LAMBDA, order)
    zp = z_point if isinstance(z_point, Series) else Series.const(LAMBDA, z_point, order)
    origin, bracket, blob = _omega11_pieces(de, zp, backend)
    total = origin + (lam * lam) * (bracket - blob)
    return total / (lam * de.x_at(zp, deriv=1))


def omega11_blob_at(de, z_point, backend="trace"):
    """The holomorphic complement: origin poles plus the branch-residue blob
    term, again divided by coupling*x'(z)."""
    order = de.order
    lam = Series.gen(LAMBDA, order)
    zp = z_point if isinstance(z_point, Series) else Series.const(LAMBDA, z_point, order)
    origin, _bracket, blob = _omega11_pieces(de, zp, backend)
    total = origin - (lam * lam) * blob
    return total / (lam * de.x_at(zp, deriv=1))


def omega11_closed(de, b=0, backend="trace"):
    return omega11_closed_at(de, de.eps[b], backend)


def omega11_blob(de, b=0, backend="trace"):
    return omega11_blob_at(de, de.eps[b], backend)


def omega11_tr_from_closed(de, b=0, backend="trace"):
    """Normalized-solution part by subtraction: total minus complement."""
    return omega11_closed(de, b, backend) - omega11_blob(de, b, backend)


def holomorphic_part_at(de, z_point):
    """The origin-pole part of the genus-one form over dz (no branch terms):
    what remains of the full correlator after the polar projection."""
    order = de.order
    zp = z_point if isinstance(z_point, Series) else Series.const(LAMBDA, z_point, order)
    lam = Series.gen(LAMBDA, order)
    xp0 = de.x_at(rat(0), deriv=1)
    xpp0 = de.x_at(rat(0), deriv=2)
    z2 = zp * zp
    z3 = z2 * zp
    return -(lam * lam) / (z3 * xp0 * xp0).scale(8) + (lam * lam * xpp0) / (
        z2 * xp0 * xp0 * xp0
    ).scale(16)


def blob_split_check(de, z_samples=(rat(2), rat(3)), u_order=16):
    """Polar projection from the recursion plus the origin-pole part must
    reassemble the full closed form: as forms over dz in the honest
    normalization, W_polar(t(z))/gamma + h(z) = Omega_{1,1}(z) x'(z)/coupling.
    Checked as half-power series at rational sample points; returns the
    first failing order (None = identity holds on the window)."""
    eng = TREngine(de, u_order=u_order)
    tensor = eng.polar_blobbed(1, 1)
    worst = None
    for z in z_samples:
        t_z = eng.zh.t_of_point(z)
        w_polar = eng.tensor_value(tensor, {0: t_z})
        # convert the t-scalar to the z-form: omega/dz = W(t) dt/dz = W/gamma
        polar_dz = w_polar / eng.gamma
        lam2_h = Series.from_terms(HVAR, [(4, GQ.one())], eng.horder + 4)
        holo_dz = holomorphic_part_at(de, z).lift_to_h(HVAR) / lam2_h
        lam_h = Series.from_terms(HVAR, [(2, GQ.one())], eng.horder + 2)
        closed = omega11_closed_at(de, z, backend="pair").lift_to_h(HVAR)
        xp_z = de.x_at(z, deriv=1).lift_to_h(HVAR)
        rhs = closed * xp_z / lam_h  # = full form / dz
        diff = polar_dz + holo_dz - rhs
        v = diff.valuation()
        if v is not None:
            fail = v // 2
            worst = fail if worst is None else min(worst, fail)
    return worst


# ---------------------------------------------------------------- symplectic


def symplectic_check(de, z_samples=(rat(2), rat(3)), backend="trace"):
    """x'(z)Om(z) - x'(-z)Om(-z) against the derivative of the reflection
    bracket; returns per-sample first failing order (None = pass)."""
    order = de.order
    lam = Series.gen(LAMBDA, order)
    out = {}
    for z in z_samples:
        zp = Series.const(LAMBDA, z, order)
        lhs = de.x_at(zp, deriv=1) * omega11_closed_at(de, zp, backend) - de.x_at(
            -zp, deriv=1
        ) * omega11_closed_at(de, -zp, backend)

        def bracket_dual(point):
            dz = Dual.seed(point)
            dl = lambda c: Dual.lift(c)  # noqa: E731
            one = Dual.lift(Series.const(LAMBDA, 1, order))
            xp = de.x_deriv(1).eval(dz, lift=dl)
            xpm = de.x_deriv(1).neg_arg().eval(dz, lift=dl)
            xpp = de.x_deriv(2).eval(dz, lift=dl)
            xppm = de.x_deriv(2).neg_arg().eval(dz, lift=dl)
            xppp = de.x_deriv(3).eval(dz, lift=dl)
            xpppm = de.x_deriv(3).neg_arg().eval(dz, lift=dl)
            z2 = dz * dz
            inner = (
                (one / z2) * 3
                - xppp / xp
                - xpppm / xpm
                + (xpp * xpp) / (xp * xp)
                + (xppm * xppm) / (xpm * xpm)
                - (xpp * xppm) / (xp * xpm)
            )
            g = Dual.lift(lam) * inner / ((xp * xpm) * 24)
            return g.der

        rhs = bracket_dual(zp)
        diff = lhs - rhs
        v = diff.valuation()
        out[str(z)] = v
    return out


def bergman_projective_extraction(de, z=rat(2)):
    """Diagonal expansion of the reflected kernel: the constant term of
    1/(u+z)^2 at u -> z equals S_B(z)/6 with S_B(z) = 3/(2 z^2)."""
    order_delta = 4
    one_lam = Series.const(LAMBDA, 1, de.order)

    def lift(c):
        return Series.const(DELTA, c, order_delta)

    zp = lift(Series.const(LAMBDA, z, de.order))
    up = zp + Series.gen(DELTA, order_delta, scalar_one=one_lam)
    s = up + zp
    val = lift(one_lam) / (s * s)
    sb_over_6 = val.coeff_or_zero(0)
    return sb_over_6.scale(6)
