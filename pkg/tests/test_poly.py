from fractions import Fraction as F

import pytest

from qkm.scalars import GQ, FieldError, rat
from qkm.series import Series
from qkm.poly import (
    Poly,
    RatFunc,
    invert_mod,
    newton_power_sums,
    product_over_roots,
    trace_over_roots,
)

ORD = 8


def sc(x, order=ORD):
    return Series.const("lambda", GQ(rat(x)), order)


def spoly(*consts):
    return Poly([sc(c) for c in consts])


def sers(terms, order=ORD):
    return Series.from_terms("lambda", [(e, GQ(rat(c))) for e, c in terms], order)


class TestPolyBasics:
    def test_divmod_monic(self):
        p = spoly(-1, 0, 1)  # z^2 - 1
        a = spoly(2, 3, 0, 5)  # 5z^3 + 3z + 2
        q, r = a.divmod_monic(p)
        back = q * p + r
        for k in range(4):
            assert (back.coeff(k) - a.coeff(k)).is_zero()
        assert r.degree() <= 1

    def test_eval_horner(self):
        p = spoly(1, -2, 3)
        x = sers([(0, 2), (1, 1)])
        val = p.eval(x)
        expect = sers([(0, 9), (1, 10), (2, 3)])
        assert val.eq_window(expect)

    def test_neg_arg(self):
        p = spoly(1, 2, 3)
        q = p.neg_arg()
        assert (q.coeff(1) + p.coeff(1)).is_zero()
        assert (q.coeff(2) - p.coeff(2)).is_zero()


class TestNewton:
    def test_power_sums_of_z2_minus_1(self):
        sums = newton_power_sums(spoly(-1, 0, 1), 4)
        vals = [s.coeff_or_zero(0) for s in sums]
        assert vals == [GQ(2), GQ(0), GQ(2), GQ(0), GQ(2)]

    def test_power_sums_rational_roots(self):
        # roots 1/2 and 3: p = (z-1/2)(z-3)
        p = spoly(F(3, 2), F(-7, 2), 1)
        sums = newton_power_sums(p, 3)
        expect = [2, F(7, 2), F(37, 4), F(217, 8)]
        for s, e in zip(sums, expect):
            assert s.coeff_or_zero(0) == GQ(rat(e))


class TestTrace:
    def test_trace_z_squared(self):
        p = spoly(-1, 0, 1)
        f = RatFunc(spoly(0, 0, 1), spoly(1))
        assert trace_over_roots(p, f).eq_window(sc(2))

    def test_trace_rational(self):
        p = spoly(-1, 0, 1)
        f = RatFunc(spoly(1), spoly(2, 1))  # 1/(z+2) summed over z=1,-1 -> 1/3+1
        assert trace_over_roots(p, f).eq_window(sc(F(4, 3)))

    def test_trace_with_lambda_valuation_stripped(self):
        # denominator lambda*(z+2): trace = (1/lambda)*(4/3)
        p = spoly(-1, 0, 1)
        lam = Series.gen("lambda", ORD)
        f = RatFunc(spoly(1), Poly([lam * GQ(2), lam]))
        t = trace_over_roots(p, f)
        assert t.lo == -1
        assert t.coeff(-1) == GQ(rat(4, 3))

    def test_trace_collision_raises(self):
        p = spoly(-1, 0, 1)
        f = RatFunc(spoly(1), spoly(-1, 1))  # pole at the root z=1
        with pytest.raises(FieldError):
            trace_over_roots(p, f)

    def test_trace_matches_direct_eval_rational_factors(self):
        # P = (z-1)(z-2)(z+3) = z^3 - 7z + 6, f = (z^2+1)/(z+5)
        p = Poly([sc(c) for c in (6, -7, 0, 1)])
        f = RatFunc(spoly(1, 0, 1), spoly(5, 1))
        direct = sum(F(r * r + 1, r + 5) for r in (1, 2, -3))
        assert trace_over_roots(p, f).eq_window(sc(direct))


class TestProduct:
    def test_product_z_plus_2(self):
        p = spoly(-1, 0, 1)
        assert product_over_roots(p, spoly(2, 1)).eq_window(sc(3))

    def test_product_z(self):
        p = spoly(-1, 0, 1)
        assert product_over_roots(p, spoly(0, 1)).eq_window(sc(-1))

    def test_product_matches_direct(self):
        p = Poly([sc(c) for c in (6, -7, 0, 1)])  # roots 1, 2, -3
        g = spoly(1, 1, 1)
        direct = F(1)
        for r in (1, 2, -3):
            direct *= r * r + r + 1
        assert product_over_roots(p, g).eq_window(sc(direct))

    def test_log_derivative_consistency_with_trace(self):
        # P(z) = (z-(1+lam))(z-(2-lam^2)) with series coefficients;
        # d/dlam log prod g(beta_i) == trace of g'*(-dP/dlam)/(P'*g)
        r1 = sers([(0, 1), (1, 1)])
        r2 = sers([(0, 2), (2, -1)])
        one = sc(1)
        p = Poly.from_roots([r1, r2], one)
        g = spoly(3, 1)  # z + 3
        prod = product_over_roots(p, g)
        expect = (sers([(0, 4), (1, 1)])) * (sers([(0, 5), (2, -1)]))
        assert prod.eq_window(expect)
        dp_dlam = Poly([c.derivative() for c in p.coeffs])
        f = RatFunc(g.derivative() * (-dp_dlam), p.derivative() * g)
        lhs = prod.derivative() / prod
        rhs = trace_over_roots(p, f)
        assert lhs.eq_window(rhs, upto=ORD - 3)


class TestInvertMod:
    def test_inverse_mod(self):
        p = Poly([sc(c) for c in (2, 0, 1)])  # z^2 + 2
        b = Poly([sers([(0, 1), (1, 5)]), sers([(0, 3), (2, 1)])])
        inv = invert_mod(b, p, lambda q: sc(q))
        prod = (b * inv).mod_monic(p)
        assert prod.coeff(0).eq_window(sc(1))
        assert prod.coeff(1).is_zero() or prod.coeff(1).valuation() is None
