from fractions import Fraction as F

import pytest

from qkm.scalars import GQ, FieldError, rat
from qkm.series import PrecisionError, Series


def S(terms, order, var="lambda"):
    return Series.from_terms(var, [(e, GQ(rat(c))) for e, c in terms], order)


def coeffs(s, lo, hi):
    return [s.coeff_or_zero(e) for e in range(lo, hi + 1)]


def gq(x):
    return GQ(rat(x))


class TestArith:
    def test_difference_of_squares(self):
        a = S([(0, 1), (1, 1)], 8)
        b = S([(0, 1), (1, -1)], 8)
        assert (a * b).eq_window(S([(0, 1), (2, -1)], 8))

    def test_geometric_series(self):
        one = S([(0, 1)], 4)
        g = one / S([(0, 1), (1, -1)], 4)
        assert coeffs(g, 0, 3) == [gq(1), gq(1), gq(1), gq(1)]

    def test_sqrt_resquares(self):
        a = S([(0, 1), (1, 12)], 7)
        r = a.sqrt()
        assert (r * r).eq_window(a)

    def test_variable_mismatch(self):
        with pytest.raises(ValueError):
            S([(0, 1)], 3) + S([(0, 1)], 3, var="h")

    def test_divide_by_zero_series(self):
        with pytest.raises(ZeroDivisionError):
            S([(0, 1)], 3) / Series.zero("lambda", 3)

    def test_ring_axioms_on_samples(self):
        xs = [
            S([(0, 1), (1, F(2, 3)), (2, -5)], 6),
            S([(-1, F(1, 2)), (1, 7)], 6),
            S([(0, -2), (3, F(9, 4))], 6),
        ]
        for a in xs:
            for b in xs:
                for c in xs:
                    lhs = (a * b) * c
                    rhs = a * (b * c)
                    assert lhs.eq_window(rhs)
                    assert ((a + b) * c).eq_window(a * c + b * c)

    def test_mul_precision_rule(self):
        a = S([(0, 1)], 3)          # known to lambda^2
        b = S([(2, 1)], 10)         # lambda^2, known far
        p = a * b
        assert p.order == 5         # 2 + 3

    def test_laurent_division_precision(self):
        a = S([(0, 1)], 6)
        b = S([(2, 1), (3, 1)], 6)  # valuation 2, 4 known terms
        q = a / b
        assert q.lo == -2
        assert q.order == 2         # relative precision 4 kept


class TestSqrtOracle:
    # binomial-series oracle for sqrt(1+12*lambda), frozen:
    # C(1/2,k)*12^k = 1, 6, -18, 108, -810
    def test_sqrt_1_plus_12lam(self):
        r = S([(0, 1), (1, 12)], 5).sqrt()
        assert coeffs(r, 0, 4) == [gq(1), gq(6), gq(-18), gq(108), gq(-810)]

    def test_sqrt_one(self):
        assert S([(0, 1)], 4).sqrt().eq_window(S([(0, 1)], 4))

    def test_sqrt_odd_valuation_in_h(self):
        # sqrt(lambda * s) with s(0)=1: in h (h^2 = lambda) becomes h*sqrt(s)
        s = S([(0, 1), (1, 3)], 5)
        lam_s = S([(1, 1), (2, 3)], 6)
        r = lam_s.lift_to_h().sqrt()
        expected = s.lift_to_h().sqrt().shift(1)
        assert (r * r).eq_window(lam_s.lift_to_h())
        assert r.eq_window(expected)

    def test_sqrt_nonsquare_rejected(self):
        with pytest.raises(FieldError):
            S([(0, 2)], 4).sqrt()

    def test_sqrt_negative_goes_gaussian(self):
        r = S([(0, -1)], 4).sqrt()
        assert r.coeff(0) == GQ.i()


class TestLog:
    def test_log_one(self):
        assert S([(0, 1)], 5).log().is_zero()

    def test_mercator(self):
        l = S([(0, 1), (1, -1)], 4).log()
        assert coeffs(l, 0, 3) == [gq(0), gq(-1), gq(F(-1, 2)), gq(F(-1, 3))]

    def test_log_requires_unit_constant(self):
        with pytest.raises(ValueError):
            S([(0, 2)], 4).log()

    def test_log_derivative_identity(self):
        a = S([(0, 1), (1, 4), (2, -7), (3, F(2, 5))], 8)
        la = a.log()
        assert la.derivative().eq_window(a.derivative() / a)

    def test_exp_log_roundtrip(self):
        x = S([(1, 3), (2, F(-1, 2))], 7)
        assert x.exp().log().eq_window(x)


class TestComposeRevert:
    def test_compose_trivial(self):
        lam = Series.gen("lambda", 6)
        sq = S([(2, 1)], 6)
        assert sq.compose(lam).eq_window(sq)

    def test_revert_oracle_lagrange(self):
        # Lagrange inversion of lambda + lambda^2: lambda - lambda^2 + 2 lambda^3 - 5 lambda^4
        g = S([(1, 1), (2, 1)], 5).revert()
        assert coeffs(g, 1, 4) == [gq(1), gq(-1), gq(2), gq(-5)]

    def test_revert_identity(self):
        a = S([(1, 1), (2, 1)], 5)
        g = a.revert()
        comp = a.compose(g)
        assert comp.eq_window(Series.gen("lambda", comp.order))

    def test_revert_involutive_on_samples(self):
        for terms in ([(1, 2), (2, -1), (3, F(1, 3))], [(1, 1), (3, 5)]):
            a = S(terms, 6)
            assert a.revert().revert().eq_window(a)


class TestResidue:
    def test_simple_pole(self):
        s = S([(-1, 1), (0, 3), (1, 1)], 4, var="t")
        assert s.residue() == gq(1)

    def test_double_pole_no_residue(self):
        assert S([(-2, 1)], 2, var="t").residue() == gq(0)

    def test_exact_forms_have_no_residue(self):
        for terms in ([(-3, 2), (0, 5), (4, -1)], [(-2, F(7, 3)), (1, 1)]):
            f = S(terms, 6, var="t")
            assert f.derivative().residue() == gq(0)

    def test_residue_unknown(self):
        with pytest.raises(PrecisionError):
            S([(-4, 1)], -2, var="t").residue()


class TestSubstitution:
    def test_h_roundtrip(self):
        a = S([(0, 1), (1, -3), (4, F(5, 7))], 6)
        h = a.lift_to_h()
        assert h.var == "h"
        assert h.has_only_even_powers()
        back = h.drop_to_lambda()
        assert back.eq_window(a)
        assert back.order == a.order

    def test_odd_power_rejected(self):
        h = Series.from_terms("h", [(1, GQ(1))], 4)
        with pytest.raises(FieldError):
            h.drop_to_lambda()


class TestText:
    def test_str_roundtrip(self):
        a = Series.from_terms(
            "h",
            [(-2, GQ(rat(1, 2))), (0, GQ(rat(3))), (3, GQ(rat(-7, 5), rat(1, 3)))],
            6,
        )
        b = Series.from_str(a.to_str())
        assert b.eq_window(a) and b.order == a.order and b.var == a.var

    def test_json_roundtrip(self):
        a = Series.from_terms(
            "lambda", [(0, GQ(rat(1))), (2, GQ(rat(-9, 4)))], 5
        )
        b = Series.from_json(a.to_json())
        assert b.eq_window(a) and b.order == a.order

    def test_zero_str(self):
        z = Series.zero("lambda", 3)
        assert Series.from_str(z.to_str()).is_zero()
