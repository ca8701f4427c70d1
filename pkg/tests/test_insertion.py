from fractions import Fraction as F

import pytest

from qkm.scalars import GQ, rat
from qkm.series import Series
from qkm.spectral import LAMBDA, SpectralInput, default_input, solve_deformation
from qkm.insertion import (
    creation_on_graded,
    deformation_derivatives,
    dx_de,
    identity_suite,
    omega02_diagonal,
    omega02_plain,
    omega03,
    omega03_diagonal,
    omega03_via_insertion,
)


def gq(x):
    return GQ(rat(x))


def d2_input(order=6):
    return SpectralInput([F(1, 2), F(1, 3)], [1, 2], 3, order)


@pytest.fixture(scope="module")
def de1():
    return solve_deformation(default_input(7))


@pytest.fixture(scope="module")
def de2():
    return solve_deformation(d2_input(6))


class TestDerivatives:
    def test_order_zero_limits(self, de2):
        dd = deformation_derivatives(de2, 1)
        assert dd.d_eps[0].coeff_or_zero(0) == gq(0)
        assert dd.d_eps[1].coeff_or_zero(0) == gq(1)
        assert dd.d_rho[0].coeff_or_zero(0) == gq(0)
        assert dd.d_rho[1].coeff_or_zero(0) == gq(0)

    def test_d1_closed_form_derivative_oracle(self, de1):
        # differentiating the explicit d=1 solution at 2e = 1:
        # d eps/de = 1 - 2 lam + 18 lam^2 - 180 lam^3
        # d rho/de = 4 lam - 48 lam^2 + 540 lam^3
        dd = deformation_derivatives(de1, 0)
        for n, c in enumerate([1, -2, 18, -180]):
            assert dd.d_eps[0].coeff_or_zero(n) == gq(c)
        for n, c in enumerate([0, 4, -48, 540]):
            assert dd.d_rho[0].coeff_or_zero(n) == gq(c)

    def test_differentiated_defining_equations(self, de2):
        # d/de_b of x(eps_k) = e_k and of rho_k x'(eps_k) = r_k
        for b in (0, 1):
            dd = deformation_derivatives(de2, b)
            for k in range(2):
                lhs = dx_de(de2, dd, 0, de2.eps[k]) + de2.x_at(
                    de2.eps[k], deriv=1
                ) * dd.d_eps[k]
                target = Series.const(LAMBDA, 1 if k == b else 0, de2.order)
                assert lhs.eq_window(target, upto=de2.order - 2)
                lhs2 = dd.d_rho[k] * de2.x_at(de2.eps[k], deriv=1) + de2.rho[
                    k
                ] * dd.d_xprime_at_eps(k)
                assert lhs2.valuation() is None or lhs2.valuation() >= de2.order - 1

    def test_divided_difference_convergence(self):
        # exact arithmetic convergence check: the forward derivative matches
        # (sol(e+h)-sol(e-h))/2h up to O(h^2), with the error shrinking ~4x
        base = F(1, 2)
        order = 4
        dd = deformation_derivatives(solve_deformation(SpectralInput([base], [1], 1, order)), 0)
        errs = []
        for h in (F(1, 10), F(1, 20)):
            plus = solve_deformation(SpectralInput([base + h], [1], 1, order))
            minus = solve_deformation(SpectralInput([base - h], [1], 1, order))
            diff = (plus.eps[0] - minus.eps[0]).scale(F(1, 2) / h)
            err = diff - dd.d_eps[0]
            errs.append(err.coeff_or_zero(1).re)
        assert abs(errs[1]) < abs(errs[0]) / 3


class TestCreationGraded:
    def test_monomial_rule(self):
        graded = {(1, 2): gq(F(-1, 4))}
        out = creation_on_graded(graded)
        assert out == {(1, 3): gq(-1)}

    def test_constant_term_annihilated(self):
        out = creation_on_graded({(0, 0): gq(5)})
        assert out[(0, 1)] == gq(0)

    def test_ungraded_rejected(self):
        with pytest.raises(ValueError):
            creation_on_graded({(1, None): gq(1)})


class TestOmega02:
    def test_symmetry(self, de2):
        a = omega02_plain(de2, rat(2), rat(3))
        b = omega02_plain(de2, rat(3), rat(2))
        assert a.eq_window(b)

    def test_diagonal_classical_limit(self, de1):
        val = omega02_diagonal(de1)
        assert val.coeff_or_zero(0) == gq(1)  # 1/(2e)^2 at 2e=1

    def test_diagonal_table(self, de1):
        # two-boundary planar numbers on (-coupling)^n at 2e=1
        val = omega02_diagonal(de1)
        expect = [1, 7, 58, 522, 4941]
        for n, c in enumerate(expect):
            got = val.coeff_or_zero(n)
            assert got == gq(c) * GQ((-1) ** n), (n, got)


class TestOmega03:
    def test_permutation_symmetry_d1(self, de1):
        pts = [rat(2), rat(3), rat(5, 2)]
        base = omega03(de1, *pts)
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
            other = omega03(de1, pts[perm[0]], pts[perm[1]], pts[perm[2]])
            assert base.eq_window(other, upto=4)

    def test_permutation_symmetry_d2(self, de2):
        pts = [rat(2), rat(3), rat(5, 2)]
        base = omega03(de2, *pts)
        other = omega03(de2, pts[2], pts[0], pts[1])
        assert base.eq_window(other, upto=3)

    def test_diagonal_table(self, de1):
        val = omega03_diagonal(de1)
        expect = [12, 240, 3628, 49464]
        for n, c in enumerate(expect, start=1):
            got = val.coeff_or_zero(n)
            assert got == gq(c) * GQ((-1) ** n), (n, got)

    def test_insertion_route_matches_d1(self, de1):
        dd = deformation_derivatives(de1, 0)
        direct = omega03(de1, rat(2), rat(3), de1.eps[0])
        rebuilt = omega03_via_insertion(de1, dd, rat(2), rat(3))
        assert direct.eq_window(rebuilt, upto=4)

    def test_insertion_route_matches_d2(self, de2):
        dd = deformation_derivatives(de2, 1)
        direct = omega03(de2, rat(2), rat(3), de2.eps[1])
        rebuilt = omega03_via_insertion(de2, dd, rat(2), rat(3))
        assert direct.eq_window(rebuilt, upto=3)


class TestIdentitySuite:
    @pytest.mark.parametrize("which", ["d1", "d2"])
    def test_all_identities_pass(self, which, de1, de2):
        de = de1 if which == "d1" else de2
        b = 0 if which == "d1" else 1
        reports = identity_suite(de, b=b)
        bad = [r.to_dict() for r in reports if r.status != "pass"]
        assert not bad, bad

    def test_corrupted_weights_fail_reflection(self, de1):
        from qkm.spectral import Deformation

        rho_bad = [de1.rho[0] + Series.const(LAMBDA, 1, de1.order)]
        broken = Deformation(de1.input, list(de1.eps), rho_bad)
        reports = identity_suite(broken, b=0)
        by_name = {r.name: r for r in reports}
        r = by_name["boundary_reflection"]
        assert r.status == "fail" and r.first_failing_order == 1
