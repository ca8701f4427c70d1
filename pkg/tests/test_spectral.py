from fractions import Fraction as F

import pytest

from qkm.scalars import GQ, rat
from qkm.series import Series
from qkm.spectral import (
    HVAR,
    LAMBDA,
    SpectralInput,
    Zhukovsky,
    closed_form_eps_rho_d1,
    default_input,
    solve_deformation,
)


def d2_input(order=6):
    return SpectralInput([F(1, 2), F(1, 3)], [1, 2], 3, order)


def gq(x):
    return GQ(rat(x))


class TestSolver:
    def test_order_one_is_undeformed(self):
        de = solve_deformation(SpectralInput([F(1, 2), F(5, 7)], [2, 3], order=1))
        for k, (e, r) in enumerate(zip([F(1, 2), F(5, 7)], [2, 3])):
            assert de.eps[k].eq_window(Series.const(LAMBDA, e, 1))
            assert de.rho[k].eq_window(Series.const(LAMBDA, r, 1))

    def test_d1_frozen_series(self):
        de = solve_deformation(default_input(5))
        eps_expect = [F(1, 2), 1, -3, 18, -135]
        rho_expect = [1, -1, 6, -45, 378]
        for n in range(5):
            assert de.eps[0].coeff_or_zero(n) == gq(eps_expect[n])
            assert de.rho[0].coeff_or_zero(n) == gq(rho_expect[n])

    @pytest.mark.parametrize("e", [F(1, 2), F(1, 3), F(3, 2)])
    def test_d1_matches_closed_form(self, e):
        order = 7
        de = solve_deformation(SpectralInput([e], [1], 1, order))
        eps_c, rho_c = closed_form_eps_rho_d1(e, 1, order)
        assert de.eps[0].eq_window(eps_c)
        assert de.rho[0].eq_window(rho_c)

    def test_d2_residuals_vanish(self):
        de = solve_deformation(d2_input(6))
        assert de.residuals() is None

    def test_defining_relation_at_eps(self):
        de = solve_deformation(d2_input(5))
        val = de.x_at(de.eps[1])
        assert val.eq_window(Series.const(LAMBDA, F(1, 3), 5))


class TestRamification:
    def test_p_monic_and_undeformed_limit(self):
        de = solve_deformation(d2_input(5))
        P = de.xprime_numerator()
        assert P.degree() == 4
        assert (P.lc() - P.lc().one_like()).is_zero()
        # at coupling 0 the roots are -e_k doubled: P0 = prod (z+e_k)^2
        e1, e2 = F(1, 2), F(1, 3)
        import itertools

        prod_coeffs = [F(1)]
        for root in (e1, e1, e2, e2):
            new = [F(0)] * (len(prod_coeffs) + 1)
            for i, c in enumerate(prod_coeffs):
                new[i] += c * root
                new[i + 1] += c
            prod_coeffs = new
        for k, c in enumerate(prod_coeffs):
            assert P.coeff(k).coeff_or_zero(0) == gq(c)

    def test_branch_points_annihilate_xprime(self):
        de = solve_deformation(default_input(6))
        ram = de.ramification()
        for beta in ram.branch_points_h():
            val = de.x_at(beta, deriv=1)
            assert val.valuation() is None or val.valuation() >= 2 * 6 - 4

    def test_branch_data_frozen(self):
        de = solve_deformation(default_input(4))
        ram = de.ramification()
        # gamma = i*h*sqrt(rho_hat) = i*h*(1 - lam/2 + ...) at 2e = 1
        g = ram.gamma
        assert g.coeff_or_zero(1) == GQ(0, 1)
        assert g.coeff_or_zero(3) == GQ(0, F(-1, 2))
        # b_+ - b_- = 4*gamma
        diff = ram.b_plus - ram.b_minus
        assert diff.eq_window(g.scale(4))

    def test_conjugate_symmetry_gives_reality(self):
        de = solve_deformation(default_input(5))
        ram = de.ramification()
        prod = de.x_at(ram.beta_plus, deriv=1) * de.x_at(ram.beta_minus, deriv=1)
        # symmetric in the conjugate pair: real with even powers only
        assert prod.is_real()
        assert prod.has_only_even_powers()


class TestSlopeIdentities:
    def test_y_slope_is_x_slope_reflected(self):
        # y(z) = -x(-z) implies y'(z) = x'(-z)
        de = solve_deformation(d2_input(5))
        x1 = de.x_deriv(1)
        y = -de.x_deriv(0).neg_arg()
        yp = y.derivative()
        pt = Series.const(LAMBDA, rat(2), 5)
        assert yp.eval(pt).eq_window(x1.neg_arg().eval(pt))

    @pytest.mark.parametrize("z", [rat(2), rat(3), rat(5, 2)])
    def test_log_derivative_pole_structure(self, z):
        # x''/x' == P'/P - 2 sum_k 1/(z+eps_k) for the monic numerator P of x'
        de = solve_deformation(d2_input(6))
        P = de.xprime_numerator()
        pt = Series.const(LAMBDA, z, 6)
        lhs = de.x_at(z, deriv=2) / de.x_at(z, deriv=1)
        rhs = P.derivative().eval(pt) / P.eval(pt)
        for eps in de.eps:
            rhs = rhs - (Series.const(LAMBDA, 1, 6) / (pt + eps)).scale(2)
        assert lhs.eq_window(rhs, upto=4)


class TestZhukovsky:
    def test_involution_fixes_x(self):
        de = solve_deformation(default_input(5))
        zh = Zhukovsky(de)
        t = zh.t_of_point(rat(2))
        z_back = zh.z_of_t(t)
        x_direct = de.x_at(Series.const(HVAR, rat(2), 2 * 5))
        x_sigma = de.x_at(zh.z_of_t(zh.sigma(t)))
        assert de.x_at(z_back).eq_window(x_direct)
        assert x_sigma.eq_window(x_direct)

    def test_branch_point_maps_to_one(self):
        de = solve_deformation(default_input(5))
        zh = Zhukovsky(de)
        ram = de.ramification()
        t = zh.t_of_z(ram.beta_plus)
        one = Series.const(HVAR, 1, t.order)
        assert t.eq_window(one)

    def test_requires_single_eigenvalue(self):
        with pytest.raises(ValueError):
            Zhukovsky(solve_deformation(d2_input(3)))
