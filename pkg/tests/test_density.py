"""Density construction against the kernel oracle, exact ODE certificates
with negative controls, and the hard-edge limit law."""

import math
from fractions import Fraction

import pytest
from scipy import integrate

from ftlaguerre.density import (
    FlueDensity,
    LueDensity,
    certify_matrix_ode_flue,
    certify_matrix_ode_lue,
    certify_ode_flue,
    certify_ode_mp,
    certify_ode_u2,
    density_csv,
    flue_density_from_lue,
    flue_ode_coefficients,
    lue_density,
    mp_density,
    mp_support,
)
from ftlaguerre.errors import ConventionError, DomainError, ParameterError
from ftlaguerre.exact import RationalPolynomial
from ftlaguerre.moments import EnsembleParams, flue_moment_recurrence, lue_moment_recurrence, lue_normalization

F = Fraction

GRID = [(N, a) for N in (2, 3, 4, 5) for a in (0, 1, 2, 3)]


class TestLueDensity:
    def test_single_eigenvalue(self):
        d = lue_density(EnsembleParams(N=1, a=0))
        assert d.alpha == RationalPolynomial([1])

    def test_two_eigenvalues(self):
        d = lue_density(EnsembleParams(N=2, a=0))
        assert d.alpha == RationalPolynomial([2, -2, 1])

    @pytest.mark.parametrize("N,a", GRID)
    def test_leading_coefficient(self, N, a):
        d = lue_density(EnsembleParams(N=N, a=a))
        assert d.alpha.degree == 2 * (N - 1)
        lead = d.alpha.coeff(2 * (N - 1))
        assert lead == F(1, math.factorial(N - 1) * math.factorial(a + N - 1))
        # same thing through the normalization-constant ratio
        cn = lue_normalization(EnsembleParams(N=N, a=a))
        cn1 = lue_normalization(EnsembleParams(N=N - 1, a=a)) if N > 1 else F(1)
        assert lead == N * cn1 / cn

    @pytest.mark.parametrize("N,a", GRID)
    def test_mass(self, N, a):
        assert lue_density(EnsembleParams(N=N, a=a)).moment(0) == N

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    @pytest.mark.parametrize("a", [0, 1, 3])
    def test_moments_match_recurrence(self, N, a):
        p = EnsembleParams(N=N, a=a)
        d = lue_density(p)
        table = lue_moment_recurrence(p, 6)
        for k in range(7):
            assert d.moment(k) == table.moment(k)

    def test_rejects_non_unitary(self):
        with pytest.raises(ParameterError):
            lue_density(EnsembleParams(N=2, a=0, tau=F(1, 2)))

    def test_rejects_fractional_a(self):
        with pytest.raises(DomainError):
            lue_density(EnsembleParams(N=2, a=F(1, 2)))


class TestScalarOdeLue:
    @pytest.mark.parametrize("N,a", [(1, 0), (3, 2)] + GRID)
    def test_certified(self, N, a):
        cert = certify_ode_u2(lue_density(EnsembleParams(N=N, a=a)))
        assert cert
        assert cert.witness is None

    def test_negative_control(self):
        d = lue_density(EnsembleParams(N=2, a=0))
        bad = LueDensity(N=2, a=0, alpha=d.alpha + RationalPolynomial([0, 1]))
        cert = certify_ode_u2(bad)
        assert not cert
        assert not cert.witness.is_zero


class TestMatrixOdeLue:
    @pytest.mark.parametrize("N,a", [(2, 1), (4, 0)] + GRID)
    def test_certified(self, N, a):
        assert certify_matrix_ode_lue(lue_density(EnsembleParams(N=N, a=a)))

    def test_negative_control(self):
        bad = LueDensity(N=3, a=0, alpha=RationalPolynomial([1, 2, 3, 4, 5]))
        cert = certify_matrix_ode_lue(bad)
        assert not cert
        assert cert.witness is not None


class TestFlueDensity:
    def test_two_eigenvalue_polynomial(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=2, a=0)))
        assert d.as_polynomial() == RationalPolynomial([6, -24, 24])

    @pytest.mark.parametrize("N,a", GRID)
    def test_mass_and_mean(self, N, a):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=N, a=a)))
        assert d.moment(0) == N
        assert d.moment(1) == 1

    @pytest.mark.parametrize("N,a", [(2, 0), (3, 1), (4, 2)])
    def test_moments_match_recurrence(self, N, a):
        p = EnsembleParams(N=N, a=a)
        d = flue_density_from_lue(lue_density(p))
        table = flue_moment_recurrence(p, 5)
        for k in range(6):
            assert d.moment(k) == table.moment(k)

    def test_rejects_single_eigenvalue(self):
        with pytest.raises(DomainError):
            flue_density_from_lue(lue_density(EnsembleParams(N=1, a=0)))

    def test_broken_convention_detected(self):
        wrong = LueDensity(N=2, a=0, alpha=RationalPolynomial([2, -2, 2]))
        with pytest.raises(ConventionError):
            flue_density_from_lue(wrong)

    def test_value_outside_support(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=2, a=0)))
        assert d.value_exact(F(3, 2)) == 0
        assert d.value_exact(F(-1, 2)) == 0
        assert d.value_exact(F(1, 4)) == F(3, 2)

    def test_exponent_validation(self):
        with pytest.raises(DomainError):
            FlueDensity(N=2, a=0, terms={-1: F(1)})


class TestScalarOdeFlue:
    @pytest.mark.parametrize("N,a", GRID)
    def test_certified(self, N, a):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=N, a=a)))
        assert certify_ode_flue(d)

    def test_perturbed_density_fails(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=2, a=0)))
        terms = dict(d.terms)
        terms[0] += 1
        cert = certify_ode_flue(FlueDensity(N=2, a=0, terms=terms))
        assert not cert
        assert len(cert.witness) > 0

    def test_perturbed_coefficient_fails(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=3, a=1)))
        f = d.as_polynomial()
        c0, c1, c2, c3 = flue_ode_coefficients(3, 1)
        good = (
            c3 * f.derivative().derivative().derivative()
            + c2 * f.derivative().derivative()
            + c1 * f.derivative()
            + c0 * f
        )
        assert good.is_zero
        bad = good + (RationalPolynomial([1]) * f)  # c0 -> c0 + 1
        assert not bad.is_zero


class TestMatrixOdeFlue:
    @pytest.mark.parametrize("N,a", GRID)
    def test_certified(self, N, a):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=N, a=a)))
        assert certify_matrix_ode_flue(d)

    def test_sign_flip_fails(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=2, a=0)))
        cert = certify_matrix_ode_flue(d, mix=((1, 0, 0), (-1, 0, 0), (0, 2, -1)))
        assert not cert
        assert len(cert.witness) > 0

    def test_structure_validation(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=2, a=0)))
        with pytest.raises(DomainError):
            certify_matrix_ode_flue(d, mix=((1, 1, 0), (-1, 0, 0), (0, -2, -1)))
        with pytest.raises(DomainError):
            certify_matrix_ode_flue(
                d, lin=((0, 0, 0), (0, -1, 2), (0, 0, 0))
            )


class TestMpLimit:
    def test_support_edges(self):
        assert mp_support(0) == (0.0, 4.0)
        lo, hi = mp_support(3)
        assert math.isclose(lo, 1.0) and math.isclose(hi, 9.0)

    def test_density_vanishes_at_edges_and_outside(self):
        lo, hi = mp_support(3)
        assert mp_density(3, lo) == 0.0
        assert mp_density(3, hi) == 0.0
        assert mp_density(3, 0.5) == 0.0
        assert mp_density(3, 10.0) == 0.0
        assert mp_density(3, 4.0) > 0.0

    @pytest.mark.parametrize("alpha", [0, 1, 3])
    def test_quadrature_mass_and_mean(self, alpha):
        lo, hi = mp_support(alpha)
        mass, _ = integrate.quad(lambda y: mp_density(alpha, y), lo, hi, limit=200)
        mean, _ = integrate.quad(
            lambda y: y * mp_density(alpha, y), lo, hi, limit=200
        )
        assert abs(mass - 1) < 1e-8
        assert abs(mean - (1 + alpha)) < 1e-8

    def test_rejects_negative_shape(self):
        with pytest.raises(DomainError):
            mp_support(F(-1, 2))

    @pytest.mark.parametrize("alpha", [0, 3, F(1, 2)])
    def test_ode_certified(self, alpha):
        assert certify_ode_mp(alpha)

    def test_ode_negative_control(self):
        cert = certify_ode_mp(3, linear_shift=1e-3)
        assert not cert
        assert len(cert.witness) > 0

    def test_ode_point_floor(self):
        with pytest.raises(DomainError):
            certify_ode_mp(1, points=10)


class TestCsvExport:
    def test_flue_table(self):
        d = flue_density_from_lue(lue_density(EnsembleParams(N=2, a=0)))
        out = density_csv(d, [F(1, 4), F(1, 2), F(3, 4)], digits=6)
        lines = out.strip().splitlines()
        assert lines[0] == "x,rho"
        assert lines[1] == "0.250000,1.500000"
        assert lines[2] == "0.500000,0.000000"
        assert lines[3] == "0.750000,1.500000"

    def test_lue_value(self):
        d = lue_density(EnsembleParams(N=1, a=0))
        out = density_csv(d, [F(1)], digits=10)
        row = out.strip().splitlines()[1]
        assert row == f"1.0000000000,{math.exp(-1):.10f}"

    def test_rejects_bad_digits(self):
        d = lue_density(EnsembleParams(N=1, a=0))
        with pytest.raises(DomainError):
            density_csv(d, [F(1)], digits=0)
