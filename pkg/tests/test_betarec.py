"""Bidiagonal-recursion purity moments: construction, kernel property,
closed-form checks, cross-route agreement, and the dimension duality."""

import math
from fractions import Fraction

import pytest

from ftlaguerre.betarec import (
    BidiagSystem,
    StateVector,
    advance,
    beta_purity_moments,
    build_system,
    dimension_polynomial,
    duality_gap,
    flue_beta_kappa2,
    init_h0,
)
from ftlaguerre.errors import DomainError
from ftlaguerre.exact import RationalPolynomial, moments_from_cumulants, pochhammer
from ftlaguerre.moments import EnsembleParams, flue_Tq_moment_sum
from ftlaguerre.painleve import flue_purity_cumulants, piv_lue_cumulants

F = Fraction


def mrs_mean(N, tau, a):
    """Closed-form first moment of sum lambda_j^2."""
    g = tau * (N - 1)
    return N * (g + 1 + a) * (2 * g + 2 + a)


def k2_closed(N, tau, a):
    """Closed-form second cumulant of sum lambda_j^2."""
    g = tau * (N - 1)
    return (
        2 * N * (1 + a + g)
        * (10 + 2 * a * a + 9 * a * (1 + g) + g * (19 + tau * (9 * N - 10)))
    )


PARAM_GRID = [
    (1, F(1), F(0)),
    (2, F(1), F(0)),
    (2, F(1, 2), F(0)),
    (3, F(1, 2), F(1, 3)),
    (4, F(3, 2), F(5, 7)),
    (5, F(3), F(2)),
    (4, F(2), F(1)),
]


class TestBuildSystem:
    def test_small_example(self):
        sys = build_system(EnsembleParams(N=1, a=0, tau=F(1, 2)))
        assert sys.A == ((F(-1), F(-1)), (F(0), F(-2)))
        assert sys.B == ((F(0), F(0)), (F(-1, 2), F(-1, 2)))

    def test_corner_entry(self):
        sys = build_system(EnsembleParams(N=3, a=1, tau=2))
        assert sys.A[0][0] == -18

    @pytest.mark.parametrize("N,tau,a", PARAM_GRID)
    def test_row_zero_of_b_vanishes(self, N, tau, a):
        sys = build_system(EnsembleParams(N=N, a=a, tau=tau))
        assert all(x == 0 for x in sys.B[0])

    @pytest.mark.parametrize("N,tau,a", PARAM_GRID)
    def test_band_structure(self, N, tau, a):
        sys = build_system(EnsembleParams(N=N, a=a, tau=tau))
        for i in range(N + 1):
            for j in range(N + 1):
                if j not in (i, i + 1):
                    assert sys.A[i][j] == 0
                if j not in (i, i - 1):
                    assert sys.B[i][j] == 0


class TestInitH0:
    def test_first_entry_formula(self):
        p = EnsembleParams(N=4, a=F(1, 3), tau=F(5, 2))
        h = init_h0(p)
        assert h.entries[0] == 1
        assert h.entries[1] == -(F(5, 2) * 3 + F(1, 3) + 1)

    def test_one_dimensional(self):
        h = init_h0(EnsembleParams(N=1, a=3))
        assert h.entries == (F(1), F(-4))

    @pytest.mark.parametrize("N,tau,a", PARAM_GRID)
    def test_kernel_of_b(self, N, tau, a):
        p = EnsembleParams(N=N, a=a, tau=tau)
        sys = build_system(p)
        h = init_h0(p)
        for row in sys.B:
            assert sum(row[j] * h.entries[j] for j in range(N + 1)) == 0

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    def test_tail_ratio_matches_gamma_product(self, N):
        # (-1)^N h_0^(N) is prod_{j<N} (a+1+j tau), which must agree with
        # the ratio of the ensemble's Gamma-product constants at a+1 and a.
        tau, a = F(1, 2), F(1, 3)
        h = init_h0(EnsembleParams(N=N, a=a, tau=tau))
        ratio = (-1) ** N * h.entries[N]
        log_ratio = sum(
            math.lgamma(float(a + 2 + j * tau)) - math.lgamma(float(a + 1 + j * tau))
            for j in range(N)
        )
        assert math.isclose(float(ratio), math.exp(log_ratio), rel_tol=1e-10)


class TestAdvance:
    def test_single_step_mean(self):
        p = EnsembleParams(N=2, a=0, tau=F(1, 2))
        h1 = advance(build_system(p), init_h0(p))
        assert h1.order == 1
        assert -h1.entries[0] == 9  # m_1 = 2 * (3/2) * 3

    def test_perturbed_start_breaks_mean(self):
        # violating the kernel condition must surface in the moment
        p = EnsembleParams(N=2, a=0, tau=1)
        h0 = init_h0(p)
        bad = StateVector(order=0, entries=(h0.entries[0], h0.entries[1] + 1, h0.entries[2]))
        h1 = advance(build_system(p), bad)
        assert -h1.entries[0] != mrs_mean(2, F(1), F(0))

    def test_dimension_mismatch(self):
        p = EnsembleParams(N=2, a=0)
        with pytest.raises(DomainError):
            advance(build_system(p), StateVector(order=0, entries=(F(1), F(2))))


class TestBetaPurityMoments:
    @pytest.mark.parametrize("N,tau,a", PARAM_GRID)
    def test_first_moment_closed_form(self, N, tau, a):
        table = beta_purity_moments(EnsembleParams(N=N, a=a, tau=tau), 1)
        assert table.moment(1) == mrs_mean(N, tau, a)

    @pytest.mark.parametrize("N,tau,a", PARAM_GRID)
    def test_second_cumulant_closed_form(self, N, tau, a):
        table = beta_purity_moments(EnsembleParams(N=N, a=a, tau=tau), 2)
        assert table.moment(2) - table.moment(1) ** 2 == k2_closed(N, tau, a)

    def test_table_shape(self):
        table = beta_purity_moments(EnsembleParams(N=3, a=1, tau=F(3, 2)), 3)
        assert table.statistic == "T2"
        assert table.ensemble == "Lbeta"
        assert table.route == "bidiagonal-recursion"
        assert table.moment(0) == 1
        assert list(table.orders) == [0, 1, 2, 3]

    def test_one_dimensional_gamma_oracle(self):
        # N=1: the statistic is lambda^2 for lambda ~ Gamma(a+1), so
        # m_q = (a+1)_{2q}
        for a in (F(0), F(1), F(7, 3)):
            table = beta_purity_moments(EnsembleParams(N=1, a=a, tau=F(5, 4)), 3)
            for q in range(4):
                assert table.moment(q) == pochhammer(a + 1, 2 * q)

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    @pytest.mark.parametrize("a", [0, 1, 2, 3])
    def test_tau_one_matches_sigma_route(self, N, a):
        p = EnsembleParams(N=N, a=a)
        table = beta_purity_moments(p, 4)
        m = moments_from_cumulants(piv_lue_cumulants(p, 4))
        for q in range(1, 5):
            assert table.moment(q) == m[q - 1]

    def test_fixed_trace_division(self):
        p = EnsembleParams(N=3, a=F(1, 2), tau=F(3, 2))
        plain = beta_purity_moments(p, 3)
        fixed = beta_purity_moments(p, 3, fixed_trace=True)
        assert fixed.ensemble == "fLbeta"
        c = p.trace_mean
        for q in range(4):
            assert fixed.moment(q) == plain.moment(q) / pochhammer(c, 2 * q)

    def test_fixed_trace_tau_one_matches_composition_sum(self):
        p = EnsembleParams(N=3, a=1)
        fixed = beta_purity_moments(p, 3, fixed_trace=True)
        for k in (1, 2, 3):
            assert fixed.moment(k) == flue_Tq_moment_sum(p, 2, k)

    def test_fixed_trace_moments_in_unit_interval(self):
        for N, tau, a in PARAM_GRID:
            table = beta_purity_moments(
                EnsembleParams(N=N, a=a, tau=tau), 2, fixed_trace=True
            )
            assert 0 < table.moment(2) <= table.moment(1) <= 1

    def test_rejects_negative_order(self):
        with pytest.raises(DomainError):
            beta_purity_moments(EnsembleParams(N=2, a=0), -1)


class TestFlueBetaKappa2:
    def test_pinned_value(self):
        assert flue_beta_kappa2(EnsembleParams(N=2, a=0)) == F(3, 175)

    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    @pytest.mark.parametrize("a", [0, 1, 2, 3])
    def test_tau_one_reduces_to_unitary_closed_form(self, N, a):
        p = EnsembleParams(N=N, a=a)
        assert flue_beta_kappa2(p) == flue_purity_cumulants(p, 2)[1]

    @pytest.mark.parametrize(
        "N,tau,a",
        [(3, F(3), F(2)), (4, F(1, 2), F(1, 3)), (2, F(5, 2), F(0))],
    )
    def test_matches_recursion_route(self, N, tau, a):
        p = EnsembleParams(N=N, a=a, tau=tau)
        table = beta_purity_moments(p, 2, fixed_trace=True)
        kappa2 = table.moment(2) - table.moment(1) ** 2
        assert flue_beta_kappa2(p) == kappa2


class TestDimensionPolynomial:
    def test_first_moment_polynomial(self):
        tau, a = F(1, 2), F(1, 3)
        poly = dimension_polynomial(tau, a, 1)
        x = RationalPolynomial([0, 1])
        expected = (
            x
            * (x * tau + (1 + a - tau))
            * (x * (2 * tau) + (2 + a - 2 * tau))
        )
        assert poly == expected

    def test_degree_bound_and_evaluation(self):
        tau, a = F(3, 2), F(1)
        poly = dimension_polynomial(tau, a, 2)
        assert poly.degree <= 6
        table = beta_purity_moments(EnsembleParams(N=9, a=a, tau=tau), 2)
        assert poly(9) == table.moment(2)

    def test_zeroth_moment(self):
        assert dimension_polynomial(1, 0, 0) == RationalPolynomial([1])


class TestDuality:
    @pytest.mark.parametrize("q", [1, 2, 3])
    @pytest.mark.parametrize("tau,a", [(F(1, 2), F(1, 3)), (F(3), F(2)), (F(2), F(0))])
    def test_gap_vanishes(self, q, tau, a):
        # both sides are degree-3q polynomials of the dimension; checking
        # 3q+1 distinct probes certifies the identity
        for probe in range(1, 3 * q + 2):
            assert duality_gap(tau, a, q, probe) == 0

    def test_gap_vanishes_off_integers(self):
        assert duality_gap(F(1, 2), F(1, 3), 2, F(7, 2)) == 0
