"""Purity cumulants of the Laguerre ensemble from a sigma-Painleve IV
equation, solved order by order in a large-t Laurent expansion.

The logarithmic derivative of the Laplace transform of the squared-trace
statistic satisfies

    (sigma'')^2 - 4 (t sigma' - sigma)^2
        + 4 sigma' (sigma' - 2a) (sigma' + 2N) = 0,

and admits the expansion

    sigma = -2 N t - M / t + (1/2) sum_{n>=0} (-1)^n kappa_{n+1}
            / (4^n n!) * t^(-(2n+3)),       M = N (N + a),

whose coefficients carry the cumulants kappa_n of sum_j lambda_j^2 over
the (unconstrained) Laguerre ensemble.  Substituting the truncated ansatz
makes each even inverse power of t a linear condition on the next unknown
cumulant.  Linearity is not assumed: the solver probes each condition at
three candidate values and requires the second difference to vanish
exactly before dividing.  The two leading orders carry no unknown and must
cancel on their own; both are checked before any solve, and the assembled
residual is re-checked to be identically zero afterwards.

Fixed-trace cumulants follow by transforming to raw moments, dividing the
2p-th rising factorial of M out of the p-th moment, and transforming back.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .errors import DomainError, InternalConsistencyError
from .exact import (
    LaurentSeries,
    cumulants_from_moments,
    moments_from_cumulants,
    pochhammer,
)
from .moments import EnsembleParams

__all__ = ["piv_lue_cumulants", "flue_purity_cumulants"]


def _sigma_series(
    N: int, a: Fraction, kappas: list[Fraction], order: int
) -> LaurentSeries:
    """Truncated expansion of sigma with the given leading cumulants."""
    M = Fraction(N) * (N + a)
    terms: dict[int, Fraction] = {-1: Fraction(-2 * N), 1: -M}
    for n, kap in enumerate(kappas):
        terms[2 * n + 3] = Fraction((-1) ** n, 2 * 4 ** n * factorial(n)) * kap
    return LaurentSeries.from_terms(terms, order)


def _residual(N: int, a: Fraction, kappas: list[Fraction], order: int) -> LaurentSeries:
    """The left side of the sigma equation for the truncated ansatz."""
    sigma = _sigma_series(N, a, kappas, order)
    sp = sigma.differentiate()
    spp = sp.differentiate()
    shift_a = LaurentSeries.from_terms({0: 2 * a}, sp.order)
    shift_n = LaurentSeries.from_terms({0: 2 * N}, sp.order)
    stretched = sp.times_t_power(1) - sigma          # t sigma' - sigma
    cubic = sp * (sp - shift_a) * (sp + shift_n)
    return spp * spp - (stretched * stretched).scale(4) + cubic.scale(4)


def piv_lue_cumulants(p: EnsembleParams, nmax: int) -> list[Fraction]:
    """Cumulants kappa_1..kappa_nmax of sum_j lambda_j^2 over the Laguerre
    ensemble, exactly.

    Works for any rational a (the equation is polynomial in a); tau must
    be 1.  Raises InternalConsistencyError if any matching order fails to
    be linear in its unknown or the residual does not vanish - conditions
    that can only arise from an implementation fault.
    """
    p.require_unitary()
    if nmax < 1:
        raise DomainError("nmax must be a positive integer")
    N, a = p.N, p.a
    order = 2 * nmax + 1

    # leading orders carry no cumulant and must cancel by themselves
    base = _residual(N, a, [], order)
    for j in (0, 2):
        if base.coeff(j) != 0:
            raise InternalConsistencyError(
                f"unforced residual order t^-{j} is {base.coeff(j)}, "
                f"expected exact zero (N={N}, a={a})"
            )

    kappas: list[Fraction] = []
    for m in range(1, nmax + 1):
        j = 2 * m + 2
        r = [
            _residual(N, a, kappas + [Fraction(trial)], order).coeff(j)
            for trial in (0, 1, 2)
        ]
        if r[2] - 2 * r[1] + r[0] != 0:
            raise InternalConsistencyError(
                f"matching order t^-{j} is not linear in cumulant {m} "
                f"(probe values {r})"
            )
        slope = r[1] - r[0]
        if slope == 0:
            raise InternalConsistencyError(
                f"matching order t^-{j} does not determine cumulant {m} "
                f"(zero slope, offset {r[0]})"
            )
        kappas.append(-r[0] / slope)

    final = _residual(N, a, kappas, order)
    bad = {j: final.coeff(j) for j in final.known_exponents() if final.coeff(j) != 0}
    if bad:
        raise InternalConsistencyError(
            f"assembled residual is not identically zero: {bad}"
        )
    return kappas


def flue_purity_cumulants(p: EnsembleParams, nmax: int) -> list[Fraction]:
    """Cumulants kappa_1..kappa_nmax of the purity sum_j lambda_j^2 over
    the fixed-trace ensemble.

    Chain: Laguerre cumulants -> raw moments -> divide the p-th moment by
    (M)_{2p} with M = N(N+a) -> invert back to cumulants.
    """
    kap_lue = piv_lue_cumulants(p, nmax)
    m_lue = moments_from_cumulants(kap_lue)
    M = Fraction(p.N) * (p.N + p.a)
    m_flue = [m_lue[i] / pochhammer(M, 2 * (i + 1)) for i in range(nmax)]
    return cumulants_from_moments(m_flue)
