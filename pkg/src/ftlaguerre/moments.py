"""Exact moment formulas for trace-power statistics of the Laguerre unitary
ensemble (LUE) and its fixed-trace companion (fLUE).

Five independent computational routes live here:

* a composition sum over ordered multi-indices for arbitrary integer powers
  of T_q = sum_j lambda_j^q,
* a terminating 3F2 representation of the mean of T_q,
* a Narayana-number sum for the same mean,
* three-term recurrences for the spectral moments int x^k rho(x) dx of both
  ensembles, and
* a Schur-function integral evaluation that reproduces the composition sum
  term by term.

All of them return exact rationals and are cross-checked against each other
in the test suite.  The fixed-trace ensemble normalizes the eigenvalues to
sum to one, which forces every moment of T_1 to equal 1 exactly - that
identity is enforced as a table invariant, not just tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import DomainError, InternalConsistencyError, ParameterError
from .exact import (
    Composition,
    Rational,
    RationalLike,
    as_rational,
    binomial,
    compositions,
    falling_factorial,
    hyp3f2_terminating,
    pochhammer,
)

__all__ = [
    "EnsembleParams",
    "MomentTable",
    "flue_Tq_moment_sum",
    "flue_Tq_mean_3f2",
    "narayana",
    "flue_Tq_mean_narayana",
    "mp_limit_moment",
    "lue_moment_recurrence",
    "flue_moment_recurrence",
    "lue_normalization",
    "flue_normalization",
    "schur_flue_integral",
    "flue_Tq_moment_schur",
    "flue_Tq_moment_table",
    "tsallis_moment",
    "purity_pdf_n2",
    "purity_cdf_n2",
]


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters (N, a, tau) of the Laguerre-type ensembles.

    N is the matrix dimension, a the Laguerre exponent and tau = beta/2 the
    half Dyson index (tau = 1 is the unitary case).  a and tau may be any
    rationals with tau > 0; operations that need an integer a say so.
    """

    N: int
    a: Fraction = Fraction(0)
    tau: Fraction = Fraction(1)

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ParameterError("N must be a positive integer")
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "tau", as_rational(self.tau))
        if self.tau <= 0:
            raise ParameterError("tau must be positive")

    @property
    def is_unitary(self) -> bool:
        return self.tau == 1

    @property
    def trace_mean(self) -> Fraction:
        """Mean of sum_j lambda_j under the unnormalized Laguerre weight:
        tau*N*(N-1) + N*(a+1).  Reduces to N(N+a) at tau = 1."""
        return self.tau * self.N * (self.N - 1) + self.N * (self.a + 1)

    def integer_a(self) -> int:
        if self.a.denominator != 1 or self.a < 0:
            raise DomainError(
                f"this operation needs a nonnegative integer a, got {self.a}"
            )
        return int(self.a)

    def require_unitary(self) -> None:
        if not self.is_unitary:
            raise ParameterError(
                f"this route is specific to tau = 1 (unitary case), got tau={self.tau}"
            )


_ENSEMBLES = ("LUE", "fLUE", "Lbeta", "fLbeta")


@dataclass(frozen=True)
class MomentTable:
    """Moments keyed by order, tagged with the statistic, the ensemble and
    the route that produced them (so disagreeing routes can be diffed).

    Two kinds of tables occur: power tables, where ``statistic`` is "Tq" and
    entry k holds <(T_q)^k>; and spectral tables, where ``statistic`` is
    "density" and entry k holds int x^k rho(x) dx.  For the fixed-trace
    ensembles the trace identity sum_j lambda_j = 1 pins entries exactly:
    every T1 power moment is 1, and the order-1 spectral moment is 1.  The
    constructor enforces both.
    """

    statistic: str
    ensemble: str
    entries: Mapping[int, Fraction]
    route: str

    def __post_init__(self):
        if self.ensemble not in _ENSEMBLES:
            raise ParameterError(f"unknown ensemble label {self.ensemble!r}")
        object.__setattr__(
            self,
            "entries",
            {int(k): as_rational(v) for k, v in self.entries.items()},
        )
        if self.ensemble in ("fLUE", "fLbeta"):
            if self.statistic == "T1":
                bad = {k: v for k, v in self.entries.items() if k >= 1 and v != 1}
                if bad:
                    raise InternalConsistencyError(
                        f"fixed-trace T1 moments must all equal 1, got {bad}"
                    )
            if self.statistic == "density" and self.entries.get(1, Fraction(1)) != 1:
                raise InternalConsistencyError(
                    "fixed-trace spectral moment of order 1 must equal 1, "
                    f"got {self.entries[1]}"
                )

    def moment(self, k: int) -> Fraction:
        try:
            return self.entries[k]
        except KeyError:
            raise ParameterError(
                f"moment table ({self.statistic}, {self.ensemble}, {self.route}) "
                f"has no order-{k} entry"
            ) from None

    @property
    def orders(self) -> list[int]:
        return sorted(self.entries)


def _factorial(n: int) -> int:
    if n < 0:
        raise DomainError(f"factorial of negative integer {n}")
    return math.factorial(n)


# ---------------------------------------------------------------------------
# composition-sum route: arbitrary powers of T_q
# ---------------------------------------------------------------------------

def flue_Tq_moment_sum(p: EnsembleParams, q: int, k: int) -> Fraction:
    """<(sum_j lambda_j^q)^k> over the fixed-trace ensemble, by the exact
    sum over weak compositions of k into N parts.

    Each composition kvec contributes a multinomial weight, a product of
    rising factorials and a ratio of Vandermonde-type differences; the
    ratio vanishes whenever two shifted indices q*k_i - i collide, so such
    terms are skipped before any multiplication.
    """
    p.require_unitary()
    a = p.integer_a()
    if q < 0 or k < 0:
        raise DomainError("q and k must be nonnegative integers")
    if q * k + a <= -1:
        raise DomainError("need q*k + a > -1")
    N = p.N
    M = N * (N + a)
    denom_vdm = 1
    for j in range(2, N + 1):
        denom_vdm *= _factorial(j - 1)

    total = Fraction(0)
    k_fact = _factorial(k)
    for kvec in compositions(k, N):
        d = [q * kvec[i] - (i + 1) for i in range(N)]
        if len(set(d)) < N:
            continue  # a vanishing Vandermonde factor kills the term
        num_vdm = 1
        for i in range(N):
            for j in range(i + 1, N):
                num_vdm *= d[i] - d[j]
        weight = Fraction(k_fact)
        for part in kvec:
            weight /= _factorial(part)
        prod = Fraction(1)
        for i in range(N):
            prod *= pochhammer(N + a - i, q * kvec[i])  # (N+a+1-(i+1))
        total += weight * prod * Fraction(num_vdm, denom_vdm)
    return total / pochhammer(M, q * k)


# ---------------------------------------------------------------------------
# hypergeometric route: the mean of T_q
# ---------------------------------------------------------------------------

def flue_Tq_mean_3f2(p: EnsembleParams, q: int) -> Fraction:
    """<sum_j lambda_j^q> over the fixed-trace ensemble via a terminating
    3F2 at unit argument.

    Equal to ``flue_Tq_moment_sum(p, q, 1)`` identically; the two routes
    share no code.  The second lower parameter is 1-(N+q): with it the
    series reproduces the composition sum exactly (and gives N at q = 0),
    whereas 1-(N-q) hits a pole or the wrong value.
    """
    p.require_unitary()
    a = p.integer_a()
    if q < 0:
        raise DomainError("q must be a nonnegative integer")
    N = p.N
    M = N * (N + a)
    series = hyp3f2_terminating(
        1 - N, 1 - (N + a), 1 - q, 1 - (N + q), 1 - (N + a + q)
    )
    prefactor = (
        pochhammer(N + a, q)
        * pochhammer(N, q)
        / (_factorial(q) * pochhammer(M, q))
    )
    return prefactor * series


# ---------------------------------------------------------------------------
# Narayana route
# ---------------------------------------------------------------------------

def narayana(q: int, k: int) -> Fraction:
    """Narayana number (1/q) * binomial(q,k) * binomial(q,k-1)."""
    if q < 1 or k < 1 or k > q:
        raise DomainError(f"narayana needs 1 <= k <= q, got q={q}, k={k}")
    return Fraction(binomial(q, k) * binomial(q, k - 1), q)


def flue_Tq_mean_narayana(p: EnsembleParams, q: int) -> Fraction:
    """<sum_j lambda_j^q> over the fixed-trace ensemble as a Narayana sum:

        (1/(M)_q) * sum_{k=1}^{min(q,N)} N_{q,k} (N+a)_{q-k+1} N!/(N-k)!

    with M = N(N+a).  Matches the 3F2 and composition routes exactly.
    """
    p.require_unitary()
    a = p.integer_a()
    if q < 1:
        raise DomainError("q must be a positive integer")
    N = p.N
    M = N * (N + a)
    total = Fraction(0)
    for k in range(1, min(q, N) + 1):
        total += (
            narayana(q, k)
            * pochhammer(N + a, q - k + 1)
            * falling_factorial(N, k)
        )
    return total / pochhammer(M, q)


def mp_limit_moment(alpha: RationalLike, q: int) -> Fraction:
    """Limiting rescaled mean sum_{k=1}^{q} N_{q,k} alpha^(k-1): the integer
    moments of the Marchenko-Pastur density with ratio parameter alpha."""
    if q < 1:
        raise DomainError("q must be a positive integer")
    alpha = as_rational(alpha)
    return sum(
        (narayana(q, k) * alpha ** (k - 1) for k in range(1, q + 1)),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# spectral-moment recurrences
# ---------------------------------------------------------------------------

def lue_moment_recurrence(p: EnsembleParams, kmax: int) -> MomentTable:
    """Spectral moments m_k = int x^k rho(x) dx of the LUE density for
    k = 0..kmax, from the three-term recurrence

        (k+1) m_k = (2k-1)(a+2N) m_{k-1} + (k-2)((k-1)^2 - a^2) m_{k-2}

    seeded with m_0 = N and m_1 = N^2 + N*a.
    """
    p.require_unitary()
    if kmax < 1:
        raise DomainError("kmax must be >= 1")
    N, a = p.N, p.a
    m = [Fraction(N), Fraction(N * N) + N * a]
    for k in range(2, kmax + 1):
        nxt = (2 * k - 1) * (a + 2 * N) * m[k - 1]
        nxt += (k - 2) * ((k - 1) ** 2 - a * a) * m[k - 2]
        m.append(nxt / (k + 1))
    return MomentTable(
        statistic="density",
        ensemble="LUE",
        entries={k: m[k] for k in range(kmax + 1)},
        route="recurrence",
    )


def flue_moment_recurrence(p: EnsembleParams, kmax: int) -> MomentTable:
    """Spectral moments of the fixed-trace density for k = 0..kmax.

    With M = N(N+a), the recurrence is

        (k+1)(M+k-2)(M+k-1) m_k = (2k-1)(a+2N)(M+k-2) m_{k-1}
                                  + (k-2)((k-1)^2 - a^2) m_{k-2},

    seeded with m_0 = N and m_1 = 1; equivalently m_k(fixed-trace) equals
    the LUE m_k divided by the rising factorial (M)_k.
    """
    p.require_unitary()
    if kmax < 1:
        raise DomainError("kmax must be >= 1")
    N, a = p.N, p.a
    M = N * (N + a)
    m = [Fraction(N), Fraction(1)]
    for k in range(2, kmax + 1):
        lead = (k + 1) * (M + k - 2) * (M + k - 1)
        if lead == 0:
            raise DomainError(
                f"recurrence pivot vanishes at k={k} (M={M}); parameters out of range"
            )
        nxt = (2 * k - 1) * (a + 2 * N) * (M + k - 2) * m[k - 1]
        nxt += (k - 2) * ((k - 1) ** 2 - a * a) * m[k - 2]
        m.append(nxt / lead)
    return MomentTable(
        statistic="density",
        ensemble="fLUE",
        entries={k: m[k] for k in range(kmax + 1)},
        route="recurrence",
    )


# ---------------------------------------------------------------------------
# normalizations and the Schur-integral route
# ---------------------------------------------------------------------------

def lue_normalization(p: EnsembleParams) -> Fraction:
    """Partition function of the unnormalized LUE weight (tau = 1,
    integer a): N! * prod_{l=0}^{N-1} l! (a+l)!."""
    p.require_unitary()
    a = p.integer_a()
    out = Fraction(_factorial(p.N))
    for l in range(p.N):
        out *= _factorial(l) * _factorial(a + l)
    return out


def flue_normalization(p: EnsembleParams) -> Fraction:
    """Partition function of the fixed-trace weight: the LUE one divided
    by (N^2 + a*N - 1)!."""
    a = p.integer_a()
    return lue_normalization(p) / _factorial(p.N * p.N + a * p.N - 1)


def schur_flue_integral(
    p: EnsembleParams, kvec: Union[Composition, Sequence[int]]
) -> Fraction:
    """Exact simplex integral of a Schur polynomial times the squared
    Vandermonde and the product of x_i^a:

        J(kvec) = N! * prod_i (a + k_i + i - 1)!
                     * prod_{i<j} (k_j - k_i + j - i) / (N^2 + aN + |kvec| - 1)!

    The Gamma arguments are pinned by two consistency requirements: J of
    the all-zero index equals the fixed-trace normalization, and N = 1
    gives J = 1 identically.
    """
    p.require_unitary()
    a = p.integer_a()
    parts = tuple(kvec)
    if len(parts) != p.N:
        raise ParameterError(f"index length {len(parts)} != N = {p.N}")
    if any((not isinstance(x, int)) or x < 0 for x in parts):
        raise DomainError("index entries must be nonnegative integers")
    N = p.N
    out = Fraction(_factorial(N))
    for i in range(1, N + 1):
        out *= _factorial(a + parts[i - 1] + i - 1)
    for i in range(N):
        for j in range(i + 1, N):
            out *= parts[j] - parts[i] + (j - i)
    return out / _factorial(N * N + a * N + sum(parts) - 1)


def flue_Tq_moment_schur(p: EnsembleParams, q: int, k: int) -> Fraction:
    """<(T_q)^k> over the fixed-trace ensemble by expanding the power into
    Schur-integral evaluations (multinomial-weighted sum over compositions
    of k, each index scaled by q)."""
    p.require_unitary()
    p.integer_a()
    if q < 0 or k < 0:
        raise DomainError("q and k must be nonnegative integers")
    k_fact = _factorial(k)
    total = Fraction(0)
    for kvec in compositions(k, p.N):
        weight = Fraction(k_fact)
        for part in kvec:
            weight /= _factorial(part)
        total += weight * schur_flue_integral(p, [q * x for x in kvec])
    return total / flue_normalization(p)


def flue_Tq_moment_table(
    p: EnsembleParams, q: int, kmax: int, route: str = "composition-sum"
) -> MomentTable:
    """Power moments <(T_q)^k> for k = 0..kmax as a MomentTable."""
    if route == "composition-sum":
        fn = flue_Tq_moment_sum
    elif route == "schur":
        fn = flue_Tq_moment_schur
    else:
        raise ParameterError(f"unknown power-moment route {route!r}")
    entries = {k: fn(p, q, k) for k in range(kmax + 1)}
    return MomentTable(
        statistic=f"T{q}", ensemble="fLUE", entries=entries, route=route
    )


# ---------------------------------------------------------------------------
# Tsallis-entropy conversion
# ---------------------------------------------------------------------------

def tsallis_moment(
    p: EnsembleParams, q: int, k: int, tq_moments: MomentTable
) -> Fraction:
    """k-th moment of the Tsallis statistic (1/(1-q)) (1 - T_q), converted
    binomially from the power moments of T_q:

        <Ttilde^k> = (1/(1-q))^k sum_{s=0}^{k} (-1)^s binom(k,s) <(T_q)^s>

    The sign convention follows the (1-q) denominator as printed, which
    makes the q = 2 mean negative.
    """
    if q == 1:
        raise DomainError("the Tsallis index q must differ from 1")
    if k < 1:
        raise DomainError("k must be a positive integer")
    if tq_moments.statistic != f"T{q}":
        raise ParameterError(
            f"moment table holds {tq_moments.statistic}, need T{q}"
        )
    total = Fraction(0)
    for s in range(k + 1):
        total += (-1) ** s * binomial(k, s) * tq_moments.moment(s)
    return Fraction(1, 1 - q) ** k * total


# ---------------------------------------------------------------------------
# the N = 2 purity law
# ---------------------------------------------------------------------------

def purity_pdf_n2(a: int, t: RationalLike) -> Fraction:
    """Rational part of the N = 2 purity density at t: the full density is
    the returned value times sqrt(2t - 1), supported on 1/2 < t < 1.

        P(t) = (2a+3)! / (2^(a+1) (a+1)! a!) * (1-t)^a * sqrt(2t-1)
    """
    if a < 0:
        raise DomainError("a must be a nonnegative integer")
    t = as_rational(t)
    if not Fraction(1, 2) < t < 1:
        raise DomainError(f"t={t} outside the open support (1/2, 1)")
    pref = Fraction(
        _factorial(2 * a + 3), 2 ** (a + 1) * _factorial(a + 1) * _factorial(a)
    )
    return pref * (1 - t) ** a


def purity_cdf_n2(a: int, t: float) -> float:
    """Distribution function of the N = 2 purity at t (float evaluation).

    Integrating the density with u = 2s - 1 gives the closed form

        F(t) = c_a/4^(a+1) * sum_{j=0}^{a} binom(a,j) (-1)^j u^(j+3/2)/(j+3/2)

    with u = 2t - 1 and c_a = (2a+3)!/((a+1)! a!); F(1/2) = 0, F(1) = 1
    exactly (the coefficients telescope rationally).
    """
    if a < 0:
        raise DomainError("a must be a nonnegative integer")
    if t <= 0.5:
        return 0.0
    if t >= 1.0:
        return 1.0
    u = 2.0 * t - 1.0
    c_a = Fraction(_factorial(2 * a + 3), _factorial(a + 1) * _factorial(a))
    pref = c_a / Fraction(4) ** (a + 1)
    acc = 0.0
    for j in range(a + 1):
        coeff = pref * binomial(a, j) * Fraction((-1) ** j) / (Fraction(j) + Fraction(3, 2))
        acc += float(coeff) * u ** (j + 1.5)
    return acc
