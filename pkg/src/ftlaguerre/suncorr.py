"""Correlation functions of Haar-distributed special unitary matrices.

The eigenphase density of SU(N) differs from the U(N) one by an
oscillatory term forced by the unit-determinant constraint, and the
two-point correlation picks up three extra order-one correction terms.
This module evaluates the closed forms pointwise, exposes the exact
Fourier modes of the truncated two-point correlation (an integer table,
since everything is a trigonometric polynomial), builds covariances of
linear statistics from those modes, and isolates the bulk-scaling
remainder that shows the constraint changes the leading finite-size
correction from O(1/N^2) to O(1/N).

Conventions: an eigenphase lives in (-pi, pi]; one-point functions
integrate to N; two-point functions use pair counting without
coincident points, so the full two-point integrates to N(N-1).  The
covariance routine works with E[sum_j sum_k] bookkeeping in which the
coincident-pair (j = k) term is carried by the one-point density; this
is what makes its U(N) specialization reproduce the classical
sum_p min(|p|, N) f_p g_{-p} fluctuation formula, which MC confirms.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .errors import DomainError

__all__ = [
    "COINCIDENCE_TOL",
    "rho1_sun",
    "rho1_mode",
    "trace_power_mean",
    "rho2_sun",
    "rho2T_sun",
    "truncated_pair_mode",
    "covariance_linear_stats",
    "bulk_residual",
    "correlation_csv",
    "bulk_residual_csv",
]

#: Angle separations (mod 2pi) below this are evaluated via the analytic
#: coincidence limit sin(Nu/2) cot(u/2) -> N instead of direct division.
COINCIDENCE_TOL = 1e-8

_TWO_PI = 2.0 * math.pi


def _check_dimension(n: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"special unitary results need an integer N >= 2, got {n}")


def _parity(n: int) -> float:
    return -1.0 if n % 2 else 1.0


def rho1_sun(n: int, theta: float) -> float:
    """One-point eigenphase density (N/2pi)(1 - (-1)^N (2/N) cos N theta).

    Integrates to N over a period; the cosine term is the determinant
    constraint's only trace on the one-point level.
    """
    _check_dimension(n)
    return n / _TWO_PI * (1.0 - _parity(n) * (2.0 / n) * math.cos(n * float(theta)))


def rho1_mode(n: int, m: int) -> int:
    """Exact Fourier mode of the one-point density:
    integral of rho1 * e^{i m theta} over a period."""
    _check_dimension(n)
    if m == 0:
        return n
    if abs(m) == n:
        return 1 if n % 2 else -1
    return 0


def trace_power_mean(n: int, p: int) -> int:
    """<Tr U^p> over Haar SU(N): N at p = 0, (-1)^(N-1) at p = +-N, zero
    otherwise.

    The exactness claim is restricted to |p| < 2N: the vanishing at
    |p| = 2N, 3N, ... is not covered by the one-point mode structure,
    so such powers are refused rather than silently reported as zero.
    """
    _check_dimension(n)
    if not isinstance(p, int):
        raise DomainError(f"the trace power must be an integer, got {p}")
    if abs(p) >= 2 * n:
        raise DomainError(
            f"|p| = {abs(p)} is outside the exactness range |p| < 2N = {2 * n}"
        )
    if p == 0:
        return n
    if abs(p) == n:
        return -1 if n % 2 == 0 else 1
    return 0


def _split_angles(theta: float, theta_prime: float) -> tuple[float, float, bool]:
    """Reduce to (separation u in [-pi, pi], equivalent theta', flag).

    theta' is replaced by the 2pi-equivalent angle theta - u so that the
    difference of the returned pair is exactly u; the flag marks a
    coincident pair (|u| below COINCIDENCE_TOL)."""
    theta = float(theta)
    u = math.remainder(theta - float(theta_prime), _TWO_PI)
    return u, theta - u, abs(u) < COINCIDENCE_TOL


def rho2_sun(n: int, theta: float, theta_prime: float) -> float:
    """Two-point eigenphase correlation of SU(N).

    Evaluated as the U(N) two-point function plus the three correction
    terms; coincident arguments (mod 2pi, within COINCIDENCE_TOL) go
    through the analytic limit, where the value is exactly zero plus the
    smooth remainder (level repulsion)."""
    _check_dimension(n)
    u, tp, coincident = _split_angles(theta, theta_prime)
    theta = float(theta)
    sgn = _parity(n)
    half_sum = 0.5 * n * (theta + tp)
    if coincident:
        ratio = float(n)  # sin(Nu/2)/sin(u/2)
        bracket = 0.0  # sin(Nu/2) cot(u/2) - N cos(Nu/2)
    else:
        ratio = math.sin(0.5 * n * u) / math.sin(0.5 * u)
        bracket = math.sin(0.5 * n * u) / math.tan(0.5 * u) - n * math.cos(0.5 * n * u)
    un_part = (n / _TWO_PI) ** 2 - (ratio / _TWO_PI) ** 2
    term_osc = (2.0 / math.pi**2) * math.cos(2.0 * half_sum) * math.sin(0.5 * u) ** 2
    term_mix = sgn / math.pi**2 * math.cos(half_sum) * bracket
    return un_part + term_osc + term_mix


def rho2T_sun(n: int, theta: float, theta_prime: float) -> float:
    """Truncated two-point correlation of SU(N): rho2 - rho1 x rho1,
    evaluated from its own closed form (all correction terms order one).

    Pointwise agreement of rho2_sun with rho1*rho1 + rho2T_sun is a
    nontrivial trigonometric identity between the two printed forms and
    is enforced in the test suite."""
    _check_dimension(n)
    u, tp, coincident = _split_angles(theta, theta_prime)
    theta = float(theta)
    sgn = _parity(n)
    half_sum = 0.5 * n * (theta + tp)
    if coincident:
        ratio = float(n)
        cot_part = float(n)  # sin(Nu/2) cot(u/2)
    else:
        ratio = math.sin(0.5 * n * u) / math.sin(0.5 * u)
        cot_part = math.sin(0.5 * n * u) / math.tan(0.5 * u)
    un_truncated = -((ratio / _TWO_PI) ** 2)
    term_osc = (2.0 / math.pi**2) * math.cos(2.0 * half_sum) * math.sin(0.5 * u) ** 2
    term_mix = sgn / math.pi**2 * math.cos(half_sum) * cot_part
    term_det = -math.cos(n * theta) * math.cos(n * tp) / math.pi**2
    return un_truncated + term_osc + term_mix + term_det


def truncated_pair_mode(n: int, r: int, s: int) -> int:
    """Exact Fourier mode of the truncated two-point correlation:
    the double integral of rho2T * e^{i(r theta + s theta')}.

    rho2T is a trigonometric polynomial, so the table is integer-valued
    and finite: a sine-kernel diagonal, determinant-constraint entries
    on |r| = |s| = N and (N+1, N-1), a parity-weighted anti-diagonal
    r + s = +-N, and the screening column at (+-N, 0)."""
    _check_dimension(n)
    total = 0
    if s == -r and abs(r) <= n - 1:
        total -= n - abs(r)
    if abs(r) == n and abs(s) == n:
        total += 1 if r == s else -1
    if {abs(r), abs(s)} == {n - 1, n + 1} and (r > 0) == (s > 0):
        total -= 1
    if abs(r + s) == n and 1 <= abs(r) <= n - 1 and 1 <= abs(s) <= n - 1:
        total += 2 * (1 if n % 2 == 0 else -1)
    if (abs(r) == n and s == 0) or (r == 0 and abs(s) == n):
        total += 1 if n % 2 == 0 else -1
    return total


def covariance_linear_stats(
    n: int,
    f_modes: Mapping[int, complex],
    g_modes: Mapping[int, complex],
) -> float:
    """Covariance of the linear statistics sum_j f(theta_j) and
    sum_j g(theta_j) over Haar SU(N), for f, g given by finite Fourier
    coefficient maps {mode: coefficient} with f(t) = sum f_r e^{i r t}.

    Exact mode bookkeeping: the fluctuation integral against rho2T
    reduces to sum_{r,s} f_r g_s c_{r,s}, and the coincident-pair term
    contributes sum_{r,s} f_r g_s rho1_mode(r+s).  Constants drop out.
    Coefficient maps must describe real-valued statistics (Hermitian
    symmetry f_{-r} = conj(f_r)) or at least combine to a real pairing.
    """
    _check_dimension(n)
    total = 0.0 + 0.0j
    for r, fr in f_modes.items():
        if not isinstance(r, int):
            raise DomainError(f"Fourier modes must be integers, got {r!r}")
        for s, gs in g_modes.items():
            if not isinstance(s, int):
                raise DomainError(f"Fourier modes must be integers, got {s!r}")
            weight = rho1_mode(n, r + s) + truncated_pair_mode(n, r, s)
            if weight:
                total += complex(fr) * complex(gs) * weight
    if abs(total.imag) > 1e-12 * (1.0 + abs(total.real)):
        raise DomainError(
            "the mode maps do not define a real covariance; "
            "real statistics need Hermitian-symmetric coefficients"
        )
    return total.real


def bulk_residual(
    n: int, x: float, x_prime: float, *, cross_term: bool = True
) -> float:
    """Remainder of the bulk-scaled truncated two-point correlation.

    With the unfolding theta = 2 pi x / N, returns

        (2pi/N)^2 rho2T(2pi x/N, 2pi x'/N) + sinc^2(pi(x-x'))
            - (4 (-1)^N / N) cos(pi(x+x')) sinc(pi(x-x'))

    which is O(1/N^2) at fixed (x, x').  With ``cross_term=False`` the
    1/N determinant term is kept in the remainder, which is then only
    O(1/N) — the scaling contrast is the point of the expansion.
    """
    _check_dimension(n)
    x = float(x)
    x_prime = float(x_prime)
    if x == x_prime:
        raise DomainError("bulk remainder needs distinct scaled positions")
    scaled = (_TWO_PI / n) ** 2 * rho2T_sun(n, _TWO_PI * x / n, _TWO_PI * x_prime / n)
    d = math.pi * (x - x_prime)
    sinc = math.sin(d) / d
    out = scaled + sinc * sinc
    if cross_term:
        out -= (4.0 * _parity(n) / n) * math.cos(math.pi * (x + x_prime)) * sinc
    return out


def correlation_csv(n: int, thetas: Iterable[float], theta_primes: Iterable[float]) -> str:
    """Two-point correlation on the product grid as CSV text with
    columns theta, theta_prime, rho2, rho2T."""
    _check_dimension(n)
    lines = [f"# N={n}", "theta,theta_prime,rho2,rho2T"]
    primes = [float(tp) for tp in theta_primes]
    for t in thetas:
        for tp in primes:
            lines.append(
                f"{float(t):.17g},{tp:.17g},"
                f"{rho2_sun(n, t, tp):.17g},{rho2T_sun(n, t, tp):.17g}"
            )
    return "\n".join(lines) + "\n"


def bulk_residual_csv(n: int, xs: Iterable[float], x_primes: Iterable[float]) -> str:
    """Bulk-scaling remainder on the product grid as CSV text with
    columns x, x_prime, bulk_residual; coincident pairs are left out
    (the remainder is defined for distinct positions)."""
    _check_dimension(n)
    lines = [f"# N={n}", "x,x_prime,bulk_residual"]
    primes = [float(xp) for xp in x_primes]
    for x in xs:
        for xp in primes:
            if float(x) == xp:
                continue
            lines.append(f"{float(x):.17g},{xp:.17g},{bulk_residual(n, x, xp):.17g}")
    return "\n".join(lines) + "\n"
