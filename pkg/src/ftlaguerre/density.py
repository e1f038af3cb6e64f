"""Exact spectral densities for the Laguerre ensemble at beta = 2, their
fixed-trace transform, and certified differential equations.

The plain-ensemble density has the structure rho(x) = x^a e^{-x} P(x)
with P a polynomial of degree 2(N-1).  It is constructed here from the
orthogonal-polynomial kernel (the sum of N squared normalized Laguerre
polynomials against the weight), which keeps the construction independent
of every differential equation it is later checked against.

The fixed-trace density follows monomial by monomial through the inverse
Laplace transform:

    alpha_p x^(a+p) e^{-x}  ->  Gamma(M)/e_p!  x^(a+p) (1-x)^(e_p),

with M = N(N+a) and e_p = (N-1)a + N^2 - 2 - p, making the result a plain
polynomial of degree Na + N^2 - 2 supported on (0, 1).  The exponent and
Gamma placement are pinned by the two integral invariants (total mass N,
first moment 1), which the constructor enforces.

Certifications return a Certificate rather than raising: a passing
certificate is truthy, a failing one carries the nonzero residual (or its
nonzero point evaluations) as a witness.  Scalar/matrix equation checks
for the plain ensemble reduce to a single polynomial identity; the
fixed-trace ones are certified by exact evaluation at more rational
points than the residual's degree bound, and the Marchenko-Pastur limit
law is checked in floating point on a dense interior grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import factorial
from typing import Any, Sequence

from .errors import ConventionError, DomainError
from .exact import (
    RationalLike,
    RationalPolynomial,
    as_rational,
    binomial,
)
from .moments import EnsembleParams

__all__ = [
    "Certificate",
    "LueDensity",
    "FlueDensity",
    "lue_density",
    "flue_density_from_lue",
    "certify_ode_u2",
    "certify_ode_flue",
    "flue_ode_coefficients",
    "certify_matrix_ode_lue",
    "certify_matrix_ode_flue",
    "mp_support",
    "mp_density",
    "certify_ode_mp",
    "density_csv",
]

_X = RationalPolynomial.monomial(1)


@dataclass(frozen=True)
class Certificate:
    """Outcome of an identity check; truthy iff the identity held exactly.

    On failure `witness` carries the offending data: the nonzero residual
    polynomial for symbolic checks, or a list of (point, value) pairs for
    evaluation-based ones.
    """

    ok: bool
    label: str
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class LueDensity:
    """Density x^a e^{-x} * alpha(x) of the N-eigenvalue ensemble."""

    N: int
    a: int
    alpha: RationalPolynomial

    def moment(self, k: int) -> Fraction:
        """Exact k-th moment, integrating each monomial against the weight."""
        if k < 0:
            raise DomainError("moment order must be nonnegative")
        return sum(
            (
                c * factorial(self.a + p + k)
                for p, c in enumerate(self.alpha.coeffs)
            ),
            Fraction(0),
        )

    def value_decimal(self, x: Fraction, digits: int) -> Decimal:
        """rho(x) to `digits` significant decimal work precision."""
        with localcontext() as ctx:
            ctx.prec = digits + 10
            if x == 0:
                poly = self.alpha(0) if self.a == 0 else Fraction(0)
                return Decimal(poly.numerator) / Decimal(poly.denominator)
            xd = Decimal(x.numerator) / Decimal(x.denominator)
            poly = self.alpha(x)
            pd = Decimal(poly.numerator) / Decimal(poly.denominator)
            return xd ** self.a * (-xd).exp() * pd


@dataclass(frozen=True)
class FlueDensity:
    """Trace-normalized density sum_e c_e x^(E-e) (1-x)^e on (0, 1),
    E = Na + N^2 - 2."""

    N: int
    a: int
    terms: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "terms",
            {int(e): as_rational(c) for e, c in self.terms.items()},
        )
        if any(e < 0 or e > self.top_exponent for e in self.terms):
            raise DomainError("term exponent outside [0, E]")

    @property
    def top_exponent(self) -> int:
        return self.N * self.a + self.N * self.N - 2

    def as_polynomial(self) -> RationalPolynomial:
        E = self.top_exponent
        total = RationalPolynomial.zero()
        for e, c in self.terms.items():
            one_minus = RationalPolynomial([1, -1])
            term = RationalPolynomial([c])
            for _ in range(e):
                term = term * one_minus
            total = total + term.shift(E - e)
        return total

    def moment(self, k: int) -> Fraction:
        """Exact k-th moment via Beta integrals of each term."""
        if k < 0:
            raise DomainError("moment order must be nonnegative")
        E = self.top_exponent
        return sum(
            (
                c * Fraction(
                    factorial(E - e + k) * factorial(e), factorial(E + k + 1)
                )
                for e, c in self.terms.items()
            ),
            Fraction(0),
        )

    def value_exact(self, x: RationalLike) -> Fraction:
        x = as_rational(x)
        if x <= 0 or x >= 1:
            return Fraction(0)
        return self.as_polynomial()(x)


def _laguerre(j: int, a: int) -> RationalPolynomial:
    """Generalized Laguerre polynomial of degree j."""
    return RationalPolynomial(
        [Fraction((-1) ** i * binomial(j + a, j - i), factorial(i)) for i in range(j + 1)]
    )


def lue_density(p: EnsembleParams) -> LueDensity:
    """Exact density from the Christoffel-Darboux kernel diagonal:
    rho(x) = x^a e^{-x} sum_{j<N} j!/(j+a)! L_j^(a)(x)^2."""
    p.require_unitary()
    a = p.integer_a()
    total = RationalPolynomial.zero()
    for j in range(p.N):
        lj = _laguerre(j, a)
        total = total + lj * lj * Fraction(factorial(j), factorial(j + a))
    return LueDensity(N=p.N, a=a, alpha=total)


def certify_ode_u2(d: LueDensity) -> Certificate:
    """Third-order scalar equation for the plain density.

    With rho = x^a e^{-x} P, the combination x^k rho^(k) equals
    x^a e^{-x} R_k where R_0 = P and R_{k+1} = (a-k-x) R_k + x R_k'.
    Factoring the weight turns the equation into one polynomial identity.
    """
    N, a = d.N, d.a
    rs = [d.alpha]
    for k in range(3):
        prev = rs[-1]
        rs.append(prev * (a - k) - prev.shift(1) + prev.derivative().shift(1))
    quad = RationalPolynomial([a * a - 2, -2 * (a + 2 * N), 1])
    lin = RationalPolynomial([-a * a, a + 2 * N])
    residual = rs[3] + rs[2] * 4 - quad * rs[1] + lin * rs[0]
    return Certificate(
        ok=residual.is_zero,
        label="scalar-ode-lue",
        witness=None if residual.is_zero else residual,
    )


def certify_matrix_ode_lue(d: LueDensity) -> Certificate:
    """Three-component first-order system for the plain density.

    Seeding component 0 with the density, rows 0 and 1 determine the
    other two components as exact rational polynomials; row 2 must then
    hold identically.  Writing each component as weight * S_i, the row-2
    residual reduces to x (S_2' + 2 S_1).
    """
    N, a = d.N, d.a
    s0 = d.alpha
    conj = lambda s: s * a - s.shift(1) + s.derivative().shift(1)  # noqa: E731
    s1 = (s0 * (2 * a) - s0.shift(1) * 2 + s0.derivative().shift(1)) * Fraction(
        1, 2 * (N + 1)
    )
    s2 = (conj(s1) + s0.shift(1) + s1) * Fraction(1, N)
    residual = (s2.derivative() + s1 * 2).shift(1)
    return Certificate(
        ok=residual.is_zero,
        label="matrix-ode-lue",
        witness=None if residual.is_zero else residual,
    )


def flue_density_from_lue(d: LueDensity) -> FlueDensity:
    """Map each monomial of the plain density through the inverse Laplace
    transform to the trace-normalized one.

    The resulting total mass and first moment are checked exactly; any
    mismatch means the exponent/Gamma convention drifted and raises
    ConventionError.
    """
    N, a = d.N, d.a
    E = N * a + N * N - 2
    if E - 2 * (N - 1) < 0:
        raise DomainError(
            f"no polynomial trace-normalized density at N={N}, a={a}"
        )
    M = N * (N + a)
    terms: dict[int, Fraction] = {}
    for p, c in enumerate(d.alpha.coeffs):
        if c == 0:
            continue
        e = E - a - p
        terms[e] = terms.get(e, Fraction(0)) + c * Fraction(
            factorial(M - 1), factorial(e)
        )
    out = FlueDensity(N=N, a=a, terms=terms)
    mass, mean = out.moment(0), out.moment(1)
    if mass != N or mean != 1:
        raise ConventionError(
            f"trace-normalized density has mass {mass} (want {N}) and "
            f"first moment {mean} (want 1); exponent convention broken"
        )
    return out


def flue_ode_coefficients(
    N: int, a: int
) -> tuple[RationalPolynomial, RationalPolynomial, RationalPolynomial, RationalPolynomial]:
    """Coefficients (c0, c1, c2, c3) of the third-order equation
    sum_k c_k(x) f^(k)(x) = 0 satisfied by the trace-normalized density."""
    M = N * N + a * N
    s = 2 * N + a
    c0 = RationalPolynomial([-a * a, s * (M - 2)])
    c1 = RationalPolynomial([0, -(a * a - 2), s * (2 * M - 7), -(M - 4) * (M - 3)])
    c2 = RationalPolynomial([0, 0, 4, -2 * s, 2 * (M - 4)])
    c3 = RationalPolynomial([0, 0, 0, 1, 0, -1])
    return c0, c1, c2, c3


def _evaluate_certificate(
    residual: RationalPolynomial, degree_bound: int, label: str
) -> Certificate:
    """Certify a polynomial identity by exact evaluation at more interior
    rational points of (0, 1) than the residual's degree bound."""
    n = max(degree_bound, residual.degree) + 1
    bad = []
    for i in range(1, n + 1):
        x = Fraction(i, n + 1)
        v = residual(x)
        if v != 0:
            bad.append((x, v))
    return Certificate(ok=not bad, label=label, witness=bad or None)


def certify_ode_flue(d: FlueDensity) -> Certificate:
    """Third-order scalar equation for the trace-normalized density,
    certified by exact point evaluation."""
    f = d.as_polynomial()
    c0, c1, c2, c3 = flue_ode_coefficients(d.N, d.a)
    df = f.derivative()
    d2f = df.derivative()
    d3f = d2f.derivative()
    residual = c3 * d3f + c2 * d2f + c1 * df + c0 * f
    return _evaluate_certificate(residual, f.degree + 2, "scalar-ode-flue")


_FLUE_MIX_DEFAULT = ((1, 0, 0), (-1, 0, 0), (0, -2, -1))


def _flue_lin_default(N: int, a: int) -> tuple[tuple[int, ...], ...]:
    return ((-a, 2 * (N + 1), 0), (0, -1, N), (0, 0, a))


def certify_matrix_ode_flue(
    d: FlueDensity,
    mix: Sequence[Sequence[int]] | None = None,
    lin: Sequence[Sequence[int]] | None = None,
) -> Certificate:
    """Three-component system with the mixed operator E x - x^2 d/dx.

    Row r reads  x I_r' = (E x - x^2 d/dx)(mix[r] . I) + lin[r] . I.
    Component 0 is seeded with the density; rows 0 and 1 are solved for
    components 1 and 2, and row 2 is certified by exact evaluation.  The
    `mix`/`lin` structure matrices are overridable so a deliberately
    corrupted system can be shown to fail.
    """
    N, a = d.N, d.a
    E = d.top_exponent
    if mix is None:
        mix = _FLUE_MIX_DEFAULT
    if lin is None:
        lin = _flue_lin_default(N, a)
    if mix[0][1] or mix[0][2] or mix[1][1] or mix[1][2]:
        raise DomainError("rows 0 and 1 of mix may only involve component 0")
    if lin[0][1] == 0 or lin[1][2] == 0:
        raise DomainError("rows 0 and 1 must be solvable for the next component")

    def op(g: RationalPolynomial) -> RationalPolynomial:
        return g.shift(1) * E - g.derivative().shift(2)

    i0 = d.as_polynomial()
    i1 = (
        i0.derivative().shift(1) - op(i0) * mix[0][0] - i0 * lin[0][0]
    ) * Fraction(1, lin[0][1])
    i2 = (
        i1.derivative().shift(1) - op(i0) * mix[1][0] - i0 * lin[1][0] - i1 * lin[1][1]
    ) * Fraction(1, lin[1][2])
    comps = (i0, i1, i2)
    residual = i2.derivative().shift(1)
    for c in range(3):
        residual = residual - op(comps[c]) * mix[2][c] - comps[c] * lin[2][c]
    return _evaluate_certificate(residual, E + 4, "matrix-ode-flue")


def mp_support(alpha: RationalLike) -> tuple[float, float]:
    """Support edges (sqrt(alpha+1) -+ 1)^2 of the hard-edge limit law."""
    af = float(as_rational(alpha))
    if af < 0:
        raise DomainError("shape parameter must be nonnegative")
    r = math.sqrt(af + 1)
    return (r - 1) ** 2, (r + 1) ** 2


def mp_density(alpha: RationalLike, y: float) -> float:
    """Limit law (1/2 pi y) sqrt((y - lo)(hi - y)), zero outside [lo, hi]."""
    lo, hi = mp_support(alpha)
    if y <= lo or y >= hi:
        return 0.0
    return math.sqrt((y - lo) * (hi - y)) / (2 * math.pi * y)


def certify_ode_mp(
    alpha: RationalLike,
    points: int = 64,
    rel_tol: float = 1e-10,
    linear_shift: float = 0.0,
) -> Certificate:
    """First-order equation for the limit law, checked pointwise.

    Dividing out f leaves

      -y (y^2 - 2(alpha+2) y + alpha^2) (f'/f) + (alpha+2) y - alpha^2 = 0

    with f'/f available in closed form from the square-root density, so the
    residual is evaluated directly on an interior grid.  `linear_shift`
    perturbs the first-order coefficient (alpha+2) of the undifferentiated
    term, for negative controls.
    """
    if points < 50:
        raise DomainError("need at least 50 interior sample points")
    af = float(as_rational(alpha))
    lo, hi = mp_support(alpha)
    bad = []
    for k in range(1, points + 1):
        y = lo + (hi - lo) * k / (points + 1)
        logd = -1.0 / y + 0.5 / (y - lo) - 0.5 / (hi - y)
        cubic = -y * (y * y - 2 * (af + 2) * y + af * af) * logd
        linear = (af + 2 + linear_shift) * y - af * af
        r = cubic + linear
        scale = abs(cubic) + abs(linear) + 1e-300
        if abs(r) > rel_tol * scale:
            bad.append((y, r))
    return Certificate(ok=not bad, label="mp-ode", witness=bad or None)


def _render(v: Fraction | Decimal, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 10
        if isinstance(v, Fraction):
            v = Decimal(v.numerator) / Decimal(v.denominator)
        # fixed-point, never scientific: str() flips to E-notation past 1e-6
        return f"{v:.{digits}f}"


def density_csv(
    d: LueDensity | FlueDensity, grid: Sequence[RationalLike], digits: int = 12
) -> str:
    """Tabulate the density on a rational grid as CSV text."""
    if digits < 1:
        raise DomainError("digits must be positive")
    lines = ["x,rho"]
    for raw in grid:
        x = as_rational(raw)
        if isinstance(d, FlueDensity):
            val: Fraction | Decimal = d.value_exact(x)
        else:
            if x < 0:
                val = Fraction(0)
            else:
                val = d.value_decimal(x, digits)
        lines.append(f"{_render(Fraction(x), digits)},{_render(val, digits)}")
    return "\n".join(lines) + "\n"
