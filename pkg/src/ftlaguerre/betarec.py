"""Purity moments of the general-beta Laguerre ensemble via a bidiagonal
matrix recursion.

The Laplace transform of the squared-eigenvalue sum, expanded about
s = infinity, has coefficient vectors h_q (indexed p = 0..N) obeying

    h_{q+1} = B_{q+1}^{-1} (-A + 2 q I) h_q,

where A and B are the fixed bidiagonal matrices built below, B_{q+1} is B
with its (identically zero) row 0 replaced by row 0 of (-A + 2(q+1) I),
and h_0 spans the kernel of B.  The q-th raw moment of sum_j lambda_j^2
is read off the head entry:

    m_q = (-1)^q q! h_q^(0) / h_0^(0).

Everything is exact rational arithmetic in (N, a, tau), tau = beta/2.
h_0 is normalized to head entry 1, which drops the ensemble's overall
Gamma-product constant from every ratio.

Moments are polynomials in the dimension N (degree 3q for m_q), so the
module also exposes a Lagrange-interpolation utility that recovers that
polynomial from runs at integer dimensions; the negative-dimension
duality check is phrased through it rather than by running the recursion
at a negative N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DomainError, InternalConsistencyError, SingularMatrixError
from .exact import RationalLike, RationalPolynomial, as_rational, linear_solve_exact, pochhammer
from .moments import EnsembleParams, MomentTable

__all__ = [
    "BidiagSystem",
    "StateVector",
    "build_system",
    "init_h0",
    "advance",
    "beta_purity_moments",
    "flue_beta_kappa2",
    "dimension_polynomial",
    "duality_gap",
]

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class BidiagSystem:
    """The two (N+1)x(N+1) bidiagonal matrices driving the recursion."""

    params: EnsembleParams
    A: Matrix
    B: Matrix

    @property
    def dimension(self) -> int:
        return self.params.N + 1


@dataclass(frozen=True)
class StateVector:
    """Coefficient vector h_q of the large-s expansion, with its order q."""

    order: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.order < 0:
            raise DomainError("state order must be nonnegative")
        object.__setattr__(
            self, "entries", tuple(as_rational(x) for x in self.entries)
        )


def build_system(p: EnsembleParams) -> BidiagSystem:
    """Assemble A (diagonal + superdiagonal) and B (diagonal + subdiagonal).

    A[p][p] = -(N(a+1) + tau N(N-1) + p),  A[p][p+1] = -(N-p),
    B[p][p] = -p/2,  B[p][p-1] = -p (tau(N-p) + a + 1)/2.
    Row 0 of B is identically zero.
    """
    N, a, tau = p.N, p.a, p.tau
    base = N * (a + 1) + tau * N * (N - 1)
    A = [[Fraction(0)] * (N + 1) for _ in range(N + 1)]
    B = [[Fraction(0)] * (N + 1) for _ in range(N + 1)]
    for row in range(N + 1):
        A[row][row] = -(base + row)
        if row < N:
            A[row][row + 1] = Fraction(-(N - row))
        B[row][row] = Fraction(-row, 2)
        if row >= 1:
            B[row][row - 1] = -Fraction(row, 2) * (tau * (N - row) + a + 1)
    return BidiagSystem(
        params=p,
        A=tuple(tuple(r) for r in A),
        B=tuple(tuple(r) for r in B),
    )


def init_h0(p: EnsembleParams) -> StateVector:
    """Kernel vector of B, normalized to head entry 1:
    h_0^(p) = (-1)^p prod_{l=1..p} (tau(N-l) + a + 1)."""
    N, a, tau = p.N, p.a, p.tau
    entries = [Fraction(1)]
    for l in range(1, N + 1):
        entries.append(-entries[-1] * (tau * (N - l) + a + 1))
    return StateVector(order=0, entries=tuple(entries))


def _mat_vec(M: Matrix, v: tuple[Fraction, ...]) -> list[Fraction]:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in M]


def advance(sys: BidiagSystem, h: StateVector) -> StateVector:
    """One recursion step: solve B_{q+1} h_{q+1} = (-A + 2q I) h_q."""
    q = h.order
    n = sys.dimension
    if len(h.entries) != n:
        raise DomainError(
            f"state has {len(h.entries)} entries, system expects {n}"
        )
    rhs = [-x for x in _mat_vec(sys.A, h.entries)]
    for i in range(n):
        rhs[i] += 2 * q * h.entries[i]

    step = [list(row) for row in sys.B]
    step[0] = [-x for x in sys.A[0]]
    step[0][0] += 2 * (q + 1)
    try:
        nxt = linear_solve_exact(step, rhs)
    except SingularMatrixError as exc:
        p = sys.params
        err = SingularMatrixError(exc.rank, exc.size)
        err.args = (
            f"singular step matrix at order {q + 1} "
            f"(N={p.N}, a={p.a}, tau={p.tau}): rank {exc.rank} < size {exc.size}",
        )
        raise err from exc

    residual = _mat_vec(tuple(tuple(r) for r in step), tuple(nxt))
    if any(residual[i] != rhs[i] for i in range(n)):
        raise InternalConsistencyError("advance left a nonzero solve residual")
    return StateVector(order=q + 1, entries=tuple(nxt))


def beta_purity_moments(
    p: EnsembleParams, qmax: int, *, fixed_trace: bool = False
) -> MomentTable:
    """Exact moments <(sum_j lambda_j^2)^q>, q = 0..qmax.

    With fixed_trace=True the moments are divided by (c)_{2q},
    c = tau N(N-1) + N(a+1), giving the trace-normalized ensemble.
    """
    if qmax < 0:
        raise DomainError("qmax must be nonnegative")
    sys = build_system(p)
    h = init_h0(p)
    c = p.trace_mean
    entries: dict[int, Fraction] = {0: Fraction(1)}
    for q in range(1, qmax + 1):
        h = advance(sys, h)
        m = Fraction((-1) ** q * factorial(q)) * h.entries[0]
        if fixed_trace:
            m /= pochhammer(c, 2 * q)
        entries[q] = m
    return MomentTable(
        statistic="T2",
        ensemble="fLbeta" if fixed_trace else "Lbeta",
        entries=entries,
        route="bidiagonal-recursion",
    )


def flue_beta_kappa2(p: EnsembleParams) -> Fraction:
    """Closed-form purity variance of the trace-normalized beta ensemble."""
    N, a, tau = p.N, p.a, p.tau
    c = p.trace_mean
    g = tau * (N - 1)
    bracket = 2 * (10 + 2 * a * a + 9 * a * (1 + g) + g * (19 + tau * (9 * N - 10)))
    second = N * (g + a + 1) * (2 * g + a + 2) ** 2
    mean = (2 * g + a + 2) / (c + 1)
    return (bracket + second) / pochhammer(c + 1, 3) - mean * mean


def _lagrange(points: list[tuple[Fraction, Fraction]]) -> RationalPolynomial:
    """Interpolating polynomial through distinct rational points."""
    xs = [x for x, _ in points]
    if len(set(xs)) != len(xs):
        raise DomainError("interpolation nodes must be distinct")
    total = RationalPolynomial.zero()
    for i, (xi, yi) in enumerate(points):
        basis = RationalPolynomial([yi])
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = basis * RationalPolynomial([-xj, 1])
            basis = basis * (1 / (xi - xj))
        total = total + basis
    return total


def dimension_polynomial(
    tau: RationalLike, a: RationalLike, q: int
) -> RationalPolynomial:
    """m_q as a polynomial in the dimension N (degree at most 3q),
    recovered by running the recursion at N = 1..3q+2 and interpolating."""
    if q < 0:
        raise DomainError("moment order must be nonnegative")
    tau = as_rational(tau)
    a = as_rational(a)
    points: list[tuple[Fraction, Fraction]] = []
    for N in range(1, 3 * q + 3):
        table = beta_purity_moments(EnsembleParams(N=N, a=a, tau=tau), q)
        points.append((Fraction(N), table.moment(q)))
    poly = _lagrange(points)
    if poly.degree > 3 * q:
        raise InternalConsistencyError(
            f"moment {q} interpolated to degree {poly.degree} > {3 * q}"
        )
    return poly


def duality_gap(tau: RationalLike, a: RationalLike, q: int, at: RationalLike) -> Fraction:
    """m_q(N; tau, a) - (-tau)^q m_q(-tau N; 1/tau, -a/tau) at N = `at`.

    Both sides are degree-3q polynomials in N, so vanishing on any 3q+1
    distinct probes certifies the identity for the given (tau, a).
    """
    tau = as_rational(tau)
    a = as_rational(a)
    x = as_rational(at)
    lhs = dimension_polynomial(tau, a, q)(x)
    rhs = (-tau) ** q * dimension_polynomial(1 / tau, -a / tau, q)(-tau * x)
    return lhs - rhs
