"""Exact-arithmetic substrate: rationals, polynomials, truncated Laurent
series, combinatorics, terminating hypergeometric sums, and the
moment/cumulant transforms.

Everything in this module is pure and exact — no floating point, ever.
``Rational`` is an alias of :class:`fractions.Fraction`, which already
guarantees lowest-terms storage, a positive denominator and exact arithmetic;
there is no reason to reimplement it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    ParameterError,
    PoleError,
    SingularMatrixError,
    TruncationError,
)

Rational = Fraction
RationalLike = Union[Fraction, int, str]

__all__ = [
    "Rational",
    "as_rational",
    "binomial",
    "pochhammer",
    "falling_factorial",
    "RationalPolynomial",
    "LaurentSeries",
    "Composition",
    "compositions",
    "hyp3f2_terminating",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "linear_solve_exact",
]


def as_rational(x: RationalLike) -> Fraction:
    """Coerce an int, string ("p/q") or Fraction to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def binomial(n: int, k: int) -> int:
    """Binomial coefficient for integer n >= 0 (0 outside 0 <= k <= n)."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pochhammer(u: RationalLike, p: int) -> Fraction:
    """Rising factorial u(u+1)...(u+p-1); equals 1 for p = 0."""
    if p < 0:
        raise ParameterError("pochhammer needs a nonnegative integer order")
    u = as_rational(u)
    out = Fraction(1)
    for j in range(p):
        out *= u + j
    return out


def falling_factorial(u: RationalLike, p: int) -> Fraction:
    """Falling factorial u(u-1)...(u-p+1); equals 1 for p = 0."""
    if p < 0:
        raise ParameterError("falling_factorial needs a nonnegative order")
    u = as_rational(u)
    out = Fraction(1)
    for j in range(p):
        out *= u - j
    return out


# ---------------------------------------------------------------------------
# dense polynomials over Fraction
# ---------------------------------------------------------------------------

class RationalPolynomial:
    """Dense polynomial with exact rational coefficients.

    Coefficients are indexed by power of the variable.  Trailing zeros are
    normalized away; the zero polynomial has an empty coefficient tuple and
    ``degree == -1`` (the "zero polynomial" sentinel).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, power: int, coeff: RationalLike = 1) -> "RationalPolynomial":
        if power < 0:
            raise ParameterError("monomial power must be nonnegative")
        return cls([0] * power + [coeff])

    @classmethod
    def zero(cls) -> "RationalPolynomial":
        return cls(())

    @classmethod
    def one(cls) -> "RationalPolynomial":
        return cls((1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        x = as_rational(x)
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(
            [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([c * other for c in self.coeffs])
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return RationalPolynomial.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "RationalPolynomial":
        """Multiply by x**k."""
        if k < 0:
            raise ParameterError("shift exponent must be nonnegative")
        if self.is_zero:
            return self
        return RationalPolynomial((Fraction(0),) * k + self.coeffs)

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(
            [i * c for i, c in enumerate(self.coeffs)][1:]
        )

    @staticmethod
    def _coerce(other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial((other,))
        raise TypeError(f"cannot combine polynomial with {other!r}")

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPolynomial((other,))
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.is_zero:
            return "RationalPolynomial(0)"
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return "RationalPolynomial(" + " + ".join(terms) + ")"


# ---------------------------------------------------------------------------
# truncated Laurent series in 1/t
# ---------------------------------------------------------------------------

class LaurentSeries:
    """Truncated series sum_j c_j * t**(-j) with exact rational coefficients.

    ``low`` is the lowest 1/t exponent present (negative values mean positive
    powers of t), and ``order`` is the highest 1/t exponent whose coefficient
    is known exactly.  Every exponent in [low, order] has a stored
    coefficient.  Asking for a coefficient beyond ``order`` raises
    :class:`TruncationError` — operations fail loudly rather than silently
    truncate, and the truncation order propagates through arithmetic as the
    tightest bound that is still exact.
    """

    __slots__ = ("low", "coeffs", "order")

    def __init__(self, low: int, coeffs: Iterable[RationalLike], order: int):
        cs = [as_rational(c) for c in coeffs]
        if len(cs) != order - low + 1:
            raise ParameterError(
                f"need exactly order-low+1 = {order - low + 1} coefficients, "
                f"got {len(cs)}"
            )
        # strip exact zeros at the low end (they carry no information)
        while cs and cs[0] == 0:
            cs.pop(0)
            low += 1
        self.low = low
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def from_terms(cls, terms: dict[int, RationalLike], order: int) -> "LaurentSeries":
        """Build from a sparse {exponent-of-1/t: coefficient} map."""
        nonzero = {j: as_rational(c) for j, c in terms.items() if as_rational(c) != 0}
        if any(j > order for j in nonzero):
            raise ParameterError("term exponent beyond declared order")
        if not nonzero:
            return cls(order + 1, (), order)
        low = min(nonzero)
        return cls(low, [nonzero.get(j, 0) for j in range(low, order + 1)], order)

    @classmethod
    def zero(cls, order: int) -> "LaurentSeries":
        return cls(order + 1, (), order)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> Fraction:
        """Coefficient of t**(-j); exact, or TruncationError beyond order."""
        if j > self.order:
            raise TruncationError(
                f"coefficient of t^-{j} lies beyond truncation order {self.order}"
            )
        if j < self.low:
            return Fraction(0)
        return self.coeffs[j - self.low]

    def known_exponents(self) -> range:
        return range(self.low, self.order + 1)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        order = min(self.order, other.order)
        low = min(self.low, other.low)
        if low > order:
            return LaurentSeries.zero(order)

        def at(s: "LaurentSeries", j: int) -> Fraction:
            return s.coeffs[j - s.low] if j >= s.low else Fraction(0)

        return LaurentSeries(
            low, [at(self, j) + at(other, j) for j in range(low, order + 1)], order
        )

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.low, [-c for c in self.coeffs], self.order) \
            if self.coeffs else LaurentSeries.zero(self.order)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, c: RationalLike) -> "LaurentSeries":
        c = as_rational(c)
        if c == 0 or self.is_zero:
            return LaurentSeries.zero(self.order)
        return LaurentSeries(self.low, [c * a for a in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        # the product coefficient at exponent j needs factors up to j-low of
        # the partner, so exactness stops at min(order1+low2, order2+low1)
        # (an identically-zero operand has low = order+1, which makes this
        # bound correct for it too)
        order = min(self.order + other.low, other.order + self.low)
        if self.is_zero or other.is_zero:
            return LaurentSeries.zero(order)
        low = self.low + other.low
        acc = {j: Fraction(0) for j in range(low, order + 1)}
        for i, a in enumerate(self.coeffs):
            ji = self.low + i
            for k, b in enumerate(other.coeffs):
                j = ji + other.low + k
                if j <= order:
                    acc[j] += a * b
        return LaurentSeries(low, [acc[j] for j in range(low, order + 1)], order)

    __rmul__ = __mul__

    def differentiate(self) -> "LaurentSeries":
        """d/dt: the term c*t**(-j) maps to -j*c*t**(-(j+1))."""
        terms = {}
        for i, c in enumerate(self.coeffs):
            j = self.low + i
            if j != 0 and c != 0:
                terms[j + 1] = -j * c
        return LaurentSeries.from_terms(terms, self.order + 1)

    def times_t_power(self, k: int) -> "LaurentSeries":
        """Multiply by t**k (shifts every 1/t exponent down by k)."""
        if self.is_zero:
            return LaurentSeries.zero(self.order - k)
        return LaurentSeries(self.low - k, self.coeffs, self.order - k)

    def truncate(self, order: int) -> "LaurentSeries":
        if order > self.order:
            raise TruncationError(
                f"cannot extend truncation order {self.order} to {order}"
            )
        if order < self.low:
            return LaurentSeries.zero(order)
        return LaurentSeries(self.low, self.coeffs[: order - self.low + 1], order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.low, self.coeffs, self.order) == (other.low, other.coeffs, other.order)

    def __hash__(self):
        return hash((self.low, self.coeffs, self.order))

    def __repr__(self):
        if self.is_zero:
            return f"LaurentSeries(0; order {self.order})"
        bits = []
        for i, c in enumerate(self.coeffs):
            j = self.low + i
            if c != 0:
                bits.append(f"{c}*t^{-j}" if j else f"{c}")
        return f"LaurentSeries({' + '.join(bits)}; order {self.order})"


# ---------------------------------------------------------------------------
# weak compositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Composition:
    """Weak composition: ordered nonnegative integer parts of fixed sum."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if any((not isinstance(p, int)) or p < 0 for p in self.parts):
            raise ParameterError("composition parts must be nonnegative integers")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]


def compositions(k: int, N: int) -> Iterator[Composition]:
    """Yield every weak composition of k into N parts exactly once.

    The count is binomial(k+N-1, N-1).
    """
    if k < 0:
        raise ParameterError("composition weight must be nonnegative")
    if N < 1:
        raise ParameterError("composition length must be positive")

    def rec(remaining: int, slots: int):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining + 1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    for parts in rec(k, N):
        yield Composition(parts)


# ---------------------------------------------------------------------------
# terminating 3F2 at unit argument
# ---------------------------------------------------------------------------

def _nonpositive_int(x: Fraction):
    return x.denominator == 1 and x <= 0


def hyp3f2_terminating(
    a1: RationalLike,
    a2: RationalLike,
    a3: RationalLike,
    b1: RationalLike,
    b2: RationalLike,
) -> Fraction:
    """Exact terminating 3F2(a1,a2,a3; b1,b2 | 1).

    At least one upper parameter must be a nonpositive integer; the series is
    summed by the recursion of consecutive term ratios so intermediate
    integers stay small.  A lower parameter hitting a nonpositive integer
    before the series terminates raises PoleError.
    """
    a1, a2, a3 = as_rational(a1), as_rational(a2), as_rational(a3)
    b1, b2 = as_rational(b1), as_rational(b2)
    stops = [int(-a) for a in (a1, a2, a3) if _nonpositive_int(a)]
    if not stops:
        raise ParameterError(
            "3F2 does not terminate: no upper parameter is a nonpositive integer"
        )
    n = min(stops)
    for j in range(n):
        if b1 + j == 0 or b2 + j == 0:
            raise PoleError(
                f"lower parameter pole at term {j + 1} before termination at {n}"
            )
    total = Fraction(1)
    term = Fraction(1)
    for j in range(n):
        term *= (a1 + j) * (a2 + j) * (a3 + j)
        term /= (b1 + j) * (b2 + j) * (1 + j)
        total += term
    return total


# ---------------------------------------------------------------------------
# moment <-> cumulant transforms (complete Bell recurrences)
# ---------------------------------------------------------------------------

def moments_from_cumulants(kappas: Sequence[RationalLike]) -> list[Fraction]:
    """Raw moments m_1..m_n from cumulants k_1..k_n.

    Uses m_n = sum_j binomial(n-1, j-1) k_j m_{n-j} with m_0 = 1, the
    recurrence form of the complete Bell polynomial transform.
    """
    ks = [as_rational(k) for k in kappas]
    ms: list[Fraction] = [Fraction(1)]  # ms[0] = m_0
    for n in range(1, len(ks) + 1):
        m_n = Fraction(0)
        for j in range(1, n + 1):
            m_n += binomial(n - 1, j - 1) * ks[j - 1] * ms[n - j]
        ms.append(m_n)
    return ms[1:]


def cumulants_from_moments(ms: Sequence[RationalLike]) -> list[Fraction]:
    """Cumulants k_1..k_n from raw moments m_1..m_n (inverse transform)."""
    m = [Fraction(1)] + [as_rational(x) for x in ms]
    ks: list[Fraction] = []
    for n in range(1, len(m)):
        k_n = m[n]
        for j in range(1, n):
            k_n -= binomial(n - 1, j - 1) * ks[j - 1] * m[n - j]
        ks.append(k_n)
    return ks


# ---------------------------------------------------------------------------
# exact linear solve
# ---------------------------------------------------------------------------

def linear_solve_exact(
    M: Sequence[Sequence[RationalLike]],
    rhs: Sequence[RationalLike],
) -> list[Fraction]:
    """Solve M x = rhs exactly by pivoted rational Gaussian elimination.

    The residual M x - rhs of the returned vector is exactly zero.  A
    singular matrix raises SingularMatrixError carrying the rank found.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ParameterError("matrix must be square")
    if len(rhs) != n:
        raise ParameterError("rhs length must match matrix size")
    A = [[as_rational(x) for x in row] for row in M]
    b = [as_rational(x) for x in rhs]

    def _finish_rank(start_col: int, pivots: int) -> int:
        # keep eliminating (solution is lost, but the rank is still wanted
        # for the error report)
        row = pivots
        for c in range(start_col, n):
            pr = next((r for r in range(row, n) if A[r][c] != 0), None)
            if pr is None:
                continue
            A[row], A[pr] = A[pr], A[row]
            for r in range(row + 1, n):
                if A[r][c] != 0:
                    f = A[r][c] / A[row][c]
                    for cc in range(c, n):
                        A[r][cc] -= f * A[row][cc]
            row += 1
        return row

    rank = 0
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if A[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            raise SingularMatrixError(rank=_finish_rank(col + 1, rank), size=n)
        if pivot_row != col:
            A[col], A[pivot_row] = A[pivot_row], A[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        piv = A[col][col]
        for r in range(col + 1, n):
            if A[r][col] != 0:
                f = A[r][col] / piv
                A[r][col] = Fraction(0)
                for c in range(col + 1, n):
                    A[r][c] -= f * A[col][c]
                b[r] -= f * b[col]
        rank += 1

    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = b[r]
        for c in range(r + 1, n):
            acc -= A[r][c] * x[c]
        x[r] = acc / A[r][r]
    return x
