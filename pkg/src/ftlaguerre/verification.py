"""Cross-route verification suite.

Every closed form the library exposes is recomputed here by at least one
independent route, and the stochastic components are checked against
frozen-seed Monte Carlo at stated tolerances.  The quick suite covers the
exact-arithmetic checks; the full suite adds the sampling-based ones.

Each check either returns a short success summary or raises
VerificationFailure with the first counterexample it found, so a failure
report always carries a concrete witness.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .betarec import beta_purity_moments, dimension_polynomial, flue_beta_kappa2
from .density import (
    FlueDensity,
    LueDensity,
    certify_matrix_ode_flue,
    certify_matrix_ode_lue,
    certify_ode_flue,
    certify_ode_mp,
    certify_ode_u2,
    flue_density_from_lue,
    lue_density,
    mp_density,
    mp_support,
)
from .errors import VerificationFailure
from .exact import (
    RationalPolynomial,
    hyp3f2_terminating,
    moments_from_cumulants,
    pochhammer,
)
from .moments import (
    EnsembleParams,
    flue_moment_recurrence,
    flue_Tq_mean_3f2,
    flue_Tq_mean_narayana,
    flue_Tq_moment_sum,
    lue_moment_recurrence,
    purity_cdf_n2,
)
from .painleve import flue_purity_cumulants
from .sampling import (
    RngSpec,
    estimate_linear_statistic,
    ks_distance,
    purity_statistic,
    sample_beta_laguerre,
    sample_flue,
    sample_sun,
    trace_power_abs2_statistic,
    trace_power_statistic,
)
from .suncorr import bulk_residual, rho1_mode, trace_power_mean, truncated_pair_mode

__all__ = ["CheckResult", "available_checks", "run_check", "run_suite"]

F = Fraction


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification check."""

    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    @property
    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name} ({self.seconds:.2f}s): {self.detail}"


# ---------------------------------------------------------------------------
# closed forms recomputed independently of the library routes
# ---------------------------------------------------------------------------

def _purity_cumulants_closed(N: int, a: int) -> list[Fraction]:
    """First three trace-normalized purity cumulants in closed form."""
    M = N * (N + a)
    k1 = F(2 * N + a, M + 1)
    k2 = F(
        2 * (N * N - 1) * ((N + a) ** 2 - 1),
        (M + 1) ** 2 * (M + 2) * (M + 3),
    )
    k3 = F(
        8 * (N * N - 1) * ((N + a) ** 2 - 1) * (2 * N + a) * (M - 5),
        (M + 1) ** 3 * (M + 2) * (M + 3) * (M + 4) * (M + 5),
    )
    return [k1, k2, k3]


def _beta_mean_closed(N: int, tau: Fraction, a: Fraction) -> Fraction:
    g = tau * (N - 1)
    return N * (g + 1 + a) * (2 * g + 2 + a)


def _beta_kappa2_closed(N: int, tau: Fraction, a: Fraction) -> Fraction:
    g = tau * (N - 1)
    return (
        2 * N * (1 + a + g)
        * (10 + 2 * a * a + 9 * a * (1 + g) + g * (19 + tau * (9 * N - 10)))
    )


# ---------------------------------------------------------------------------
# exact-arithmetic checks
# ---------------------------------------------------------------------------

def _painleve_closed_forms() -> str:
    checked = 0
    for N in range(2, 7):
        for a in range(0, 4):
            got = flue_purity_cumulants(EnsembleParams(N=N, a=a), 3)
            want = _purity_cumulants_closed(N, a)
            if got != want:
                raise VerificationFailure(
                    f"purity cumulants at N={N}, a={a}: series route gave "
                    f"{got}, closed form gives {want}"
                )
            checked += 1
    return f"{checked} (N,a) pairs, three cumulants each, exact match"


def _cross_route_moments() -> str:
    pairs = 0
    for N in range(1, 5):
        for a in range(0, 4):
            p = EnsembleParams(N=N, a=a)
            kappas = flue_purity_cumulants(p, 3)
            from_series = moments_from_cumulants(kappas)
            for k in range(1, 4):
                direct = flue_Tq_moment_sum(p, 2, k)
                if direct != from_series[k - 1]:
                    raise VerificationFailure(
                        f"<T2^{k}> at N={N}, a={a}: composition sum gave "
                        f"{direct}, cumulant series gives {from_series[k - 1]}"
                    )
            mean = from_series[0]
            for label, fn in (
                ("terminating-3F2", flue_Tq_mean_3f2),
                ("narayana-sum", flue_Tq_mean_narayana),
            ):
                alt = fn(p, 2)
                if alt != mean:
                    raise VerificationFailure(
                        f"<T2> at N={N}, a={a}: {label} route gave {alt}, "
                        f"expected {mean}"
                    )
            pairs += 1
    return f"{pairs} (N,a) pairs, orders 1..3 plus two extra mean routes"


def _beta_closed_forms() -> str:
    rng = random.Random(48112)
    taus = [F(1, 2), F(1), F(3, 2), F(3)]
    for trial in range(10):
        N = rng.randint(1, 6)
        tau = rng.choice(taus)
        a = F(rng.randint(0, 8), rng.choice([1, 2, 3]))
        p = EnsembleParams(N=N, a=a, tau=tau)
        table = beta_purity_moments(p, 2)
        m1 = table.moment(1)
        k2 = table.moment(2) - m1 * m1
        where = f"N={N}, tau={tau}, a={a}"
        if m1 != _beta_mean_closed(N, tau, a):
            raise VerificationFailure(
                f"first moment at {where}: recursion gave {m1}, closed form "
                f"gives {_beta_mean_closed(N, tau, a)}"
            )
        if k2 != _beta_kappa2_closed(N, tau, a):
            raise VerificationFailure(
                f"second cumulant at {where}: recursion gave {k2}, closed "
                f"form gives {_beta_kappa2_closed(N, tau, a)}"
            )
        ft = beta_purity_moments(p, 2, fixed_trace=True)
        ft_k2 = ft.moment(2) - ft.moment(1) ** 2
        if flue_beta_kappa2(p) != ft_k2:
            raise VerificationFailure(
                f"normalized second cumulant at {where}: closed form gave "
                f"{flue_beta_kappa2(p)}, recursion gives {ft_k2}"
            )
    return "10 randomized (N,tau,a) triples: mean, variance, normalized variance"


def _dimension_duality() -> str:
    cases = 0
    for q in (1, 2, 3):
        for tau, a in ((F(1, 2), F(2)), (F(3), F(1, 3))):
            left = dimension_polynomial(tau, a, q)
            right = dimension_polynomial(1 / tau, -a / tau, q)
            # the identity maps N -> -tau N, so compare coefficients of the
            # right polynomial after the sign/scale substitution
            mapped = [
                (-tau) ** q * c * (-tau) ** k
                for k, c in enumerate(right.coeffs)
            ]
            n = max(len(mapped), len(left.coeffs))
            lc = list(left.coeffs) + [F(0)] * (n - len(left.coeffs))
            mc = mapped + [F(0)] * (n - len(mapped))
            if lc != mc:
                raise VerificationFailure(
                    f"duality at q={q}, tau={tau}, a={a}: coefficient lists "
                    f"differ, {lc} vs {mc}"
                )
            cases += 1
    return f"{cases} (q,tau,a) cases certified as polynomial identities in N"


def _density_ode_certifications() -> str:
    certified = 0
    for N in range(1, 6):
        for a in range(0, 4):
            p = EnsembleParams(N=N, a=a)
            d = lue_density(p)
            if not certify_ode_u2(d):
                raise VerificationFailure(
                    f"scalar equation residual nonzero for the N={N}, a={a} "
                    "spectral density"
                )
            if not certify_matrix_ode_lue(d):
                raise VerificationFailure(
                    f"first-order system residual nonzero at N={N}, a={a}"
                )
            certified += 2
            if N == 1:
                continue  # the trace-normalized density degenerates to a point
            fd = flue_density_from_lue(d)
            if not certify_ode_flue(fd):
                raise VerificationFailure(
                    f"trace-normalized scalar equation fails at N={N}, a={a}"
                )
            if not certify_matrix_ode_flue(fd):
                raise VerificationFailure(
                    f"trace-normalized system fails at N={N}, a={a}"
                )
            certified += 2

    # negative controls: each certifier must reject a planted defect
    d = lue_density(EnsembleParams(N=2, a=0))
    bad = LueDensity(N=2, a=0, alpha=d.alpha + RationalPolynomial([0, 1]))
    if certify_ode_u2(bad):
        raise VerificationFailure("scalar certifier accepted a shifted density")
    if certify_matrix_ode_lue(
        LueDensity(N=3, a=0, alpha=RationalPolynomial([1, 2, 3, 4, 5]))
    ):
        raise VerificationFailure("system certifier accepted an arbitrary polynomial")
    fd = flue_density_from_lue(d)
    terms = dict(fd.terms)
    terms[0] += 1
    if certify_ode_flue(FlueDensity(N=2, a=0, terms=terms)):
        raise VerificationFailure(
            "trace-normalized scalar certifier accepted a perturbed density"
        )
    if certify_matrix_ode_flue(fd, mix=((1, 0, 0), (-1, 0, 0), (0, 2, -1))):
        raise VerificationFailure(
            "trace-normalized system certifier accepted a sign-flipped mixing"
        )
    return f"{certified} certificates plus four rejected negative controls"


def _moment_recurrences() -> str:
    checked = 0
    for N in range(1, 5):
        for a in range(0, 4):
            p = EnsembleParams(N=N, a=a)
            d = lue_density(p)
            table = lue_moment_recurrence(p, 6)
            for k in range(7):
                if d.moment(k) != table.moment(k):
                    raise VerificationFailure(
                        f"order-{k} moment at N={N}, a={a}: recurrence gave "
                        f"{table.moment(k)}, direct integral gives {d.moment(k)}"
                    )
            checked += 7
            if N == 1:
                continue
            fd = flue_density_from_lue(d)
            ft = flue_moment_recurrence(p, 6)
            for k in range(7):
                if fd.moment(k) != ft.moment(k):
                    raise VerificationFailure(
                        f"order-{k} trace-normalized moment at N={N}, a={a}: "
                        f"recurrence gave {ft.moment(k)}, direct integral "
                        f"gives {fd.moment(k)}"
                    )
            checked += 7
    return f"{checked} moments, both ensembles, orders 0..6"


def _hypergeometric_identities() -> str:
    two_form = 0
    for N in range(2, 9):
        for a in range(0, 4):
            for q in range(1, 5):
                lhs = pochhammer(1 + q, N - 1) * hyp3f2_terminating(
                    1 - N, 1 - (N + a), 1 - q, 1 - (N + q), 1 - (N + a + q)
                )
                rhs = pochhammer(1, N) * hyp3f2_terminating(
                    1 - N, -q, 1 - q, 2, 1 - (N + a + q)
                )
                if lhs != rhs:
                    raise VerificationFailure(
                        f"two-form mean identity fails at N={N}, a={a}, "
                        f"q={q}: {lhs} vs {rhs}"
                    )
                two_form += 1
    rng = random.Random(20240817)
    transformed = 0
    while transformed < 20:
        n = rng.randint(0, 4)
        # half-odd-integer numerators and third-integer denominators keep
        # every derived parameter off the nonpositive integers
        b = F(rng.choice([x for x in range(-9, 10) if x % 2]), 2)
        c = F(rng.choice([x for x in range(-9, 10) if x % 2]), 2)
        d = F(rng.choice([x for x in range(-10, 11) if x % 3]), 3)
        e = F(rng.choice([x for x in range(-10, 11) if x % 3]), 3)
        lhs = hyp3f2_terminating(-n, b, c, d, e)
        rhs = (
            pochhammer(d - b, n) / pochhammer(d, n)
            * hyp3f2_terminating(-n, b, e - c, e, b - d - n + 1)
        )
        if lhs != rhs:
            raise VerificationFailure(
                f"transformation fails at n={n}, b={b}, c={c}, d={d}, e={e}: "
                f"{lhs} vs {rhs}"
            )
        transformed += 1
    return f"{two_form} two-form cases and {transformed} randomized transformations"


# ---------------------------------------------------------------------------
# sampling-based checks (frozen seeds)
# ---------------------------------------------------------------------------

def _n2_purity_law() -> str:
    n = 100_000
    critical = 1.6276 / math.sqrt(n)  # 1% point of the limiting statistic
    dists = []
    for a, seed in ((0, 2101), (2, 2103)):
        batch = sample_flue(EnsembleParams(N=2, a=a), n, RngSpec(seed=seed))
        values = (batch.draws**2).sum(axis=1)
        dist = ks_distance(values, lambda t: purity_cdf_n2(a, t))
        if dist >= critical:
            raise VerificationFailure(
                f"purity law at N=2, a={a}: KS distance {dist:.5f} exceeds "
                f"the 1% critical value {critical:.5f} at {n} draws"
            )
        dists.append(dist)
    shown = ", ".join(f"{d:.5f}" for d in dists)
    return f"KS distances {shown} < {critical:.5f} at {n} draws"


def _mc_exact_means() -> str:
    n = 100_000
    gaps = []
    cases = [
        (EnsembleParams(N=4, a=1), "dense", 3101),
        (EnsembleParams(N=4, a=0, tau=F(1, 2)), "bidiagonal", 3103),
        (EnsembleParams(N=3, a=2, tau=F(2)), "bidiagonal", 3105),
    ]
    for p, route, seed in cases:
        if route == "dense":
            batch = sample_flue(p, n, RngSpec(seed=seed))
        else:
            batch = sample_beta_laguerre(
                p, n, RngSpec(seed=seed), fixed_trace=True
            )
        exact = float(beta_purity_moments(p, 1, fixed_trace=True).moment(1))
        result = estimate_linear_statistic(batch, purity_statistic())
        gap = result.distance_in_se(exact)
        if gap >= 4.0:
            raise VerificationFailure(
                f"purity mean for N={p.N}, beta={2 * p.tau}, a={p.a} "
                f"({route} route): {result.mean:.6f} is {gap:.2f} standard "
                f"errors from the exact {exact:.6f}"
            )
        gaps.append(gap)
    shown = ", ".join(f"{g:.2f}" for g in gaps)
    return f"three ensembles within 4 standard errors (gaps {shown})"


def _mp_bin_masses(edges: np.ndarray) -> np.ndarray:
    """Limit-law probability of each bin by fine midpoint quadrature."""
    masses = np.empty(edges.size - 1)
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        xs = np.linspace(lo, hi, 257)
        mids = 0.5 * (xs[:-1] + xs[1:])
        vals = np.array([mp_density(1, float(x)) for x in mids])
        masses[i] = vals.mean() * (hi - lo)
    return masses


def _mp_global_law() -> str:
    lo, hi = mp_support(1)
    margin = 0.12 * (hi - lo)
    edges = np.linspace(lo + margin, hi - margin, 13)
    width = float(edges[1] - edges[0])
    target = _mp_bin_masses(edges)
    dists = []
    for N, seed in ((8, 4101), (16, 4103), (32, 4105)):
        p = EnsembleParams(N=N, a=N)
        batch = sample_flue(p, 30_000, RngSpec(seed=seed))
        scaled = (2.0 * N) * batch.draws.ravel()
        counts, _ = np.histogram(scaled, bins=edges)
        empirical = counts / scaled.size
        dists.append(float(np.abs(empirical - target).max() / width))
    if not (dists[0] > dists[1] > dists[2]):
        raise VerificationFailure(
            "histogram distance to the limit law is not decreasing: "
            + ", ".join(f"{d:.5f}" for d in dists)
        )
    if not certify_ode_mp(1):
        raise VerificationFailure("limit-law residual certification failed")
    shown = " > ".join(f"{d:.5f}" for d in dists)
    return f"interior sup distances {shown}; residual certificate holds"


def _sun_correlations() -> str:
    draws = 30_000
    for n, seed in ((2, 5101), (3, 5103), (4, 5105)):
        batch = sample_sun(n, draws, RngSpec(seed=seed))
        for p in range(0, n + 2):
            exact = float(trace_power_mean(n, p))
            result = estimate_linear_statistic(
                batch, trace_power_statistic(p, "re")
            )
            if result.stderr == 0.0:
                ok = abs(result.mean - exact) < 1e-12
                gap = 0.0 if ok else math.inf
            else:
                gap = result.distance_in_se(exact)
            if gap >= 4.0:
                raise VerificationFailure(
                    f"trace power mean p={p} at n={n}: sampled "
                    f"{result.mean:.5f}, exact {exact:.5f}, gap {gap:.2f} SE"
                )
        for p in {1, n - 1, n, n + 1}:
            if p == 0:
                continue
            exact = float(
                n + rho1_mode(n, p) ** 2 + truncated_pair_mode(n, p, -p)
            )
            result = estimate_linear_statistic(
                batch, trace_power_abs2_statistic(p)
            )
            gap = result.distance_in_se(exact)
            if gap >= 4.0:
                raise VerificationFailure(
                    f"squared trace power p={p} at n={n}: sampled "
                    f"{result.mean:.5f}, exact {exact:.5f}, gap {gap:.2f} SE"
                )
    ratios = []
    for n in (8, 16):
        r = bulk_residual(2 * n, 0.1, 0.7) / bulk_residual(n, 0.1, 0.7)
        if abs(r - 0.25) > 0.25 * 0.25:
            raise VerificationFailure(
                f"bulk remainder ratio between n={2 * n} and n={n} is "
                f"{r:.4f}, outside 25% of 1/4"
            )
        ratios.append(r)
    shown = ", ".join(f"{r:.3f}" for r in ratios)
    return f"trace means and pair modes within 4 SE; remainder ratios {shown}"


# ---------------------------------------------------------------------------
# registry and runners
# ---------------------------------------------------------------------------

# (name, function, in quick suite, runtime budget in seconds)
_REGISTRY: tuple[tuple[str, object, bool, float], ...] = (
    ("painleve-closed-forms", _painleve_closed_forms, True, 10.0),
    ("cross-route-moments", _cross_route_moments, True, 30.0),
    ("beta-closed-forms", _beta_closed_forms, True, 10.0),
    ("dimension-duality", _dimension_duality, True, 60.0),
    ("density-ode-certification", _density_ode_certifications, True, 60.0),
    ("moment-recurrences", _moment_recurrences, True, 10.0),
    ("hypergeometric-identities", _hypergeometric_identities, True, 10.0),
    ("n2-purity-law", _n2_purity_law, False, 120.0),
    ("mc-exact-means", _mc_exact_means, False, 300.0),
    ("mp-global-law", _mp_global_law, False, 300.0),
    ("sun-correlations", _sun_correlations, False, 300.0),
)


def available_checks(suite: str = "full") -> list[str]:
    """Names of the checks in a suite, in execution order."""
    if suite == "quick":
        return [name for name, _, quick, _ in _REGISTRY if quick]
    if suite == "full":
        return [name for name, _, _, _ in _REGISTRY]
    raise VerificationFailure(f"unknown suite {suite!r}; use 'quick' or 'full'")


def run_check(name: str) -> CheckResult:
    """Run one named check and time it."""
    for reg_name, fn, _, budget in _REGISTRY:
        if reg_name == name:
            start = time.perf_counter()
            try:
                detail = fn()
                passed = True
            except VerificationFailure as exc:
                detail = str(exc)
                passed = False
            seconds = time.perf_counter() - start
            return CheckResult(
                name=name,
                passed=passed,
                detail=detail,
                seconds=seconds,
                budget=budget,
            )
    raise VerificationFailure(f"unknown check {name!r}")


def run_suite(suite: str = "full") -> list[CheckResult]:
    """Run all checks of a suite; never raises on individual failures."""
    return [run_check(name) for name in available_checks(suite)]
