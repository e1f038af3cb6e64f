"""Monte Carlo layer: RNG sharding, eigensolver kernels, samplers and
estimators, checked against exact moments from the other modules."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftlaguerre.betarec import beta_purity_moments, flue_beta_kappa2
from ftlaguerre.errors import DomainError, ParameterError
from ftlaguerre.moments import (
    EnsembleParams,
    flue_Tq_moment_sum,
    lue_moment_recurrence,
    purity_cdf_n2,
)
from ftlaguerre.sampling import (
    ALGORITHM_ID,
    SHARD_SIZE,
    RngSpec,
    SampleBatch,
    WelfordAccumulator,
    batch_csv,
    eig_herm_batch,
    eig_tridiag_batch,
    estimate_covariance,
    estimate_linear_statistic,
    hermitian_eigenvalues,
    histogram_csv,
    ks_distance,
    normalized_purity_statistic,
    power_sum_statistic,
    purity_statistic,
    sample_beta_laguerre,
    sample_flue,
    sample_lue,
    sample_sun,
    sun_phase_batch,
    trace_power_abs2_statistic,
    trace_power_statistic,
    tridiagonal_eigenvalues,
)


def se_gap(values, exact):
    """|sample mean - exact| in units of the standard error."""
    v = np.asarray(values)
    se = v.std(ddof=1) / math.sqrt(v.size)
    return abs(v.mean() - float(exact)) / se


class TestRngSpec:
    def test_defaults(self):
        spec = RngSpec(seed=1)
        assert spec.algorithm == ALGORITHM_ID

    def test_rejects_bad_seed(self):
        with pytest.raises(ParameterError):
            RngSpec(seed=-1)
        with pytest.raises(ParameterError):
            RngSpec(seed=2**64)

    def test_rejects_unknown_algorithm(self):
        with pytest.raises(ParameterError):
            RngSpec(seed=1, algorithm="mt19937")

    def test_shard_streams_are_reproducible_and_distinct(self):
        spec = RngSpec(seed=99)
        a = spec.generator(3).standard_normal(8)
        b = spec.generator(3).standard_normal(8)
        c = spec.generator(4).standard_normal(8)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_complex_normals_unit_variance(self):
        spec = RngSpec(seed=5)
        z = spec.complex_normals(spec.generator(0), (40000,))
        assert z.dtype == np.complex128
        assert abs((np.abs(z) ** 2).mean() - 1.0) < 0.02
        assert abs(z.mean()) < 0.02

    @given(st.integers(min_value=1, max_value=200_000))
    @settings(max_examples=60, deadline=None)
    def test_shard_plan_partitions(self, n):
        from ftlaguerre.sampling import shard_plan

        plan = shard_plan(n)
        assert sum(cnt for _, cnt in plan) == n
        assert all(1 <= cnt <= SHARD_SIZE for _, cnt in plan)
        assert [idx for idx, _ in plan] == list(range(len(plan)))

    def test_shard_plan_rejects_nonpositive(self):
        from ftlaguerre.sampling import shard_plan

        with pytest.raises(ParameterError):
            shard_plan(0)


class TestTridiagonalKernel:
    def test_two_by_two(self):
        w = tridiagonal_eigenvalues([2.0, 2.0], [1.0])
        assert np.allclose(w, [1.0, 3.0], atol=1e-14)

    def test_single_entry(self):
        assert tridiagonal_eigenvalues([7.5], []) == pytest.approx(7.5)

    def test_against_dense_eigensolver(self):
        rng = np.random.default_rng(3)
        diag = rng.normal(size=(6, 20))
        off = rng.normal(size=(6, 19))
        w, status = eig_tridiag_batch(diag, off)
        assert not status.any()
        for b in range(6):
            full = np.diag(diag[b]) + np.diag(off[b], 1) + np.diag(off[b], -1)
            assert np.abs(w[b] - np.linalg.eigvalsh(full)).max() < 1e-9

    def test_trace_and_frobenius_invariants(self):
        rng = np.random.default_rng(4)
        diag = rng.normal(size=(1, 20))
        off = rng.normal(size=(1, 19))
        w, status = eig_tridiag_batch(diag, off)
        assert not status.any()
        assert w[0].sum() == pytest.approx(diag[0].sum(), rel=1e-10, abs=1e-9)
        frob = (diag[0] ** 2).sum() + 2 * (off[0] ** 2).sum()
        assert (w[0] ** 2).sum() == pytest.approx(frob, rel=1e-10)

    def test_rows_come_out_sorted(self):
        rng = np.random.default_rng(5)
        w, _ = eig_tridiag_batch(rng.normal(size=(8, 9)), rng.normal(size=(8, 8)))
        assert np.all(w[:, 1:] >= w[:, :-1])

    def test_wrapper_validates_lengths(self):
        with pytest.raises(ParameterError):
            tridiagonal_eigenvalues([1.0, 2.0], [0.5, 0.5])


class TestHermitianKernel:
    def test_diagonal_matrix(self):
        w = hermitian_eigenvalues(np.diag([3.0 + 0j, -1.0, 2.0]))
        assert np.allclose(w, [-1.0, 2.0, 3.0], atol=1e-13)

    def test_small_hermitian_vs_reference(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            h = 0.5 * (b + b.conj().T)
            assert np.abs(hermitian_eigenvalues(h) - np.linalg.eigvalsh(h)).max() < 1e-8

    def test_batch_vs_reference_20x20(self):
        rng = np.random.default_rng(12)
        b = rng.normal(size=(4, 20, 20)) + 1j * rng.normal(size=(4, 20, 20))
        h = 0.5 * (b + np.conj(np.swapaxes(b, 1, 2)))
        w, status = eig_herm_batch(h)
        assert not status.any()
        for k in range(4):
            assert np.abs(w[k] - np.linalg.eigvalsh(h[k])).max() < 1e-9

    def test_wrapper_rejects_non_hermitian(self):
        with pytest.raises(ParameterError):
            hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_wrapper_rejects_non_square(self):
        with pytest.raises(ParameterError):
            hermitian_eigenvalues(np.zeros((2, 3), dtype=complex))


class TestSunKernel:
    def numpy_su_phases(self, z):
        """Independent reconstruction of the same special unitary draw."""
        n = z.shape[-1]
        q, r = np.linalg.qr(z)
        lam = np.diag(r) / np.abs(np.diag(r))
        u = (q * lam) * np.exp(-1j * np.angle(np.linalg.det(q * lam)) / n)
        ang = np.angle(np.linalg.eigvals(u))
        ang[ang <= -np.pi] = np.pi
        return np.sort(ang)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_agrees_with_reference_pipeline(self, n):
        spec = RngSpec(seed=2024)
        z = spec.complex_normals(spec.generator(0), (40, n, n))
        phases, status = sun_phase_batch(z)
        assert not status.any()
        for k in range(40):
            assert np.abs(phases[k] - self.numpy_su_phases(z[k])).max() < 1e-10

    def test_phases_sorted_and_in_range(self):
        batch = sample_sun(4, 3000, RngSpec(seed=1))
        th = batch.draws
        assert np.all(th[:, 1:] >= th[:, :-1])
        assert th.max() <= math.pi and th.min() > -math.pi

    def test_unit_determinant_phase_sum(self):
        th = sample_sun(3, 3000, RngSpec(seed=2)).draws
        s = th.sum(axis=1)
        wrapped = np.abs((s + math.pi) % (2 * math.pi) - math.pi)
        assert wrapped.max() < 1e-12


class TestSampleLue:
    def test_needs_unitary_tau(self):
        with pytest.raises(ParameterError):
            sample_lue(EnsembleParams(2, tau=Fraction(1, 2)), 100, RngSpec(seed=1))

    def test_needs_integer_a(self):
        with pytest.raises(DomainError):
            sample_lue(EnsembleParams(2, a=Fraction(1, 2)), 100, RngSpec(seed=1))

    def test_batch_metadata(self):
        batch = sample_lue(EnsembleParams(3, a=Fraction(2)), 500, RngSpec(seed=7))
        assert batch.ensemble == "LUE"
        assert batch.params == {"N": "3", "a": "2", "tau": "1"}
        assert batch.count == 500
        assert batch.draws.shape == (500, 3)

    def test_draws_nonnegative_and_sorted(self):
        d = sample_lue(EnsembleParams(4, a=Fraction(1)), 2000, RngSpec(seed=8)).draws
        assert d.min() >= -1e-10
        assert np.all(d[:, 1:] >= d[:, :-1])

    def test_moments_match_exact_recurrence(self):
        p = EnsembleParams(3, a=Fraction(1))
        table = lue_moment_recurrence(p, 2)
        d = sample_lue(p, 30000, RngSpec(seed=9)).draws
        assert se_gap(d.sum(axis=1), table.moment(1)) < 4.0
        assert se_gap((d**2).sum(axis=1), table.moment(2)) < 4.0

    def test_reproducible_and_seed_sensitive(self):
        p = EnsembleParams(2)
        a = sample_lue(p, 1000, RngSpec(seed=5)).draws
        b = sample_lue(p, 1000, RngSpec(seed=5)).draws
        c = sample_lue(p, 1000, RngSpec(seed=6)).draws
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_jobs_do_not_change_draws(self):
        p = EnsembleParams(2, a=Fraction(1))
        serial = sample_lue(p, 20000, RngSpec(seed=5), jobs=1)
        threaded = sample_lue(p, 20000, RngSpec(seed=5), jobs=4)
        assert np.array_equal(serial.draws, threaded.draws)

    def test_rejects_bad_jobs(self):
        with pytest.raises(ParameterError):
            sample_lue(EnsembleParams(2), 100, RngSpec(seed=1), jobs=0)


class TestSampleFlue:
    def test_rows_sum_to_one(self):
        d = sample_flue(EnsembleParams(3, a=Fraction(1)), 4000, RngSpec(seed=3)).draws
        assert np.abs(d.sum(axis=1) - 1.0).max() < 1e-12

    def test_purity_mean_matches_exact(self):
        p = EnsembleParams(3, a=Fraction(1))
        exact = flue_Tq_moment_sum(p, 2, 1)
        d = sample_flue(p, 30000, RngSpec(seed=4)).draws
        assert se_gap((d**2).sum(axis=1), exact) < 4.0

    def test_normalized_purity_of_plain_draws_is_fixed_trace_purity(self):
        # scale invariance: sum x^2 / (sum x)^2 on unnormalized draws has
        # exactly the fixed-trace purity law
        p = EnsembleParams(2, a=Fraction(2))
        exact = flue_Tq_moment_sum(p, 2, 1)
        batch = sample_lue(p, 30000, RngSpec(seed=13))
        vals = normalized_purity_statistic().values(batch)
        assert se_gap(vals, exact) < 4.0

    @pytest.mark.parametrize("a", [0, 2])
    def test_purity_ks_n2(self, a):
        p = EnsembleParams(2, a=Fraction(a))
        d = sample_flue(p, 20000, RngSpec(seed=15 + a)).draws
        purity = (d**2).sum(axis=1)
        dist = ks_distance(purity, lambda t: purity_cdf_n2(a, t))
        # 1% critical value of the one-sample KS statistic
        assert dist * math.sqrt(purity.size) < 1.63


class TestSampleBetaLaguerre:
    def test_rejects_a_at_most_minus_one(self):
        with pytest.raises(ParameterError):
            sample_beta_laguerre(
                EnsembleParams(2, a=Fraction(-1)), 100, RngSpec(seed=1)
            )

    def test_tau_one_matches_lue_moments(self):
        p = EnsembleParams(3, a=Fraction(2))
        table = lue_moment_recurrence(p, 2)
        d = sample_beta_laguerre(p, 30000, RngSpec(seed=21)).draws
        assert se_gap(d.sum(axis=1), table.moment(1)) < 4.0
        assert se_gap((d**2).sum(axis=1), table.moment(2)) < 4.0

    @pytest.mark.parametrize("tau", [Fraction(1, 2), Fraction(2)])
    def test_mean_square_sum_matches_recursion(self, tau):
        p = EnsembleParams(3, a=Fraction(1), tau=tau)
        exact = beta_purity_moments(p, 1).moment(1)
        d = sample_beta_laguerre(p, 30000, RngSpec(seed=22)).draws
        assert se_gap(d.sum(axis=1), p.trace_mean) < 4.0
        assert se_gap((d**2).sum(axis=1), exact) < 4.0

    def test_fractional_parameters(self):
        p = EnsembleParams(2, a=Fraction(-1, 2), tau=Fraction(3, 4))
        d = sample_beta_laguerre(p, 20000, RngSpec(seed=23)).draws
        assert d.min() >= 0.0
        assert se_gap(d.sum(axis=1), p.trace_mean) < 4.0

    def test_single_level_is_gamma(self):
        p = EnsembleParams(1, a=Fraction(3), tau=Fraction(5, 4))
        d = sample_beta_laguerre(p, 20000, RngSpec(seed=24)).draws
        assert se_gap(d[:, 0], 4) < 4.0  # Gamma(a+1) mean
        assert se_gap(d[:, 0] ** 2, 20) < 4.0  # (a+1)(a+2)

    def test_fixed_trace_variant(self):
        p = EnsembleParams(3, a=Fraction(1), tau=Fraction(1, 2))
        batch = sample_beta_laguerre(p, 30000, RngSpec(seed=25), fixed_trace=True)
        assert batch.ensemble == "fLbeta"
        assert batch.params["beta"] == "1"
        assert np.abs(batch.draws.sum(axis=1) - 1.0).max() < 1e-12
        exact = beta_purity_moments(p, 1, fixed_trace=True).moment(1)
        purity = (batch.draws**2).sum(axis=1)
        assert se_gap(purity, exact) < 4.0
        var = purity.var(ddof=1)
        assert abs(var / float(flue_beta_kappa2(p)) - 1.0) < 0.05


class TestSampleSun:
    def test_rejects_small_n(self):
        with pytest.raises(ParameterError):
            sample_sun(1, 100, RngSpec(seed=1))

    def test_trace_power_means(self):
        # <Tr U^p> = 0 except p = 0 (N) and |p| = N ((-1)^(N-1))
        th = sample_sun(3, 30000, RngSpec(seed=31)).draws
        assert se_gap(np.cos(th).sum(axis=1), 0) < 4.0
        assert se_gap(np.cos(2 * th).sum(axis=1), 0) < 4.0
        assert se_gap(np.cos(3 * th).sum(axis=1), 1) < 4.0

    def test_su2_pair_correlations(self):
        th = sample_sun(2, 30000, RngSpec(seed=32)).draws
        tr2 = np.cos(2 * th).sum(axis=1)
        assert se_gap(tr2, -1) < 4.0
        abs1 = np.cos(th).sum(axis=1) ** 2 + np.sin(th).sum(axis=1) ** 2
        assert se_gap(abs1, 1) < 4.0
        # Im Tr U^2 vanishes identically for SU(2): phases are (theta, -theta)
        assert np.abs(np.sin(2 * th).sum(axis=1)).max() < 1e-12

    def test_deterministic_across_jobs(self):
        a = sample_sun(2, 20000, RngSpec(seed=33), jobs=1).draws
        b = sample_sun(2, 20000, RngSpec(seed=33), jobs=3).draws
        assert np.array_equal(a, b)


class TestSampleBatchValidation:
    def good(self, **kw):
        args = dict(
            ensemble="LUE",
            params={"N": "2", "a": "0", "tau": "1"},
            rng=RngSpec(seed=1),
            draws=np.array([[1.0, 2.0], [0.5, 3.0]]),
            rejected=0,
        )
        args.update(kw)
        return SampleBatch(**args)

    def test_accepts_valid(self):
        assert self.good().count == 2

    def test_rejects_unknown_ensemble(self):
        with pytest.raises(ParameterError):
            self.good(ensemble="GUE")

    def test_rejects_unsorted_rows(self):
        with pytest.raises(ParameterError):
            self.good(draws=np.array([[2.0, 1.0]]))

    def test_rejects_negative_eigenvalues(self):
        with pytest.raises(ParameterError):
            self.good(draws=np.array([[-0.5, 1.0]]))

    def test_rejects_bad_trace_for_fixed_ensembles(self):
        with pytest.raises(ParameterError):
            self.good(ensemble="fLUE", draws=np.array([[0.2, 0.9]]))

    def test_rejects_out_of_range_phases(self):
        with pytest.raises(ParameterError):
            self.good(ensemble="SUN", draws=np.array([[-1.0, 4.0]]))

    def test_rejects_negative_rejected_count(self):
        with pytest.raises(ParameterError):
            self.good(rejected=-1)

    def test_rejects_non_float_draws(self):
        with pytest.raises(ParameterError):
            self.good(draws=np.array([[1, 2]]))

    def test_draws_become_read_only(self):
        batch = self.good()
        with pytest.raises(ValueError):
            batch.draws[0, 0] = 5.0


class TestWelford:
    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=60))
    @settings(max_examples=60, deadline=None)
    def test_matches_numpy(self, values):
        acc = WelfordAccumulator()
        for v in values:
            acc.update(v)
        arr = np.array(values)
        assert acc.mean == pytest.approx(arr.mean(), rel=1e-9, abs=1e-9)
        assert acc.variance == pytest.approx(arr.var(ddof=1), rel=1e-9, abs=1e-9)

    @given(
        st.lists(st.floats(-50, 50), min_size=1, max_size=30),
        st.lists(st.floats(-50, 50), min_size=1, max_size=30),
    )
    @settings(max_examples=60, deadline=None)
    def test_merge_equals_pooled(self, xs, ys):
        left, right, pooled = (
            WelfordAccumulator(),
            WelfordAccumulator(),
            WelfordAccumulator(),
        )
        left.update_many(xs)
        right.update_many(ys)
        pooled.update_many(xs + ys)
        merged = left.merge(right)
        assert merged.count == pooled.count
        assert merged.mean == pytest.approx(pooled.mean, rel=1e-9, abs=1e-9)
        if merged.count >= 2:
            assert merged.variance == pytest.approx(
                pooled.variance, rel=1e-8, abs=1e-9
            )

    def test_update_many_matches_updates(self):
        a, b = WelfordAccumulator(), WelfordAccumulator()
        vals = [0.3, -1.2, 4.5, 2.2, 0.0]
        a.update_many(vals)
        for v in vals:
            b.update(v)
        assert a.mean == pytest.approx(b.mean, rel=1e-12)
        assert a.variance == pytest.approx(b.variance, rel=1e-12)

    def test_variance_needs_two_values(self):
        acc = WelfordAccumulator()
        acc.update(1.0)
        with pytest.raises(ParameterError):
            acc.variance


class TestStatistics:
    def test_power_sum_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            power_sum_statistic(0)

    def test_names(self):
        assert power_sum_statistic(3).name == "T3"
        assert purity_statistic().name == "purity"
        assert trace_power_statistic(2, "im").name == "ImTrU2"
        assert trace_power_abs2_statistic(4).name == "AbsTrU4Sq"

    def test_trace_power_rejects_bad_part(self):
        with pytest.raises(ParameterError):
            trace_power_statistic(1, "abs")

    def test_constant_statistic_has_zero_stderr(self):
        batch = sample_flue(EnsembleParams(3, a=Fraction(1)), 1000, RngSpec(seed=41))
        result = estimate_linear_statistic(batch, power_sum_statistic(1))
        assert result.statistic == "T1"
        assert result.mean == pytest.approx(1.0, abs=1e-13)
        assert result.stderr < 1e-14
        assert result.count == 1000

    def test_single_level_purity(self):
        batch = sample_lue(EnsembleParams(1), 30000, RngSpec(seed=42))
        result = estimate_linear_statistic(batch, purity_statistic())
        assert result.distance_in_se(2.0) < 4.0

    def test_covariance_of_statistic_with_itself_is_variance(self):
        batch = sample_lue(EnsembleParams(2), 3000, RngSpec(seed=43))
        t2 = power_sum_statistic(2)
        cov = estimate_covariance(batch, t2, t2)
        vals = t2.values(batch)
        assert cov.mean == pytest.approx(vals.var(ddof=1), rel=1e-12)

    def test_su2_trace_square_variance(self):
        batch = sample_sun(2, 30000, RngSpec(seed=44))
        re2 = trace_power_statistic(2, "re")
        cov = estimate_covariance(batch, re2, re2)
        assert cov.distance_in_se(1.0) < 4.0

    def test_estimator_result_validation(self):
        from ftlaguerre.sampling import EstimatorResult

        with pytest.raises(ParameterError):
            EstimatorResult("x", 0.0, 0.0, 1)
        r = EstimatorResult("x", 1.0, 0.0, 10)
        assert r.distance_in_se(1.0) == 0.0
        assert r.distance_in_se(2.0) == math.inf


class TestKsDistance:
    def test_exact_uniform_grid(self):
        n = 50
        values = (np.arange(n) + 0.5) / n
        assert ks_distance(values, lambda x: x) == pytest.approx(0.5 / n)

    def test_detects_wrong_distribution(self):
        values = np.linspace(0.01, 0.5, 200)
        assert ks_distance(values, lambda x: x) > 0.4

    def test_needs_values(self):
        with pytest.raises(ParameterError):
            ks_distance([], lambda x: x)


class TestCsvExports:
    def test_batch_csv_layout(self):
        batch = sample_lue(EnsembleParams(2, a=Fraction(1)), 50, RngSpec(seed=51))
        text = batch_csv(batch)
        lines = text.strip().split("\n")
        headers = [ln for ln in lines if ln.startswith("#")]
        assert "# ensemble=LUE" in headers
        assert "# seed=51" in headers
        assert f"# algorithm={ALGORITHM_ID}" in headers
        assert "# count=50" in headers
        data = [ln for ln in lines if not ln.startswith("#")]
        assert data[0] == "v1,v2"
        assert len(data) == 51
        first = np.array([float(x) for x in data[1].split(",")])
        assert np.array_equal(first, batch.draws[0])

    def test_histogram_csv(self):
        values = np.array([0.1, 0.2, 0.6, 0.7, 0.8])
        text = histogram_csv(values, [0.0, 0.5, 1.0], {"label": "demo"})
        lines = text.strip().split("\n")
        assert lines[0] == "# label=demo"
        assert lines[1] == "bin_left,bin_right,count,density"
        rows = [ln.split(",") for ln in lines[2:]]
        assert [int(r[2]) for r in rows] == [2, 3]
        # densities integrate to one
        total = sum(float(r[3]) * (float(r[1]) - float(r[0])) for r in rows)
        assert total == pytest.approx(1.0)

    def test_histogram_rejects_bad_edges(self):
        with pytest.raises(ParameterError):
            histogram_csv([0.5], [0.0, 0.0, 1.0])
