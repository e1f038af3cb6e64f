"""Seeded Monte Carlo: sharded Philox streams, in-repo eigensolver
kernels (numba-compiled when available, plain numpy otherwise), samplers
for the Laguerre families and Haar SU(N), and estimators with standard
errors."""

from .estimators import (
    EstimatorResult,
    Statistic,
    WelfordAccumulator,
    batch_csv,
    estimate_covariance,
    estimate_linear_statistic,
    histogram_csv,
    ks_distance,
    normalized_purity_statistic,
    power_sum_statistic,
    purity_statistic,
    trace_power_abs2_statistic,
    trace_power_statistic,
)
from .kernels import NUMBA_ENABLED, eig_herm_batch, eig_tridiag_batch, sun_phase_batch
from .rng import ALGORITHM_ID, SHARD_SIZE, RngSpec, shard_plan
from .samplers import (
    SampleBatch,
    hermitian_eigenvalues,
    sample_beta_laguerre,
    sample_flue,
    sample_lue,
    sample_sun,
    tridiagonal_eigenvalues,
)

__all__ = [
    "ALGORITHM_ID",
    "SHARD_SIZE",
    "NUMBA_ENABLED",
    "RngSpec",
    "shard_plan",
    "eig_tridiag_batch",
    "eig_herm_batch",
    "sun_phase_batch",
    "SampleBatch",
    "sample_lue",
    "sample_flue",
    "sample_beta_laguerre",
    "sample_sun",
    "hermitian_eigenvalues",
    "tridiagonal_eigenvalues",
    "EstimatorResult",
    "WelfordAccumulator",
    "Statistic",
    "power_sum_statistic",
    "purity_statistic",
    "normalized_purity_statistic",
    "trace_power_statistic",
    "trace_power_abs2_statistic",
    "estimate_linear_statistic",
    "estimate_covariance",
    "ks_distance",
    "batch_csv",
    "histogram_csv",
]
