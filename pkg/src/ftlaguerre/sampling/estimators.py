"""Estimators and exports for Monte Carlo batches.

A :class:`Statistic` maps a whole batch of draws (rows) to one scalar
per draw; :func:`estimate_linear_statistic` then reduces those scalars
with a Welford accumulator (numerically stable running mean/variance,
mergeable across chunks) into a mean with a standard error.  Covariances
between two statistics, Kolmogorov-Smirnov distances against an exact
distribution function, and CSV exports round out the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from ..errors import ParameterError
from .rng import SHARD_SIZE
from .samplers import SampleBatch

__all__ = [
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


@dataclass(frozen=True)
class EstimatorResult:
    """A Monte Carlo point estimate: sample mean, its standard error
    (sample standard deviation over sqrt(count)) and the sample size."""

    statistic: str
    mean: float
    stderr: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ParameterError("an estimate needs at least two draws")
        if not (self.stderr >= 0.0):
            raise ParameterError(f"standard error must be nonnegative, got {self.stderr}")

    def distance_in_se(self, reference: float) -> float:
        """|mean - reference| in units of the standard error (inf when
        the spread is exactly zero but the means differ)."""
        gap = abs(self.mean - float(reference))
        if gap == 0.0:
            return 0.0
        if self.stderr == 0.0:
            return math.inf
        return gap / self.stderr


class WelfordAccumulator:
    """Running mean and scatter, mergeable.

    ``update`` folds in one value, ``update_many`` a chunk (reduced with
    numpy, then merged), and ``merge`` combines two accumulators by the
    pairwise formula, so any chunking of the same values gives the same
    estimate up to roundoff.
    """

    __slots__ = ("_count", "_mean", "_m2")

    def __init__(self):
        self._count = 0
        self._mean = 0.0
        self._m2 = 0.0

    @property
    def count(self) -> int:
        return self._count

    @property
    def mean(self) -> float:
        if self._count == 0:
            raise ParameterError("no values accumulated yet")
        return self._mean

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self._count < 2:
            raise ParameterError("variance needs at least two values")
        return self._m2 / (self._count - 1)

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self._count)

    def update(self, value: float) -> None:
        self._count += 1
        delta = value - self._mean
        self._mean += delta / self._count
        self._m2 += delta * (value - self._mean)

    def update_many(self, values) -> None:
        chunk = np.asarray(values, dtype=np.float64).ravel()
        if chunk.size == 0:
            return
        self._combine(int(chunk.size), float(chunk.mean()), float(((chunk - chunk.mean()) ** 2).sum()))

    def merge(self, other: "WelfordAccumulator") -> "WelfordAccumulator":
        out = WelfordAccumulator()
        out._count = self._count
        out._mean = self._mean
        out._m2 = self._m2
        out._combine(other._count, other._mean, other._m2)
        return out

    def _combine(self, count: int, mean: float, m2: float) -> None:
        if count == 0:
            return
        if self._count == 0:
            self._count, self._mean, self._m2 = count, mean, m2
            return
        total = self._count + count
        delta = mean - self._mean
        self._mean += delta * count / total
        self._m2 += m2 + delta * delta * self._count * count / total
        self._count = total

    def result(self, statistic: str) -> EstimatorResult:
        return EstimatorResult(statistic, self.mean, self.stderr, self.count)


@dataclass(frozen=True)
class Statistic:
    """A per-draw scalar: ``fn`` maps the (count, n) draw matrix to a
    length-count vector."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def values(self, batch: SampleBatch) -> np.ndarray:
        out = np.asarray(self.fn(batch.draws), dtype=np.float64)
        if out.shape != (batch.count,):
            raise ParameterError(
                f"statistic {self.name!r} returned shape {out.shape}, "
                f"expected ({batch.count},)"
            )
        return out


def power_sum_statistic(q: int) -> Statistic:
    """sum_j x_j^q of each draw."""
    if not isinstance(q, int) or q < 1:
        raise ParameterError(f"the power must be a positive integer, got {q}")
    return Statistic(f"T{q}", lambda rows: (rows**q).sum(axis=1))


def purity_statistic() -> Statistic:
    """sum_j x_j^2 (the purity of a fixed-trace draw, and the plain
    second power sum otherwise)."""
    return Statistic("purity", lambda rows: (rows**2).sum(axis=1))


def normalized_purity_statistic() -> Statistic:
    """sum_j x_j^2 / (sum_j x_j)^2 — scale-invariant, so on unnormalized
    draws it has exactly the fixed-trace purity distribution."""
    return Statistic(
        "normalized_purity",
        lambda rows: (rows**2).sum(axis=1) / rows.sum(axis=1) ** 2,
    )


def trace_power_statistic(p: int, part: str = "re") -> Statistic:
    """Re or Im of Tr U^p from a batch of eigenphase draws."""
    if not isinstance(p, int):
        raise ParameterError(f"the trace power must be an integer, got {p}")
    if part == "re":
        return Statistic(f"ReTrU{p}", lambda rows: np.cos(p * rows).sum(axis=1))
    if part == "im":
        return Statistic(f"ImTrU{p}", lambda rows: np.sin(p * rows).sum(axis=1))
    raise ParameterError(f"part must be 're' or 'im', got {part!r}")


def trace_power_abs2_statistic(p: int) -> Statistic:
    """|Tr U^p|^2 from a batch of eigenphase draws."""
    if not isinstance(p, int):
        raise ParameterError(f"the trace power must be an integer, got {p}")

    def fn(rows: np.ndarray) -> np.ndarray:
        re = np.cos(p * rows).sum(axis=1)
        im = np.sin(p * rows).sum(axis=1)
        return re * re + im * im

    return Statistic(f"AbsTrU{p}Sq", fn)


def estimate_linear_statistic(batch: SampleBatch, stat: Statistic) -> EstimatorResult:
    """Mean and standard error of ``stat`` over the batch, accumulated
    shard-sized chunk by chunk."""
    values = stat.values(batch)
    acc = WelfordAccumulator()
    for start in range(0, values.size, SHARD_SIZE):
        acc.update_many(values[start : start + SHARD_SIZE])
    return acc.result(stat.name)


def estimate_covariance(
    batch: SampleBatch, first: Statistic, second: Statistic
) -> EstimatorResult:
    """Sample covariance of two per-draw statistics, with a standard
    error from the scatter of the centered products."""
    f = first.values(batch)
    g = second.values(batch)
    n = batch.count
    if n < 2:
        raise ParameterError("a covariance estimate needs at least two draws")
    centered = (f - f.mean()) * (g - g.mean())
    cov = float(centered.sum() / (n - 1))
    spread = float(centered.std(ddof=1)) / math.sqrt(n)
    return EstimatorResult(f"cov({first.name},{second.name})", cov, spread, n)


def ks_distance(values, cdf: Callable[[float], float]) -> float:
    """Kolmogorov-Smirnov distance between the empirical distribution of
    ``values`` and the exact distribution function ``cdf``."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = v.size
    if n < 1:
        raise ParameterError("the KS distance needs at least one value")
    f = np.array([float(cdf(float(x))) for x in v])
    steps = np.arange(n, dtype=np.float64)
    lower = np.abs(f - steps / n).max()
    upper = np.abs(f - (steps + 1.0) / n).max()
    return float(max(lower, upper))


def _header_lines(meta: Mapping[str, str]) -> list[str]:
    return [f"# {key}={value}" for key, value in meta.items()]


def batch_csv(batch: SampleBatch) -> str:
    """The batch as CSV text: '# key=value' header lines carrying the
    ensemble, its parameters and the RNG coordinates, then one sorted row
    per draw at full float precision."""
    meta = {"ensemble": batch.ensemble}
    meta.update(batch.params)
    meta.update(
        seed=str(batch.rng.seed),
        algorithm=batch.rng.algorithm,
        count=str(batch.count),
        rejected=str(batch.rejected),
    )
    lines = _header_lines(meta)
    width = batch.draws.shape[1]
    lines.append(",".join(f"v{j + 1}" for j in range(width)))
    for row in batch.draws:
        lines.append(",".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


def histogram_csv(values, edges, meta: Mapping[str, str] | None = None) -> str:
    """Histogram of ``values`` on the given bin edges as CSV text with
    columns bin_left, bin_right, count and the density estimate
    count / (total * width)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    e = np.asarray(edges, dtype=np.float64).ravel()
    if e.size < 2 or np.any(e[1:] <= e[:-1]):
        raise ParameterError("bin edges must be strictly increasing, length >= 2")
    counts, _ = np.histogram(v, bins=e)
    total = v.size
    if total == 0:
        raise ParameterError("the histogram needs at least one value")
    lines = _header_lines(meta or {})
    lines.append("bin_left,bin_right,count,density")
    for k, c in enumerate(counts):
        width = e[k + 1] - e[k]
        density = c / (total * width)
        lines.append(f"{e[k]:.17g},{e[k + 1]:.17g},{int(c)},{density:.17g}")
    return "\n".join(lines) + "\n"
