"""Monte Carlo samplers.

Four ensembles are drawn here, all through the batch kernels in
:mod:`.kernels` and the sharded Philox streams from :mod:`.rng`:

* ``LUE`` — eigenvalues of G*G for a complex Ginibre matrix G of shape
  (N+a) x N with unit-variance entries, so the eigenvalue weight per
  level is x^a e^{-x}.  Needs tau = 1 and integer a >= 0.
* ``fLUE`` — the same draws with each eigenvalue row divided by its sum
  (conditioning on trace one is exactly this normalization, because the
  trace and the direction of the spectrum are independent).
* ``Lbeta`` / ``fLbeta`` — general tau > 0 via the bidiagonal chi-square
  model: the symmetric tridiagonal matrix built from independent
  chi-square entries below has eigenvalue density proportional to
  prod_j x_j^a e^{-x_j} |Delta(x)|^{2 tau} for any real a > -1 and any
  tau > 0, at O(N^2) cost per draw.
* ``SUN`` — eigenphases of Haar-distributed special unitary matrices.

Draws are produced shard by shard (fixed shard size, independent
substreams), so the assembled output is bit-identical no matter how many
worker threads run the shards.  Eigensolver non-convergence is handled
per family: Laguerre-type draws are dropped (and counted; more than 0.1%
drops aborts the run), while SU(N) draws are retried from the same
shard's stream, keeping the draw count exact.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..errors import ConvergenceError, ParameterError
from ..moments import EnsembleParams
from .kernels import eig_herm_batch, eig_tridiag_batch, sun_phase_batch
from .rng import RngSpec, shard_plan

__all__ = [
    "SampleBatch",
    "sample_lue",
    "sample_flue",
    "sample_beta_laguerre",
    "sample_sun",
    "hermitian_eigenvalues",
    "tridiagonal_eigenvalues",
]

logger = logging.getLogger("ftlaguerre.sampling")

_ENSEMBLES = ("LUE", "fLUE", "Lbeta", "fLbeta", "SUN")

#: Fraction of dropped draws above which a sampling run is aborted.
MAX_DROP_RATE = 1e-3

#: Rounds of SU(N) redraws before giving up on a shard.
_MAX_REDRAW_ROUNDS = 8


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """A finished batch of Monte Carlo draws.

    ``draws`` has one sorted row per draw: eigenvalues for the Laguerre
    families, eigenphases in (-pi, pi] for SUN.  ``params`` records the
    ensemble parameters as strings (rationals as "p/q") so exports can
    reproduce the run, and ``rejected`` counts dropped draws (Laguerre)
    or redraws (SUN).
    """

    ensemble: str
    params: dict[str, str] = field(repr=False)
    rng: RngSpec
    draws: np.ndarray = field(repr=False)
    rejected: int = 0

    def __post_init__(self):
        if self.ensemble not in _ENSEMBLES:
            raise ParameterError(
                f"unknown ensemble label {self.ensemble!r}; expected one of {_ENSEMBLES}"
            )
        d = self.draws
        if not isinstance(d, np.ndarray) or d.ndim != 2 or d.dtype != np.float64:
            raise ParameterError("draws must be a 2-D float64 array")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ParameterError("draws must contain at least one row and column")
        if self.rejected < 0:
            raise ParameterError("rejected count cannot be negative")
        if np.any(d[:, 1:] < d[:, :-1]):
            raise ParameterError("each draw must be sorted ascending")
        if self.ensemble in ("LUE", "Lbeta"):
            if d.min() < -1e-10:
                raise ParameterError("Laguerre draws must be nonnegative")
        elif self.ensemble in ("fLUE", "fLbeta"):
            if np.abs(d.sum(axis=1) - 1.0).max() > 1e-12:
                raise ParameterError("fixed-trace draws must sum to one")
        else:  # SUN
            if np.abs(d).max() > math.pi + 1e-12:
                raise ParameterError("eigenphases must lie in (-pi, pi]")
        d.flags.writeable = False

    @property
    def count(self) -> int:
        return self.draws.shape[0]


def _run_shards(n_draws: int, jobs: int, work: Callable) -> list:
    """Run ``work(shard_index, count)`` over the shard plan, in parallel
    when jobs > 1, and return the results in shard order."""
    if not isinstance(jobs, int) or jobs < 1:
        raise ParameterError(f"jobs must be a positive integer, got {jobs}")
    plan = shard_plan(n_draws)
    if jobs == 1 or len(plan) == 1:
        return [work(idx, cnt) for idx, cnt in plan]
    results = [None] * len(plan)
    with ThreadPoolExecutor(max_workers=min(jobs, len(plan))) as pool:
        futures = {
            pool.submit(work, idx, cnt): pos for pos, (idx, cnt) in enumerate(plan)
        }
        for fut, pos in futures.items():
            results[pos] = fut.result()
    return results


def _check_drop_rate(ensemble: str, rejected: int, n_draws: int) -> None:
    if rejected == 0:
        return
    logger.warning(
        "%s sampling dropped %d of %d draws (eigensolver non-convergence)",
        ensemble,
        rejected,
        n_draws,
    )
    if rejected > MAX_DROP_RATE * n_draws:
        raise ConvergenceError(
            f"{ensemble} sampling dropped {rejected} of {n_draws} draws, "
            f"above the {MAX_DROP_RATE:.1%} abort threshold"
        )


def _lue_eigenvalue_parts(
    params: EnsembleParams, n_draws: int, rng: RngSpec, jobs: int
) -> tuple[np.ndarray, int]:
    params.require_unitary()
    a = params.integer_a()
    n = params.N
    m = n + a

    def work(idx: int, cnt: int):
        gen = rng.generator(idx)
        g = rng.complex_normals(gen, (cnt, m, n))
        h = np.einsum("bij,bik->bjk", g.conj(), g)
        h = 0.5 * (h + np.conj(np.swapaxes(h, 1, 2)))
        w, status = eig_herm_batch(h)
        ok = status == 0
        return w[ok], int(cnt - int(ok.sum()))

    parts = _run_shards(n_draws, jobs, work)
    draws = np.concatenate([p[0] for p in parts])
    rejected = sum(p[1] for p in parts)
    return draws, rejected


def _param_strings(params: EnsembleParams) -> dict[str, str]:
    return {"N": str(params.N), "a": str(params.a), "tau": str(params.tau)}


def sample_lue(
    params: EnsembleParams, n_draws: int, rng: RngSpec, *, jobs: int = 1
) -> SampleBatch:
    """Draw LUE eigenvalue vectors (tau = 1, integer a >= 0)."""
    draws, rejected = _lue_eigenvalue_parts(params, n_draws, rng, jobs)
    _check_drop_rate("LUE", rejected, n_draws)
    return SampleBatch("LUE", _param_strings(params), rng, draws, rejected)


def sample_flue(
    params: EnsembleParams, n_draws: int, rng: RngSpec, *, jobs: int = 1
) -> SampleBatch:
    """Draw fixed-trace LUE eigenvalue vectors (rows sum to one)."""
    draws, rejected = _lue_eigenvalue_parts(params, n_draws, rng, jobs)
    _check_drop_rate("fLUE", rejected, n_draws)
    draws = draws / draws.sum(axis=1, keepdims=True)
    return SampleBatch("fLUE", _param_strings(params), rng, draws, rejected)


def sample_beta_laguerre(
    params: EnsembleParams,
    n_draws: int,
    rng: RngSpec,
    *,
    jobs: int = 1,
    fixed_trace: bool = False,
) -> SampleBatch:
    """Draw eigenvalues with weight prod x^a e^{-x} |Delta|^{2 tau}.

    Uses the bidiagonal chi-square model: for B lower bidiagonal with
    B_ii^2 ~ chi^2(2(a+1) + 2 tau (N-1-i)) and B_{i+1,i}^2 ~
    chi^2(2 tau (N-1-i)), the eigenvalues of B B^T / 2 carry exactly the
    target density.  Works for any rational a > -1 and tau > 0; with
    ``fixed_trace`` each row is normalized to unit sum afterwards.
    """
    if params.a <= -1:
        raise ParameterError(f"the chi-square model needs a > -1, got a={params.a}")
    n = params.N
    tau = float(params.tau)
    af = float(params.a)
    diag_dof = np.array([2.0 * (af + 1.0) + 2.0 * tau * (n - 1 - i) for i in range(n)])
    sub_dof = np.array([2.0 * tau * (n - 1 - i) for i in range(n - 1)])

    def work(idx: int, cnt: int):
        gen = rng.generator(idx)
        d2 = gen.gamma(diag_dof / 2.0, scale=2.0, size=(cnt, n))
        s2 = gen.gamma(sub_dof / 2.0, scale=2.0, size=(cnt, n - 1))
        diag = np.empty((cnt, n))
        diag[:, 0] = d2[:, 0] / 2.0
        diag[:, 1:] = (d2[:, 1:] + s2) / 2.0
        off = np.sqrt(d2[:, :-1] * s2) / 2.0
        w, status = eig_tridiag_batch(diag, off)
        ok = status == 0
        return w[ok], int(cnt - int(ok.sum()))

    label = "fLbeta" if fixed_trace else "Lbeta"
    parts = _run_shards(n_draws, jobs, work)
    draws = np.concatenate([p[0] for p in parts])
    rejected = sum(p[1] for p in parts)
    _check_drop_rate(label, rejected, n_draws)
    if fixed_trace:
        draws = draws / draws.sum(axis=1, keepdims=True)
    info = _param_strings(params)
    info["beta"] = str(2 * params.tau)
    return SampleBatch(label, info, rng, draws, rejected)


def sample_sun(n: int, n_draws: int, rng: RngSpec, *, jobs: int = 1) -> SampleBatch:
    """Draw sorted eigenphase vectors of Haar SU(n), n >= 2.

    A draw whose phase extraction fails its internal consistency checks
    (QR breakdown, determinant off, near-degenerate mixing) is redrawn
    from the same shard stream, so the output stays deterministic.
    """
    if not isinstance(n, int) or n < 2:
        raise ParameterError(f"SU(n) sampling needs an integer n >= 2, got {n}")

    def work(idx: int, cnt: int):
        gen = rng.generator(idx)
        z = rng.complex_normals(gen, (cnt, n, n))
        phases, status = sun_phase_batch(z)
        phases = np.ascontiguousarray(phases)
        redraws = 0
        bad = np.nonzero(status)[0]
        rounds = 0
        while bad.size and rounds < _MAX_REDRAW_ROUNDS:
            redraws += int(bad.size)
            z = rng.complex_normals(gen, (bad.size, n, n))
            repl, status = sun_phase_batch(z)
            good = status == 0
            phases[bad[good]] = repl[good]
            bad = bad[~good]
            rounds += 1
        if bad.size:
            raise ConvergenceError(
                f"SU({n}) shard {idx}: {bad.size} draws still failing after "
                f"{_MAX_REDRAW_ROUNDS} redraw rounds"
            )
        return phases, redraws

    parts = _run_shards(n_draws, jobs, work)
    draws = np.concatenate([p[0] for p in parts])
    redraws = sum(p[1] for p in parts)
    if redraws:
        logger.info("SU(%d) sampling redrew %d draws", n, redraws)
    return SampleBatch("SUN", {"n": str(n)}, rng, draws, redraws)


def hermitian_eigenvalues(matrix) -> np.ndarray:
    """Sorted eigenvalues of a single Hermitian matrix, via the same
    kernel the samplers use (handy for spot checks against known
    spectra)."""
    h = np.ascontiguousarray(matrix, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ParameterError("expected a square matrix")
    scale = max(1.0, float(np.abs(h).max()))
    if float(np.abs(h - h.conj().T).max()) > 1e-12 * scale:
        raise ParameterError("matrix is not Hermitian to working precision")
    w, status = eig_herm_batch(h[None, :, :])
    if status[0] != 0:
        raise ConvergenceError("eigenvalue iteration did not converge")
    return w[0]


def tridiagonal_eigenvalues(diag, off) -> np.ndarray:
    """Sorted eigenvalues of a single real symmetric tridiagonal matrix
    given its diagonal and subdiagonal."""
    d = np.ascontiguousarray(diag, dtype=np.float64)
    e = np.ascontiguousarray(off, dtype=np.float64)
    if d.ndim != 1 or e.ndim != 1 or d.size < 1 or e.size != d.size - 1:
        raise ParameterError(
            "expected a length-n diagonal and a length-(n-1) subdiagonal"
        )
    w, status = eig_tridiag_batch(d[None, :], e[None, :])
    if status[0] != 0:
        raise ConvergenceError("eigenvalue iteration did not converge")
    return w[0]
