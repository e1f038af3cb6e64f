"""Deterministic random-number plumbing for the Monte Carlo harness.

Draws are organized in fixed-size shards.  Shard i uses a counter-based
generator jumped i blocks ahead of the seed state, so the sample stream
is a pure function of (seed, shard index, position) — independent of how
many worker threads execute the shards and stable under growing the draw
count (existing shards keep their contents).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

__all__ = ["ALGORITHM_ID", "SHARD_SIZE", "RngSpec", "shard_plan"]

ALGORITHM_ID = "philox4x64-10"

# Never derived from the job count: changing parallelism must not move
# any draw to a different generator state.
SHARD_SIZE = 8192


@dataclass(frozen=True)
class RngSpec:
    """Seed plus the algorithm identifier that is stamped on every output."""

    seed: int
    algorithm: str = ALGORITHM_ID

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ParameterError("seed must fit in 64 unsigned bits")
        if self.algorithm != ALGORITHM_ID:
            raise ParameterError(
                f"unsupported generator {self.algorithm!r}; "
                f"only {ALGORITHM_ID!r} is provided"
            )

    def generator(self, shard: int) -> np.random.Generator:
        """Generator for the given shard index."""
        if shard < 0:
            raise ParameterError("shard index must be nonnegative")
        bitgen = np.random.Philox(key=self.seed)
        if shard:
            bitgen = bitgen.jumped(shard)
        return np.random.Generator(bitgen)

    def complex_normals(
        self, gen: np.random.Generator, shape: tuple[int, ...]
    ) -> np.ndarray:
        """Standard complex Gaussians with unit mean squared modulus:
        real and imaginary parts each N[0, 1/sqrt(2)]."""
        re = gen.standard_normal(shape)
        im = gen.standard_normal(shape)
        return (re + 1j * im) * np.sqrt(0.5)


def shard_plan(n_draws: int) -> list[tuple[int, int]]:
    """(shard index, draws in shard) pairs covering n_draws."""
    if n_draws <= 0:
        raise ParameterError("draw count must be positive")
    plan = []
    full, rest = divmod(n_draws, SHARD_SIZE)
    for i in range(full):
        plan.append((i, SHARD_SIZE))
    if rest:
        plan.append((full, rest))
    return plan
