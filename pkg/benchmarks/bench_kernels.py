"""Timing comparison of the compiled eigenvalue kernels against their
pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

The script re-executes itself in a subprocess with FTLAGUERRE_NO_NUMBA=1
on the same inputs, so a single invocation prints both columns plus the
numerical gap between the two paths (expected: rounding-level, the
compiled code may contract multiplies and adds).
"""

import argparse
import json
import os
import subprocess
import sys
import tempfile
import time

import numpy as np


def make_inputs():
    """Deterministic workloads, sized so the fallback finishes in seconds."""
    rng = np.random.default_rng(20240818)
    n_tri, size_tri = 400, 16
    diag = rng.standard_normal((n_tri, size_tri))
    off = rng.standard_normal((n_tri, size_tri - 1))

    n_herm, size_herm = 60, 12
    g = rng.standard_normal((n_herm, size_herm, size_herm)) + 1j * rng.standard_normal(
        (n_herm, size_herm, size_herm)
    )
    herm = 0.5 * (g + np.conj(np.transpose(g, (0, 2, 1))))

    n_sun, size_sun = 60, 8
    gin = (
        rng.standard_normal((n_sun, size_sun, size_sun))
        + 1j * rng.standard_normal((n_sun, size_sun, size_sun))
    ) * np.sqrt(0.5)
    return diag, off, herm, gin


def run_cases(repeats=3):
    from ftlaguerre.sampling import kernels

    diag, off, herm, gin = make_inputs()
    cases = [
        ("tridiagonal-eig 400x16", kernels.eig_tridiag_batch, (diag, off)),
        ("hermitian-eig 60x12", kernels.eig_herm_batch, (herm,)),
        ("sun-phases 60x8", kernels.sun_phase_batch, (gin,)),
    ]
    mode = "numba" if kernels.NUMBA_ENABLED else "numpy-fallback"
    timings = {}
    outputs = {}
    for name, fn, args in cases:
        values, status = fn(*args)  # warm-up; also compiles under numba
        if int(status.max()) != 0:
            raise RuntimeError(f"{name}: kernel reported a failed batch entry")
        best = min(
            _timed(fn, args) for _ in range(repeats)
        )
        timings[name] = best
        outputs[name] = values
    return mode, timings, outputs


def _timed(fn, args):
    start = time.perf_counter()
    fn(*args)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dump",
        help="(internal) write timings JSON and outputs NPZ to this prefix",
    )
    opts = parser.parse_args()

    mode, timings, outputs = run_cases()

    if opts.dump:
        with open(opts.dump + ".json", "w", encoding="utf-8") as fh:
            json.dump({"mode": mode, "timings": timings}, fh)
        np.savez(opts.dump + ".npz", **outputs)
        return

    if mode != "numba":
        print("numba is unavailable or disabled; only the fallback ran:")
        for name, sec in timings.items():
            print(f"  {name:<26} {sec * 1e3:9.2f} ms")
        return

    with tempfile.TemporaryDirectory() as tmp:
        prefix = os.path.join(tmp, "fallback")
        env = dict(os.environ, FTLAGUERRE_NO_NUMBA="1")
        subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--dump", prefix],
            env=env,
            check=True,
        )
        with open(prefix + ".json", encoding="utf-8") as fh:
            fb = json.load(fh)
        fb_out = np.load(prefix + ".npz")
        assert fb["mode"] == "numpy-fallback"

        header = f"{'kernel':<26} {'numba':>10} {'fallback':>10} {'speedup':>8} {'max gap':>9}"
        print(header)
        print("-" * len(header))
        for name, sec in timings.items():
            fsec = fb["timings"][name]
            gap = float(np.abs(outputs[name] - fb_out[name]).max())
            print(
                f"{name:<26} {sec * 1e3:8.2f}ms {fsec * 1e3:8.2f}ms "
                f"{fsec / sec:7.1f}x {gap:9.1e}"
            )


if __name__ == "__main__":
    main()
