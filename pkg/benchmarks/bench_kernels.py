#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run from the repository root:

    python benchmarks/bench_kernels.py

The jit path is warmed before timing so compile time is excluded; re-running
is cheap because the kernels cache their compiled code.  Set
``PHONELINE_NUMBA=0`` to confirm the package still works on the fallback.
"""

import time

import numpy as np

from phoneline import _kernels

N_DRAWS = 2_000_000
GRID = 1024
REPEATS = 5


def time_fn(fn, *args):
    fn(*args)  # warm-up (jit compile / cache load)
    best = float("inf")
    for _ in range(REPEATS):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_classify():
    rng = np.random.default_rng(0)
    rows = rng.dirichlet(np.ones(5), size=5)
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    true_idx = rng.integers(0, 5, size=N_DRAWS).astype(np.int64)
    uniforms = rng.random(N_DRAWS)
    print(f"confusion sampling, {N_DRAWS:,} draws")
    t_np = time_fn(_kernels.classify_components_numpy, true_idx, cdf, uniforms)
    print(f"  numpy : {t_np * 1e3:8.2f} ms")
    if _kernels.classify_components_numba is not None:
        t_nb = time_fn(_kernels.classify_components_numba, true_idx, cdf, uniforms)
        print(f"  numba : {t_nb * 1e3:8.2f} ms   ({t_np / t_nb:4.1f}x)")
    else:
        print("  numba : unavailable (disabled or not installed)")


def bench_rasterize():
    rng = np.random.default_rng(1)
    angles = np.sort(rng.uniform(0, 2 * np.pi, size=12))
    radius = rng.uniform(GRID * 0.2, GRID * 0.45, size=12)
    px = GRID / 2 + radius * np.cos(angles)
    py = GRID / 2 + radius * np.sin(angles)
    print(f"polygon rasterisation, {GRID}x{GRID} px, 12 vertices")
    t_np = time_fn(_kernels.rasterize_polygon_numpy, px, py, 0.0, 0.0, GRID, GRID, 1.0)
    print(f"  numpy : {t_np * 1e3:8.2f} ms")
    if _kernels.rasterize_polygon_numba is not None:
        t_nb = time_fn(_kernels.rasterize_polygon_numba, px, py, 0.0, 0.0, GRID, GRID, 1.0)
        print(f"  numba : {t_nb * 1e3:8.2f} ms   ({t_np / t_nb:4.1f}x)")
    else:
        print("  numba : unavailable (disabled or not installed)")


if __name__ == "__main__":
    print(f"numba path enabled: {_kernels.USE_NUMBA}")
    bench_classify()
    bench_rasterize()
