"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Set ``PHONELINE_NUMBA=0`` in the environment to force the numpy path; the
fallback is also selected automatically when numba is not importable.  Both
paths compute bitwise-identical results (same operations, same order), which
the test suite asserts.  ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("PHONELINE_NUMBA", "1").strip().lower()
USE_NUMBA = _FLAG not in ("0", "false", "no", "off")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - exercised via env flag instead
        USE_NUMBA = False


def _classify_components_impl(true_idx, cdf_rows, uniforms):
    out = np.empty(true_idx.shape[0], dtype=np.int64)
    n_classes = cdf_rows.shape[1]
    for i in range(true_idx.shape[0]):
        row = cdf_rows[true_idx[i]]
        u = uniforms[i]
        j = 0
        while j < n_classes - 1 and u >= row[j]:
            j += 1
        out[i] = j
    return out


def classify_components_numpy(true_idx: np.ndarray, cdf_rows: np.ndarray,
                              uniforms: np.ndarray) -> np.ndarray:
    """Batch confusion-matrix sampling by cumulative-row inversion.

    ``out[i] = j`` such that ``uniforms[i]`` falls in the j-th CDF bucket of
    row ``true_idx[i]``.  Matches ``searchsorted(row, u, side='right')``.
    """
    out = np.empty(true_idx.shape[0], dtype=np.int64)
    for c in range(cdf_rows.shape[0]):
        sel = true_idx == c
        if sel.any():
            out[sel] = np.searchsorted(cdf_rows[c], uniforms[sel], side="right")
    return out


def _rasterize_polygon_impl(px, py, x0, y0, nx, ny, step):
    mask = np.zeros((ny, nx), dtype=np.bool_)
    n = px.shape[0]
    for iy in range(ny):
        y = y0 + (iy + 0.5) * step
        for ix in range(nx):
            x = x0 + (ix + 0.5) * step
            inside = False
            j = n - 1
            for i in range(n):
                yi = py[i]
                yj = py[j]
                if (yi > y) != (yj > y):
                    xint = px[i] + (y - yi) * (px[j] - px[i]) / (yj - yi)
                    if x < xint:
                        inside = not inside
                j = i
            mask[iy, ix] = inside
    return mask


def rasterize_polygon_numpy(px: np.ndarray, py: np.ndarray, x0: float, y0: float,
                            nx: int, ny: int, step: float) -> np.ndarray:
    """Even-odd rasterisation of a polygon onto pixel centres."""
    xs = x0 + (np.arange(nx) + 0.5) * step
    ys = y0 + (np.arange(ny) + 0.5) * step
    grid_x, grid_y = np.meshgrid(xs, ys)
    inside = np.zeros((ny, nx), dtype=bool)
    n = px.shape[0]
    j = n - 1
    for i in range(n):
        yi, yj = py[i], py[j]
        if yi != yj:
            crosses = (yi > grid_y) != (yj > grid_y)
            xint = px[i] + (grid_y - yi) * (px[j] - px[i]) / (yj - yi)
            inside ^= crosses & (grid_x < xint)
        j = i
    return inside


if USE_NUMBA:
    classify_components_numba = njit(cache=True)(_classify_components_impl)
    rasterize_polygon_numba = njit(cache=True)(_rasterize_polygon_impl)
    classify_components = classify_components_numba
    rasterize_polygon = rasterize_polygon_numba
else:
    classify_components_numba = None
    rasterize_polygon_numba = None
    classify_components = classify_components_numpy
    rasterize_polygon = rasterize_polygon_numpy
