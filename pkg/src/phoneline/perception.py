"""Stochastic classification model: row-stochastic confusion matrices sampled
by cumulative inversion, plus confidence thresholding."""

from __future__ import annotations

import bisect
import math
from typing import Optional, Sequence

import numpy as np

from ._kernels import classify_components
from .engine import RngStream
from .model import CLASS_INDEX, DETECTABLE_CLASSES, ComponentClass, DomainError

#: Diagonal of the default error model: overall accuracy under uniform priors.
DEFAULT_DIAGONAL = 0.989


class ConfusionMatrix:
    """5x5 matrix M with rows = true class, columns = predicted class.

    Rows must be non-negative and sum to 1 (checked at load, not per draw).
    """

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        n = len(DETECTABLE_CLASSES)
        if m.shape != (n, n):
            raise DomainError(f"confusion matrix must be {n}x{n}, got {m.shape}")
        if (m < 0).any():
            raise DomainError("confusion matrix entries must be >= 0")
        row_sums = m.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > 1e-9:
            raise DomainError(f"confusion matrix rows must sum to 1; sums={row_sums}")
        self.matrix = m
        cdf = np.cumsum(m, axis=1)
        cdf[:, -1] = 1.0  # guard against FP undershoot at the top bucket
        self.row_cdf = cdf
        self._cdf_lists = [list(row) for row in cdf]

    @classmethod
    def identity(cls) -> "ConfusionMatrix":
        return cls(np.eye(len(DETECTABLE_CLASSES)))

    @classmethod
    def default(cls, diagonal: float = DEFAULT_DIAGONAL) -> "ConfusionMatrix":
        """Uniform-error matrix: off-diagonal mass split evenly per row."""
        n = len(DETECTABLE_CLASSES)
        off = (1.0 - diagonal) / (n - 1)
        m = np.full((n, n), off)
        np.fill_diagonal(m, diagonal)
        return cls(m)

    @classmethod
    def from_spec(cls, spec) -> "ConfusionMatrix":
        """Build from a scenario value: 'identity', 'default', or a matrix."""
        if isinstance(spec, str):
            if spec == "identity":
                return cls.identity()
            if spec == "default":
                return cls.default()
            raise DomainError(f"unknown confusion spec {spec!r}")
        return cls(spec)

    def accuracy(self, priors: Optional[Sequence[float]] = None) -> float:
        """Overall accuracy sum_i p_i * M_ii; uniform priors by default."""
        diag = np.diag(self.matrix)
        if priors is None:
            return float(diag.mean())
        p = np.asarray(priors, dtype=float)
        if p.shape != diag.shape or abs(p.sum() - 1.0) > 1e-9:
            raise DomainError("priors must be a length-5 distribution")
        return float(p @ diag)

    def sample(self, true_class: ComponentClass, stream: RngStream) -> ComponentClass:
        """One perceived class for a true class, using one uniform draw."""
        if not true_class.is_detectable:
            raise DomainError(f"{true_class.value} is not a detectable class")
        u = stream.uniform()
        j = bisect.bisect_right(self._cdf_lists[CLASS_INDEX[true_class]], u)
        return DETECTABLE_CLASSES[min(j, len(DETECTABLE_CLASSES) - 1)]

    def sample_batch(self, true_idx: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        """Vectorised sampling over class indices (hot path, kernel-backed)."""
        return classify_components(np.asarray(true_idx, dtype=np.int64),
                                   self.row_cdf, np.asarray(uniforms, dtype=float))


def sample_perceived(true_class: ComponentClass, matrix: ConfusionMatrix,
                     stream: RngStream) -> ComponentClass:
    """Draw the perceived class for ``true_class`` from the error model."""
    return matrix.sample(true_class, stream)


def classify_with_threshold(scores: Sequence[float], threshold: float
                            ) -> Optional[tuple[int, float]]:
    """Argmax class and its score iff the max score clears the threshold.

    Ties resolve to the lowest class index.  Returns None below threshold
    (the line model then re-scans once before giving up to manual handling).
    """
    if len(scores) == 0:
        raise DomainError("empty score vector")
    arr = np.asarray(scores, dtype=float)
    if (arr < 0).any() or (arr > 1).any():
        raise DomainError("scores must lie in [0, 1]")
    idx = int(np.argmax(arr))
    if arr[idx] >= threshold:
        return idx, float(arr[idx])
    return None


def chi2_survival(x: float, dof: int) -> float:
    """Chi-squared survival function P(X >= x) for even dof.

    For dof = 2k the survival function has the closed form
    exp(-x/2) * sum_{i<k} (x/2)^i / i!; enough for the 5-category
    goodness-of-fit checks used here (dof = 4).
    """
    if dof % 2 != 0 or dof < 2:
        raise ValueError("closed form implemented for even dof only")
    if x < 0:
        return 1.0
    k = dof // 2
    y = x / 2.0
    total = 0.0
    term = 1.0
    for i in range(k):
        if i > 0:
            term *= y / i
        total += term
    return math.exp(-y) * total


def chi2_goodness_of_fit(observed: Sequence[float], expected: Sequence[float]) -> tuple[float, float]:
    """Chi-squared statistic and p-value for observed vs expected counts.

    Zero-expectation cells are only legal with zero observations.
    """
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.shape != exp.shape:
        raise ValueError("observed/expected shape mismatch")
    mask = exp > 0
    if ((~mask) & (obs > 0)).any():
        return math.inf, 0.0
    stat = float(((obs[mask] - exp[mask]) ** 2 / exp[mask]).sum())
    dof = int(mask.sum()) - 1
    if dof <= 0:
        return stat, 1.0
    if dof % 2 == 1:
        # interpolate between the bracketing even dofs; conservative enough
        lo = chi2_survival(x=stat, dof=dof - 1) if dof > 1 else 0.0
        hi = chi2_survival(x=stat, dof=dof + 1)
        return stat, (lo + hi) / 2.0
    return stat, chi2_survival(stat, dof)
