import math

import numpy as np
import pytest

from phoneline.engine import RngStream
from phoneline.model import CLASS_INDEX, DETECTABLE_CLASSES, ComponentClass, DomainError
from phoneline.perception import (
    ConfusionMatrix,
    chi2_goodness_of_fit,
    chi2_survival,
    classify_with_threshold,
    sample_perceived,
)


class _FixedStream:
    """Duck-typed stream that returns scripted uniforms."""

    def __init__(self, values):
        self.values = list(values)
        self.counter = 0

    def uniform(self):
        self.counter += 1
        return self.values.pop(0)


class TestConfusionMatrix:
    def test_identity_always_returns_true_class(self):
        m = ConfusionMatrix.identity()
        stream = RngStream(1, 1)
        for cls in DETECTABLE_CLASSES:
            for _ in range(20):
                assert sample_perceived(cls, m, stream) is cls

    def test_cdf_inversion_edge_keeps_full_mass_row(self):
        rows = np.zeros((5, 5))
        rows[:, 0] = 1.0  # every row: all mass on class 0
        m = ConfusionMatrix(rows)
        out = m.sample(ComponentClass.NORMAL_CASE, _FixedStream([0.999]))
        assert out is DETECTABLE_CLASSES[0]

    def test_default_matrix_shape_and_accuracy(self):
        m = ConfusionMatrix.default()
        assert np.allclose(np.diag(m.matrix), 0.989)
        off = m.matrix[0, 1]
        assert off == pytest.approx(0.011 / 4)
        assert m.accuracy() == pytest.approx(0.989)
        assert m.accuracy([0.2] * 5) == pytest.approx(0.989)

    def test_accuracy_with_skewed_priors(self):
        rows = np.full((5, 5), 0.05)
        np.fill_diagonal(rows, 0.8)
        m = ConfusionMatrix(rows)
        priors = [1.0, 0.0, 0.0, 0.0, 0.0]
        assert m.accuracy(priors) == pytest.approx(0.8)

    def test_row_sum_validated_at_load(self):
        rows = np.eye(5)
        rows[2, 2] = 0.9
        with pytest.raises(DomainError, match="sum to 1"):
            ConfusionMatrix(rows)

    def test_negative_entry_rejected(self):
        rows = np.eye(5)
        rows[0, 0] = 1.2
        rows[0, 1] = -0.2
        with pytest.raises(DomainError, match=">= 0"):
            ConfusionMatrix(rows)

    def test_wrong_shape_rejected(self):
        with pytest.raises(DomainError, match="5x5"):
            ConfusionMatrix(np.eye(4))

    def test_from_spec_strings(self):
        assert np.array_equal(ConfusionMatrix.from_spec("identity").matrix, np.eye(5))
        assert ConfusionMatrix.from_spec("default").matrix[0, 0] == pytest.approx(0.989)
        with pytest.raises(DomainError):
            ConfusionMatrix.from_spec("sometimes")

    def test_sample_rejects_non_detectable(self):
        m = ConfusionMatrix.identity()
        with pytest.raises(DomainError):
            m.sample(ComponentClass.BATTERY, RngStream(1, 1))


class TestSamplingDistribution:
    def test_empirical_diagonal_within_binomial_bound(self):
        # oracle: binomial confidence interval on the sampled frequency
        n = 100_000
        m = ConfusionMatrix.default()
        for i, cls in enumerate(DETECTABLE_CLASSES):
            u = RngStream(314159, i + 1).uniforms(n)
            out = m.sample_batch(np.full(n, i, dtype=np.int64), u)
            freq = (out == i).mean()
            assert abs(freq - 0.989) < 0.005, cls

    def test_chi2_gof_p_above_threshold(self):
        n = 100_000
        m = ConfusionMatrix.default()
        for i in range(5):
            u = RngStream(271828, i + 1).uniforms(n)
            out = m.sample_batch(np.full(n, i, dtype=np.int64), u)
            counts = np.bincount(out, minlength=5)
            _stat, p = chi2_goodness_of_fit(counts, m.matrix[i] * n)
            assert p > 0.001

    def test_scalar_and_batch_agree(self):
        m = ConfusionMatrix.default()
        u = RngStream(9, 9).uniforms(500)
        batch = m.sample_batch(np.full(500, 2, dtype=np.int64), u)
        scalar = [m.sample(DETECTABLE_CLASSES[2], _FixedStream([x])) for x in u]
        assert [CLASS_INDEX[c] for c in scalar] == list(batch)


class TestThreshold:
    def test_confident_argmax_returned(self):
        scores = [0.95, 0.01, 0.01, 0.01, 0.02]
        assert classify_with_threshold(scores, 0.8) == (0, 0.95)

    def test_below_threshold_returns_none(self):
        scores = [0.79, 0.1, 0.0, 0.0, 0.0]
        assert classify_with_threshold(scores, 0.8) is None

    def test_boundary_passes_at_equality(self):
        assert classify_with_threshold([0.8, 0.0], 0.8) == (0, 0.8)

    def test_tie_resolves_to_lowest_index(self):
        assert classify_with_threshold([0.3, 0.9, 0.9], 0.8)[0] == 1

    def test_empty_scores_error(self):
        with pytest.raises(DomainError):
            classify_with_threshold([], 0.8)

    def test_out_of_range_scores_error(self):
        with pytest.raises(DomainError):
            classify_with_threshold([1.3], 0.8)


class TestChi2:
    def test_survival_against_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        for x in (0.1, 1.0, 4.0, 9.5, 22.0):
            for dof in (2, 4, 8):
                assert chi2_survival(x, dof) == pytest.approx(
                    scipy_stats.chi2.sf(x, dof), rel=1e-12)

    def test_negative_statistic_gives_one(self):
        assert chi2_survival(-1.0, 4) == 1.0

    def test_odd_dof_rejected(self):
        with pytest.raises(ValueError):
            chi2_survival(1.0, 3)

    def test_gof_odd_dof_interpolation_brackets(self):
        # a zero-probability column drops the dof to 3; the p-value must sit
        # between the even-dof brackets
        obs = [40, 30, 20, 10, 0]
        exp = [40.0, 29.0, 21.0, 10.0, 0.0]
        stat, p = chi2_goodness_of_fit(obs, exp)
        assert chi2_survival(stat, 4) >= p >= chi2_survival(stat, 2)

    def test_gof_zero_expected_with_observations_is_failure(self):
        stat, p = chi2_goodness_of_fit([5, 0], [0, 5])
        assert math.isinf(stat) and p == 0.0
