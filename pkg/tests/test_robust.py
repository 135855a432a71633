"""Tests for the robust location/scale estimators and the geometric median."""

import itertools

import numpy as np
import pytest

from kod import huber_location, l1_median, mad, median, qn_scale
from kod.errors import InvalidInputError


def qn_oracle(values):
    """Independent all-pairs enumeration of the Qn scale."""
    y = list(map(float, values))
    n = len(y)
    diffs = sorted(abs(a - b) for a, b in itertools.combinations(y, 2))
    h = n // 2 + 1
    k = h * (h - 1) // 2
    return 2.2219 * diffs[k - 1]


def l1_objective(point, X):
    return float(np.linalg.norm(X - np.asarray(point)[None, :], axis=1).sum())


def l1_grid_oracle(X):
    """Iteratively refined grid search for the geometric median."""
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    center = (lo + hi) / 2.0
    span = float((hi - lo).max()) or 1.0
    for _ in range(4):
        gx = np.linspace(center[0] - span / 2, center[0] + span / 2, 101)
        gy = np.linspace(center[1] - span / 2, center[1] + span / 2, 101)
        mx, my = np.meshgrid(gx, gy)
        pts = np.column_stack([mx.ravel(), my.ravel()])
        obj = np.linalg.norm(X[None, :, :] - pts[:, None, :], axis=2).sum(axis=1)
        center = pts[int(np.argmin(obj))]
        span /= 40.0
    return center


class TestMedian:
    def test_odd_length(self):
        assert median([3, 1, 2]) == 2.0

    def test_even_length_mean_of_middles(self):
        assert median([1, 2, 3, 4]) == 2.5

    def test_singleton(self):
        assert median([5]) == 5.0

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            median([])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            median([1.0, np.nan])


class TestMad:
    def test_constant_sample(self):
        assert mad([1, 1, 1]) == 0.0

    def test_hand_computed(self):
        # deviations {2,1,0,1,2} about the median 3, median deviation 1
        assert mad([1, 2, 3, 4, 5]) == pytest.approx(1.483, abs=1e-12)

    def test_majority_zero_deviation(self):
        assert mad([0, 0, 0, 100]) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            mad([])


class TestQn:
    def test_constant_sample(self):
        assert qn_scale([7.0, 7.0, 7.0, 7.0]) == 0.0

    def test_matches_all_pairs_oracle(self):
        rng = np.random.default_rng(42)
        for n in list(range(2, 51)):
            y = rng.normal(0.0, 3.0, n)
            assert qn_scale(y) == pytest.approx(qn_oracle(y), rel=1e-12)

    def test_normal_consistency(self):
        y = np.random.default_rng(2024).standard_normal(10_000)
        assert qn_scale(y) == pytest.approx(1.0, abs=0.05)

    def test_needs_two_values(self):
        with pytest.raises(InvalidInputError):
            qn_scale([1.0])

    def test_translation_invariant_scale_equivariant(self):
        rng = np.random.default_rng(3)
        y = rng.normal(2.0, 1.5, 37)
        base = qn_scale(y)
        assert qn_scale(y + 11.0) == pytest.approx(base, rel=1e-12)
        assert qn_scale(3.5 * y) == pytest.approx(3.5 * base, rel=1e-12)


class TestHuberLocation:
    def test_constant_sample_returns_it(self):
        assert huber_location([4.2] * 6) == 4.2

    def test_symmetric_sample(self):
        assert huber_location([-2, -1, 0, 1, 2]) == 0.0

    def test_resists_gross_outlier(self):
        y = [0.0, 0.0, 0.0, 0.0, 1000.0]
        est = huber_location(y)
        assert 0.0 <= est <= median(y) + 1.5 * mad(y)
        assert est < 200.0  # far below the mean

    def test_pulls_toward_bulk_with_mild_skew(self):
        rng = np.random.default_rng(8)
        y = np.concatenate([rng.normal(0.0, 1.0, 200), [50.0, 60.0]])
        assert abs(huber_location(y)) < 0.5


class TestEstimatorEquivariance:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_location_estimators(self, seed):
        rng = np.random.default_rng(seed)
        y = rng.normal(1.0, 2.0, 41)
        a, b = 2.5, -7.0
        assert median(a * y + b) == pytest.approx(a * median(y) + b, rel=1e-9, abs=1e-9)
        assert huber_location(a * y + b) == pytest.approx(
            a * huber_location(y) + b, rel=1e-8, abs=1e-8)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_mad_scale_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        y = rng.normal(0.0, 1.0, 41)
        a, b = -3.0, 4.0
        assert mad(a * y + b) == pytest.approx(abs(a) * mad(y), rel=1e-12)


class TestL1Median:
    def test_single_point(self):
        assert np.array_equal(l1_median(np.array([[3.0, 4.0]])), [3.0, 4.0])

    def test_symmetric_cross(self):
        X = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        assert np.allclose(l1_median(X), [0.0, 0.0], atol=1e-12)

    def test_matches_grid_oracle(self):
        rng = np.random.default_rng(17)
        X = rng.uniform(0.0, 1.0, (7, 2))
        ours = l1_median(X)
        oracle = l1_grid_oracle(X)
        assert np.linalg.norm(ours - oracle) <= 1e-4

    def test_orthogonally_equivariant(self):
        rng = np.random.default_rng(23)
        X = rng.normal(0.0, 1.0, (25, 3))
        R = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        assert np.allclose(l1_median(X @ R), l1_median(X) @ R, atol=1e-6)

    def test_beats_every_data_point(self):
        rng = np.random.default_rng(31)
        X = rng.normal(0.0, 2.0, (15, 4))
        best = l1_objective(l1_median(X), X)
        for row in X:
            assert best <= l1_objective(row, X) + 1e-9

    def test_returns_coincident_optimum_exactly(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        assert np.array_equal(l1_median(X), [0.0, 0.0])
