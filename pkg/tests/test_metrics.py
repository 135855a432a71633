"""Tests for the evaluation metrics."""

import itertools

import numpy as np
import pytest

from kod import mcc, precision_at_n
from kod.errors import InvalidInputError


def precision_at_n_oracle(scores, labels):
    """Worst top-N choice consistent with the scores, by exhaustive enumeration."""
    scores = list(map(float, scores))
    labels = list(map(bool, labels))
    n_out = sum(labels)
    m = len(scores)
    order_value = sorted(scores, reverse=True)
    threshold = order_value[n_out - 1]
    fixed = [i for i in range(m) if scores[i] > threshold]
    tied = [i for i in range(m) if scores[i] == threshold]
    slots = n_out - len(fixed)
    best = None
    for pick in itertools.combinations(tied, slots):
        hits = sum(labels[i] for i in fixed) + sum(labels[i] for i in pick)
        best = hits if best is None else min(best, hits)
    return best / n_out


class TestPrecisionAtN:
    def test_perfect_ranking(self):
        scores = [9.0, 8.0, 1.0, 0.5, 0.2]
        labels = [True, True, False, False, False]
        assert precision_at_n(scores, labels) == 1.0

    def test_inverted_ranking(self):
        scores = [0.1, 0.2, 5.0, 6.0]
        labels = [True, True, False, False]
        assert precision_at_n(scores, labels) == 0.0

    def test_hand_computed_half(self):
        assert precision_at_n([5, 4, 3, 2], [True, False, True, False]) == 0.5

    def test_no_outliers_rejected(self):
        with pytest.raises(InvalidInputError):
            precision_at_n([1.0, 2.0], [False, False])

    def test_ties_resolved_pessimistically(self):
        # two tied scores at the boundary; the outlier loses the tie
        scores = [3.0, 1.0, 1.0]
        labels = [True, True, False]
        assert precision_at_n(scores, labels) == 0.5

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(0)
        scores = rng.normal(0.0, 1.0, 40)
        labels = rng.random(40) < 0.3
        if not labels.any():
            labels[0] = True
        base = precision_at_n(scores, labels)
        assert precision_at_n(np.exp(scores), labels) == base
        assert precision_at_n(3.0 * scores + 7.0, labels) == base

    def test_matches_enumeration_oracle_small_cases(self):
        rng = np.random.default_rng(1)
        for m in range(2, 9):
            for bits in range(1, 2 ** m):
                labels = [(bits >> k) & 1 == 1 for k in range(m)]
                # few distinct values force boundary ties
                scores = rng.integers(0, 3, m).astype(float)
                assert precision_at_n(scores, labels) == pytest.approx(
                    precision_at_n_oracle(scores, labels))


class TestMcc:
    def test_perfect_agreement(self):
        labels = np.array([True, False, True, False, True])
        assert mcc(labels, labels) == pytest.approx(1.0)

    def test_hand_computed_confusion(self):
        flags = np.concatenate([np.ones(60, bool), np.zeros(40, bool)])
        labels = np.concatenate([np.ones(50, bool), np.zeros(50, bool)])
        # TP=50, FP=10, TN=40, FN=0
        assert mcc(flags, labels) == pytest.approx(2000.0 / np.sqrt(6_000_000.0), abs=1e-6)

    def test_all_negative_flags_degenerate_zero(self):
        flags = np.zeros(10, bool)
        labels = np.array([True] * 3 + [False] * 7)
        assert mcc(flags, labels) == 0.0

    def test_class_swap_symmetry(self):
        rng = np.random.default_rng(2)
        flags = rng.random(60) < 0.4
        labels = rng.random(60) < 0.3
        assert mcc(~flags, ~labels) == pytest.approx(mcc(flags, labels), abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            mcc([True], [True, False])

    def test_total_disagreement(self):
        labels = np.array([True, False, True, False])
        assert mcc(~labels, labels) == pytest.approx(-1.0)
