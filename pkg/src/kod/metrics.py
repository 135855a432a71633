"""Ranking and confusion-matrix metrics for labeled outlier benchmarks."""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError


def precision_at_n(scores, labels) -> float:
    """Fraction of true outliers among the top-N scores, N = number of true outliers.

    Ties at the boundary are resolved against the detector, so the result is
    the worst value consistent with the given scores.
    """
    s = np.asarray(scores, dtype=float).reshape(-1)
    y = np.asarray(labels, dtype=bool).reshape(-1)
    if s.size != y.size or s.size == 0:
        raise InvalidInputError("scores and labels must be equal-length non-empty vectors")
    n_out = int(y.sum())
    if n_out == 0:
        raise InvalidInputError("precision at N needs at least one true outlier")
    # Primary key: score descending; among ties, inliers first (pessimistic).
    order = np.lexsort((y.astype(int), -s))
    return float(y[order[:n_out]].sum()) / n_out


def mcc(flags, labels) -> float:
    """Matthews correlation of flags against labels; 0 when a confusion margin is empty."""
    f = np.asarray(flags, dtype=bool).reshape(-1)
    y = np.asarray(labels, dtype=bool).reshape(-1)
    if f.size != y.size:
        raise InvalidInputError("flags and labels must have equal length")
    tp = float(np.sum(f & y))
    tn = float(np.sum(~f & ~y))
    fp = float(np.sum(f & ~y))
    fn = float(np.sum(~f & y))
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0.0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)
