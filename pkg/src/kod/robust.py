"""Univariate and multivariate robust estimators.

Location and scale building blocks used throughout the pipeline: median and
MAD, the Qn scale, a Huber M-location with fixed auxiliary scale, and the
geometric (L1) median. All functions are pure and side-effect free.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist

from .errors import InvalidInputError

# Consistency factors for a normal target distribution.
MAD_SCALE = 1.483
QN_SCALE = 2.2219


def _as_sample(values) -> np.ndarray:
    y = np.asarray(values, dtype=float).reshape(-1)
    if y.size == 0:
        raise InvalidInputError("sample is empty")
    if not np.isfinite(y).all():
        raise InvalidInputError("sample contains non-finite values")
    return y


def median(values) -> float:
    """Sample median; the mean of the two middle order statistics for even n."""
    return float(np.median(_as_sample(values)))


def mad(values) -> float:
    """Median absolute deviation about the median, scaled by 1.483."""
    y = _as_sample(values)
    med = np.median(y)
    return float(MAD_SCALE * np.median(np.abs(y - med)))


def qn_scale(values) -> float:
    """Qn scale estimator.

    2.2219 times the k-th order statistic of the n(n-1)/2 pairwise absolute
    differences, with k = h(h-1)/2 and h = floor(n/2) + 1. All pairs are
    enumerated, which is exact and fast enough for n up to a few thousand.
    """
    y = _as_sample(values)
    n = y.size
    if n < 2:
        raise InvalidInputError("qn_scale needs at least two values")
    diffs = pdist(y.reshape(-1, 1), metric="cityblock")
    h = n // 2 + 1
    k = h * (h - 1) // 2
    diffs.partition(k - 1)
    return float(QN_SCALE * diffs[k - 1])


def huber_location(values, tuning: float = 1.5, tol: float = 1e-10,
                   max_iter: int = 100) -> float:
    """Huber M-estimator of location via iteratively reweighted averaging.

    The auxiliary scale is held fixed at mad(values); observations beyond
    ``tuning`` scale units are downweighted. A zero MAD collapses the
    estimate to the median.
    """
    y = _as_sample(values)
    scale = mad(y)
    mu = float(np.median(y))
    if scale == 0.0:
        return mu
    for _ in range(max_iter):
        u = (y - mu) / scale
        w = np.ones_like(u)
        big = np.abs(u) > tuning
        w[big] = tuning / np.abs(u[big])
        mu_new = float(np.sum(w * y) / np.sum(w))
        if abs(mu_new - mu) <= tol * scale:
            return mu_new
        mu = mu_new
    return mu


def l1_median(points, tol: float = 1e-8, max_iter: int = 500) -> np.ndarray:
    """Geometric median: the point minimizing the summed Euclidean distances.

    Weiszfeld iteration started at the centroid, with the usual correction
    step whenever the iterate coincides with a data point (otherwise the
    plain update divides by zero there).
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInputError("expected a non-empty n x q matrix of points")
    if not np.isfinite(X).all():
        raise InvalidInputError("points contain non-finite values")
    n = X.shape[0]
    if n == 1:
        return X[0].copy()
    eps = 1e-12 * max(1.0, float(np.abs(X).max()))
    y = X.mean(axis=0)
    for _ in range(max_iter):
        d = np.linalg.norm(X - y, axis=1)
        on_point = d <= eps
        if on_point.any():
            off = ~on_point
            if not off.any():
                return y  # all points identical
            w = 1.0 / d[off]
            pull = (X[off] * w[:, None]).sum(axis=0) / w.sum()
            resid = ((X[off] - y) * w[:, None]).sum(axis=0)
            r = float(np.linalg.norm(resid))
            eta = float(on_point.sum())
            if r <= eta:
                return y  # the optimum sits on a data point
            step = min(1.0, eta / r)
            y_new = (1.0 - step) * pull + step * y
        else:
            w = 1.0 / d
            y_new = (X * w[:, None]).sum(axis=0) / w.sum()
        if np.linalg.norm(y_new - y) <= tol * max(1.0, np.linalg.norm(y_new)):
            return y_new
        y = y_new
    return y
