"""Kernel evaluation, bandwidth selection, and kernel-matrix centering.

Supports the bounded RBF kernel (with the median heuristic for the bandwidth)
and the linear kernel. Centering produces the Gram matrix of mean-centered
feature vectors, for training data and for out-of-sample rows.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import DegenerateDataError, InvalidInputError
from .robust import MAD_SCALE


def as_data_matrix(data) -> np.ndarray:
    """Validate and return an n x p float matrix (1-D input becomes a column)."""
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise InvalidInputError("expected a non-empty 2-D data matrix")
    if not np.isfinite(X).all():
        raise InvalidInputError("data contains non-finite values")
    return X


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters; sigma=None requests the median heuristic."""

    family: str = "rbf"
    sigma: float | None = None

    def __post_init__(self):
        if self.family not in ("rbf", "linear"):
            raise InvalidInputError(f"unknown kernel family {self.family!r}")
        if self.family == "rbf" and self.sigma is not None and not self.sigma > 0:
            raise InvalidInputError("rbf kernel needs sigma > 0")

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """Parse 'rbf:auto', 'rbf:<sigma>' or 'linear'."""
        s = str(text).strip().lower()
        if s == "linear":
            return cls("linear", None)
        if s in ("rbf", "rbf:auto"):
            return cls("rbf", None)
        if s.startswith("rbf:"):
            try:
                sigma = float(s.split(":", 1)[1])
            except ValueError as exc:
                raise InvalidInputError(f"cannot parse kernel bandwidth in {text!r}") from exc
            return cls("rbf", sigma)
        raise InvalidInputError(
            f"unknown kernel {text!r}; expected rbf:auto, rbf:<sigma> or linear")


@dataclass
class Standardizer:
    """Per-column robust center/scale applied to data columns.

    Scale is the column MAD; a zero MAD falls back to the column standard
    deviation, and a fully constant column is centered but left unscaled
    (with a warning).
    """

    center: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, data) -> "Standardizer":
        X = as_data_matrix(data)
        center = np.median(X, axis=0)
        scale = MAD_SCALE * np.median(np.abs(X - center), axis=0)
        zero = scale == 0.0
        if zero.any():
            scale = scale.copy()
            scale[zero] = X[:, zero].std(axis=0)
            constant = scale == 0.0
            if constant.any():
                cols = np.flatnonzero(constant).tolist()
                warnings.warn(f"constant columns {cols}: centered but not scaled")
                scale[constant] = 1.0
        return cls(center=center, scale=scale)

    def transform(self, data) -> np.ndarray:
        X = as_data_matrix(data)
        if X.shape[1] != self.center.size:
            raise InvalidInputError(
                f"expected {self.center.size} columns, got {X.shape[1]}")
        return (X - self.center[None, :]) / self.scale[None, :]

    def inverse(self, data) -> np.ndarray:
        X = as_data_matrix(data)
        return X * self.scale[None, :] + self.center[None, :]


def standardize(data):
    """Column-standardize by median and MAD. Returns (transformed, Standardizer)."""
    st = Standardizer.fit(data)
    return st.transform(data), st


def median_heuristic_sigma(data) -> float:
    """Bandwidth from the median of all pairwise squared distances."""
    X = as_data_matrix(data)
    if X.shape[0] < 2:
        raise InvalidInputError("bandwidth selection needs at least two rows")
    sq = pdist(X, metric="sqeuclidean")
    med = float(np.median(sq))
    if med <= 0.0:
        raise DegenerateDataError(
            "median pairwise distance is zero; cannot select an rbf bandwidth")
    return float(np.sqrt(med))


def _require_sigma(spec: KernelSpec) -> float:
    if spec.sigma is None:
        raise InvalidInputError(
            "rbf bandwidth is unresolved; supply sigma or use the median heuristic")
    return float(spec.sigma)


def kernel_matrix(data, spec: KernelSpec) -> np.ndarray:
    """Pairwise kernel values of the rows of ``data``; each entry computed independently."""
    X = as_data_matrix(data)
    if spec.family == "linear":
        return X @ X.T
    sigma = _require_sigma(spec)
    sq = squareform(pdist(X, metric="sqeuclidean"))
    return np.exp(-sq / (2.0 * sigma * sigma))


def cross_kernel_matrix(new_data, data, spec: KernelSpec) -> np.ndarray:
    """Kernel values between every new row and every training row (m x n)."""
    Y = as_data_matrix(new_data)
    X = as_data_matrix(data)
    if Y.shape[1] != X.shape[1]:
        raise InvalidInputError(
            f"column mismatch: new data has {Y.shape[1]} columns, training data {X.shape[1]}")
    if spec.family == "linear":
        return Y @ X.T
    sigma = _require_sigma(spec)
    return np.exp(-cdist(Y, X, metric="sqeuclidean") / (2.0 * sigma * sigma))


def center_kernel(K) -> np.ndarray:
    """Gram matrix of the feature vectors after subtracting their mean.

    Row and column sums of the result are zero up to rounding; the same mean
    vector is used on both sides so the output is exactly symmetric.
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInputError("kernel matrix must be square")
    m = K.mean(axis=0)
    g = float(m.mean())
    # one symmetric correction term keeps the result exactly symmetric
    return K - (m[None, :] + m[:, None] - g)


def center_cross_kernel(K_yx, K) -> np.ndarray:
    """Center out-of-sample kernel rows against the training kernel matrix."""
    K_yx = np.asarray(K_yx, dtype=float)
    K = np.asarray(K, dtype=float)
    if K_yx.ndim != 2 or K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInputError("expected an m x n cross-kernel and an n x n kernel matrix")
    if K_yx.shape[1] != K.shape[0]:
        raise InvalidInputError(
            f"cross-kernel has {K_yx.shape[1]} columns but the training kernel is "
            f"{K.shape[0]} x {K.shape[0]}")
    row_means = K_yx.mean(axis=1)
    col_means = K.mean(axis=0)
    g = float(col_means.mean())
    return K_yx - (col_means[None, :] + row_means[:, None] - g)
