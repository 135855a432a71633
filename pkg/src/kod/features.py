"""Spectral factorization of the centered kernel matrix and out-of-sample embedding.

The centered kernel matrix is eigendecomposed, small eigenvalues are dropped,
and the dominant share of the spectrum is retained. Training rows get explicit
coordinates whose Gram matrix reproduces the centered kernel, and new rows are
mapped into the same coordinates through a stored transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InvalidInputError


@dataclass(frozen=True)
class FeatureModel:
    """Retained eigensystem of a centered kernel matrix.

    eigenvalues  retained eigenvalues, descending (q,)
    transform    right multiplier taking centered kernel rows to coordinates (n, q)
    features     training rows in feature coordinates (n, q)
    rank_full    number of eigenvalues above the discard floor
    """

    eigenvalues: np.ndarray
    transform: np.ndarray
    features: np.ndarray
    rank_full: int

    @property
    def q(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def n(self) -> int:
        return int(self.features.shape[0])


def decompose(K_tilde, retention: float = 0.99, eig_floor: float = 1e-12) -> FeatureModel:
    """Eigendecompose a centered kernel matrix, keeping the dominant spectrum.

    Eigenvalues at or below ``eig_floor`` are discarded outright. Of the rest,
    the smallest prefix whose share of the total reaches ``retention`` is kept.
    """
    K = np.asarray(K_tilde, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInputError("centered kernel matrix must be square")
    if not 0.0 < retention <= 1.0:
        raise InvalidInputError("retention must lie in (0, 1]")
    if not eig_floor > 0.0:
        raise InvalidInputError("eig_floor must be positive")
    w, V = np.linalg.eigh(K)
    w = w[::-1]
    V = V[:, ::-1]
    r = int(np.count_nonzero(w > eig_floor))
    if r == 0:
        raise DegenerateDataError("centered kernel matrix has no eigenvalue above the floor")
    cum = np.cumsum(w[:r])
    q = int(np.searchsorted(cum, retention * cum[-1], side="left")) + 1
    q = min(q, r)
    lam = w[:q].copy()
    Vq = V[:, :q].copy()
    # Fix a sign convention (largest-magnitude entry positive) so repeated
    # fits give identical coordinates regardless of solver sign choices.
    flip = np.sign(Vq[np.abs(Vq).argmax(axis=0), np.arange(q)])
    flip[flip == 0] = 1.0
    Vq *= flip[None, :]
    root = np.sqrt(lam)
    return FeatureModel(
        eigenvalues=lam,
        transform=Vq / root[None, :],
        features=Vq * root[None, :],
        rank_full=r,
    )


def embed(K_yx_tilde, model: FeatureModel) -> np.ndarray:
    """Map centered out-of-sample kernel rows into the model's feature coordinates."""
    K = np.asarray(K_yx_tilde, dtype=float)
    if K.ndim != 2 or K.shape[1] != model.n:
        raise InvalidInputError(
            f"expected {model.n} columns to embed, got shape {K.shape}")
    return K @ model.transform
