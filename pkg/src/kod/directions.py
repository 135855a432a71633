"""The four families of unit projection directions in feature coordinates.

one_point   through each feature point and the geometric median of all of them
two_point   through sampled pairs of feature points (capped)
basis       the coordinate axes of the feature system
random      uniform draws from the unit hypersphere
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError
from .robust import MAD_SCALE, l1_median

FAMILIES = ("one_point", "two_point", "basis", "random")

_NORM_EPS = 1e-12


@dataclass
class DirectionSet:
    """Unit directions of one family plus per-direction projection statistics.

    ``centers`` and ``scales`` are the per-direction median and MAD of the
    training projections; scales may later be floored by the shared
    denominator bound.
    """

    family: str
    vectors: np.ndarray  # (d, q), unit rows
    centers: np.ndarray  # (d,)
    scales: np.ndarray   # (d,)

    @property
    def size(self) -> int:
        return int(self.vectors.shape[0])

    def floored(self, floor: float) -> "DirectionSet":
        return replace(self, scales=np.maximum(self.scales, floor))


def projection_stats(vectors, features):
    """Median and MAD of the feature projections along each direction row."""
    proj = np.asarray(features, dtype=float) @ np.asarray(vectors, dtype=float).T
    centers = np.median(proj, axis=0)
    scales = MAD_SCALE * np.median(np.abs(proj - centers[None, :]), axis=0)
    return centers, scales


def build_direction_set(family: str, vectors, features) -> DirectionSet:
    vectors = np.asarray(vectors, dtype=float)
    centers, scales = projection_stats(vectors, features)
    return DirectionSet(family=family, vectors=vectors, centers=centers, scales=scales)


def _normalize_rows(vecs: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vecs, axis=1)
    keep = norms > _NORM_EPS
    return vecs[keep] / norms[keep, None]


def one_point_vectors(features) -> np.ndarray:
    """Directions from the geometric median through every feature point.

    Points that coincide with the median are skipped; the result may be empty
    for fully degenerate inputs.
    """
    F = np.asarray(features, dtype=float)
    if F.ndim != 2 or F.shape[0] < 2:
        raise InvalidInputError("need at least two feature points")
    center = l1_median(F)
    return _normalize_rows(F - center[None, :])


def two_point_vectors(features, cap: int = 5000, rng=None) -> np.ndarray:
    """Directions through pairs of feature points, at most ``cap`` of them.

    All unordered pairs are used when there are no more than ``cap``; otherwise
    pairs are sampled uniformly without replacement. Pairs of duplicated points
    yield no direction and are dropped (resampled in the sampling regime, with
    a bounded number of retries).
    """
    F = np.asarray(features, dtype=float)
    if F.ndim != 2 or F.shape[0] < 2:
        raise InvalidInputError("need at least two feature points")
    if cap < 1:
        raise InvalidInputError("two_point cap must be at least 1")
    n = F.shape[0]
    total = n * (n - 1) // 2
    if total <= cap:
        i, j = np.triu_indices(n, k=1)
        return _normalize_rows(F[i] - F[j])

    rng = rng if rng is not None else np.random.default_rng()
    selected = np.empty(0, dtype=np.int64)
    dirs = np.empty((0, F.shape[1]))
    for _ in range(64):
        need = cap - dirs.shape[0]
        if need <= 0 or selected.size >= total:
            break
        m = 2 * need + 32
        a = rng.integers(0, n, size=m)
        b = rng.integers(0, n, size=m)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        mask = lo != hi
        codes = lo[mask].astype(np.int64) * n + hi[mask]
        codes, first_pos = np.unique(codes, return_index=True)
        codes = codes[np.argsort(first_pos)]  # keep draw order within the batch
        fresh = codes[~np.isin(codes, selected)][:need + 16]
        if fresh.size == 0:
            continue
        selected = np.concatenate([selected, fresh])
        new_dirs = _normalize_rows(F[fresh // n] - F[fresh % n])
        if new_dirs.shape[0]:
            dirs = np.vstack([dirs, new_dirs]) if dirs.size else new_dirs
    return dirs[:cap]


def basis_vectors(q: int) -> np.ndarray:
    """The q coordinate axes of the feature system."""
    if q < 1:
        raise InvalidInputError("dimension must be at least 1")
    return np.eye(int(q))


def random_vectors(q: int, count: int = 1000, rng=None) -> np.ndarray:
    """Uniform unit directions, generated as normalized standard-normal draws."""
    if q < 1:
        raise InvalidInputError("dimension must be at least 1")
    if count < 1:
        raise InvalidInputError("count must be at least 1")
    rng = rng if rng is not None else np.random.default_rng()
    return _normalize_rows(rng.standard_normal((int(count), int(q))))
