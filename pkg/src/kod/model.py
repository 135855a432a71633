"""Fitting, scoring, flagging, and persistence for the kernel outlyingness detector.

The pipeline: kernel matrix -> centering -> spectral feature coordinates ->
direction families with per-direction robust statistics -> denominator floor ->
per-family outlyingness -> median-normalized aggregation -> log-domain cutoff ->
flags. A fitted model scores new rows through the stored transform and the
training-time statistics.
"""

from __future__ import annotations

import json
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import norm

from .directions import (
    FAMILIES,
    DirectionSet,
    basis_vectors,
    build_direction_set,
    one_point_vectors,
    projection_stats,
    random_vectors,
    two_point_vectors,
)
from .errors import DegenerateDataError, InvalidInputError, KodError, ModelFormatError
from .features import FeatureModel, decompose, embed
from .ioutil import atomic_write_text
from .kernels import (
    KernelSpec,
    Standardizer,
    as_data_matrix,
    center_cross_kernel,
    center_kernel,
    cross_kernel_matrix,
    kernel_matrix,
    median_heuristic_sigma,
    standardize,
)
from .robust import huber_location, qn_scale

# 99th percentile of the standard normal, used by the flagging cutoff.
Z99 = float(norm.ppf(0.99))

MODEL_SCHEMA = "kod-model"
MODEL_VERSION = 1

_FAMILY_ALIASES = {
    "one": "one_point",
    "two": "two_point",
    "one_point": "one_point",
    "two_point": "two_point",
    "basis": "basis",
    "random": "random",
}


def canonical_families(families) -> tuple[str, ...]:
    """Normalize family names ('one' == 'one_point', ...) into canonical order."""
    if isinstance(families, str):
        families = [f for f in families.split(",") if f.strip()]
    resolved = set()
    for fam in families:
        key = str(fam).strip().lower()
        if key not in _FAMILY_ALIASES:
            raise InvalidInputError(
                f"unknown direction family {fam!r}; expected one of {sorted(set(_FAMILY_ALIASES))}")
        resolved.add(_FAMILY_ALIASES[key])
    if not resolved:
        raise InvalidInputError("at least one direction family is required")
    return tuple(f for f in FAMILIES if f in resolved)


@dataclass(frozen=True)
class KodConfig:
    """Configuration surface of a fit.

    kernel         'rbf:auto', 'rbf:<sigma>', 'linear', or a KernelSpec
    retention      share of the eigenvalue total to retain, in (0, 1]
    eig_floor      eigenvalues at or below this are discarded
    families       direction families to aggregate over
    random_count   number of random directions
    two_point_cap  maximum number of pair directions
    seed           root seed driving all per-family randomness
    standardize    column-standardize (median/MAD) before the kernel
    """

    kernel: object = "rbf:auto"
    retention: float = 0.99
    eig_floor: float = 1e-12
    families: tuple[str, ...] = FAMILIES
    random_count: int = 1000
    two_point_cap: int = 5000
    seed: int = 0
    standardize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "families", canonical_families(self.families))
        if not 0.0 < self.retention <= 1.0:
            raise InvalidInputError("retention must lie in (0, 1]")
        if not self.eig_floor > 0.0:
            raise InvalidInputError("eig_floor must be positive")
        if self.random_count < 1:
            raise InvalidInputError("random_count must be at least 1")
        if self.two_point_cap < 1:
            raise InvalidInputError("two_point_cap must be at least 1")

    def kernel_spec(self) -> KernelSpec:
        if isinstance(self.kernel, KernelSpec):
            return self.kernel
        return KernelSpec.parse(str(self.kernel))


@dataclass
class ScoreReport:
    """Per-point outlyingness values plus the run-level quantities behind them."""

    raw: dict[str, np.ndarray]
    normalized: dict[str, np.ndarray]
    ko: np.ndarray
    lo: np.ndarray
    flagged: np.ndarray
    cutoff: float
    q: int
    rank_full: int
    family_sizes: dict[str, int]
    timings: dict[str, float] | None = None

    @property
    def size(self) -> int:
        return int(self.ko.size)


def denominator_floor(random_scales) -> float:
    """One fifth of the median per-direction MAD over the random family."""
    s = np.asarray(random_scales, dtype=float)
    if s.size == 0:
        raise DegenerateDataError("no random directions to derive the denominator floor from")
    c = float(np.median(s)) / 5.0
    if not c > 0.0:
        raise DegenerateDataError(
            "projections have zero spread along most random directions; data are degenerate")
    return c


def type_outlyingness(points, dirs: DirectionSet, floor: float,
                      block: int = 2048) -> np.ndarray:
    """Largest robustly standardized projection deviation over one family.

    Denominators are the stored per-direction scales, floored from below.
    Computed in blocks of points to bound memory on large grids.
    """
    P = np.asarray(points, dtype=float)
    if dirs.size == 0:
        raise InvalidInputError("direction set is empty")
    denom = np.maximum(dirs.scales, floor)
    out = np.empty(P.shape[0])
    for start in range(0, P.shape[0], block):
        chunk = P[start:start + block]
        dev = np.abs(chunk @ dirs.vectors.T - dirs.centers[None, :])
        out[start:start + block] = (dev / denom[None, :]).max(axis=1)
    return out


def combined_outlyingness(per_type: dict[str, np.ndarray],
                          type_medians: dict[str, float]) -> np.ndarray:
    """Max across families of the median-normalized per-family outlyingness."""
    if not type_medians:
        raise DegenerateDataError("no direction family produced usable outlyingness values")
    stacked = np.stack([np.asarray(per_type[f], dtype=float) / type_medians[f]
                        for f in type_medians])
    return stacked.max(axis=0)


def flagging_cutoff(ko) -> float:
    """Outlier threshold: log-transform, Huber location + z_0.99 Qn scale, back-transform."""
    ko = np.asarray(ko, dtype=float).reshape(-1)
    if ko.size < 2:
        raise InvalidInputError("cutoff needs at least two values")
    lo = np.log(0.1 + ko)
    center = huber_location(lo)
    spread = qn_scale(lo)
    if spread == 0.0:
        warnings.warn("combined outlyingness has zero spread; cutoff uses location only")
        return float(np.exp(center) - 0.1)
    return float(np.exp(center + Z99 * spread) - 0.1)


@dataclass
class KodModel:
    """Complete fitted state; immutable in normal use and safe to share."""

    kernel: KernelSpec
    standardizer: Standardizer | None
    train_data: np.ndarray
    feature_model: FeatureModel
    direction_sets: dict[str, DirectionSet]
    denom_floor: float
    type_medians: dict[str, float]
    cutoff: float
    train_ko_median: float
    seed: int
    config: KodConfig
    _train_kernel_cache: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return int(self.train_data.shape[0])

    @property
    def p(self) -> int:
        return int(self.train_data.shape[1])

    @property
    def q(self) -> int:
        return self.feature_model.q

    @property
    def rank_full(self) -> int:
        return self.feature_model.rank_full

    @property
    def family_sizes(self) -> dict[str, int]:
        return {f: ds.size for f, ds in self.direction_sets.items()}

    def train_raw_bounds(self) -> np.ndarray:
        """Column-wise [min, max] of the training data in raw input coordinates."""
        raw = self.train_data
        if self.standardizer is not None:
            raw = self.standardizer.inverse(raw)
        return np.stack([raw.min(axis=0), raw.max(axis=0)])

    def _train_kernel(self) -> np.ndarray:
        if self._train_kernel_cache is None:
            self._train_kernel_cache = kernel_matrix(self.train_data, self.kernel)
        return self._train_kernel_cache

    def score(self, data) -> ScoreReport:
        """Score new rows with the training-time statistics and cutoff."""
        Y = as_data_matrix(data)
        if Y.shape[1] != self.p:
            raise InvalidInputError(
                f"expected {self.p} feature columns, got {Y.shape[1]}")
        if self.standardizer is not None:
            Y = self.standardizer.transform(Y)
        K_yx = cross_kernel_matrix(Y, self.train_data, self.kernel)
        K_yx_t = center_cross_kernel(K_yx, self._train_kernel())
        feats = embed(K_yx_t, self.feature_model)
        return self._score_features(feats)

    def _score_features(self, feats, timings: dict[str, float] | None = None) -> ScoreReport:
        raw = {f: type_outlyingness(feats, ds, self.denom_floor)
               for f, ds in self.direction_sets.items()}
        normalized = {f: raw[f] / self.type_medians[f] for f in self.type_medians}
        ko = combined_outlyingness(raw, self.type_medians)
        return ScoreReport(
            raw=raw,
            normalized=normalized,
            ko=ko,
            lo=np.log(0.1 + ko),
            flagged=ko >= self.cutoff,
            cutoff=self.cutoff,
            q=self.q,
            rank_full=self.rank_full,
            family_sizes=self.family_sizes,
            timings=timings,
        )

    # -- persistence ------------------------------------------------------

    def to_payload(self) -> dict:
        """Self-describing dict for serialization; matrices are row-major with shapes."""
        return {
            "schema": MODEL_SCHEMA,
            "version": MODEL_VERSION,
            "seed": int(self.seed),
            "kernel": {"family": self.kernel.family, "sigma": self.kernel.sigma},
            "standardization": None if self.standardizer is None else {
                "center": self.standardizer.center.tolist(),
                "scale": self.standardizer.scale.tolist(),
            },
            "config": {
                "kernel": str(self.config.kernel) if not isinstance(self.config.kernel, KernelSpec)
                          else f"{self.config.kernel.family}:{self.config.kernel.sigma}",
                "retention": self.config.retention,
                "eig_floor": self.config.eig_floor,
                "families": list(self.config.families),
                "random_count": self.config.random_count,
                "two_point_cap": self.config.two_point_cap,
                "seed": self.config.seed,
                "standardize": self.config.standardize,
            },
            "train_data": _encode_matrix(self.train_data),
            "eigenvalues": self.feature_model.eigenvalues.tolist(),
            "transform": _encode_matrix(self.feature_model.transform),
            "features": _encode_matrix(self.feature_model.features),
            "rank_full": int(self.feature_model.rank_full),
            "direction_sets": {
                fam: {
                    "vectors": _encode_matrix(ds.vectors),
                    "centers": ds.centers.tolist(),
                    "scales": ds.scales.tolist(),
                }
                for fam, ds in self.direction_sets.items()
            },
            "denominator_floor": self.denom_floor,
            "type_medians": dict(self.type_medians),
            "cutoff": self.cutoff,
            "train_ko_median": self.train_ko_median,
        }

    def save(self, path) -> None:
        """Persist the model as versioned JSON; floats keep full round-trip precision."""
        atomic_write_text(path, json.dumps(self.to_payload()))

    @classmethod
    def from_payload(cls, payload: dict) -> "KodModel":
        if not isinstance(payload, dict) or payload.get("schema") != MODEL_SCHEMA:
            raise ModelFormatError("not a kernel outlyingness model file")
        if payload.get("version") != MODEL_VERSION:
            raise ModelFormatError(
                f"unsupported model format version {payload.get('version')!r}; "
                f"this build reads version {MODEL_VERSION}")
        try:
            kern = payload["kernel"]
            spec = KernelSpec(kern["family"], kern["sigma"])
            std = payload["standardization"]
            standardizer = None if std is None else Standardizer(
                center=np.asarray(std["center"], dtype=float),
                scale=np.asarray(std["scale"], dtype=float),
            )
            cfg = payload["config"]
            config = KodConfig(
                kernel=cfg["kernel"],
                retention=cfg["retention"],
                eig_floor=cfg["eig_floor"],
                families=tuple(cfg["families"]),
                random_count=cfg["random_count"],
                two_point_cap=cfg["two_point_cap"],
                seed=cfg["seed"],
                standardize=cfg["standardize"],
            )
            feature_model = FeatureModel(
                eigenvalues=np.asarray(payload["eigenvalues"], dtype=float),
                transform=_decode_matrix(payload["transform"]),
                features=_decode_matrix(payload["features"]),
                rank_full=int(payload["rank_full"]),
            )
            sets = {}
            for fam, enc in payload["direction_sets"].items():
                sets[fam] = DirectionSet(
                    family=fam,
                    vectors=_decode_matrix(enc["vectors"]),
                    centers=np.asarray(enc["centers"], dtype=float),
                    scales=np.asarray(enc["scales"], dtype=float),
                )
            return cls(
                kernel=spec,
                standardizer=standardizer,
                train_data=_decode_matrix(payload["train_data"]),
                feature_model=feature_model,
                direction_sets=sets,
                denom_floor=float(payload["denominator_floor"]),
                type_medians={k: float(v) for k, v in payload["type_medians"].items()},
                cutoff=float(payload["cutoff"]),
                train_ko_median=float(payload["train_ko_median"]),
                seed=int(payload["seed"]),
                config=config,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"model file is invalid or truncated: {exc}") from exc

    @classmethod
    def load(cls, path) -> "KodModel":
        path = Path(path)
        if not path.exists():
            raise ModelFormatError(f"{path}: file not found")
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ModelFormatError(f"{path}: model file is invalid or truncated: {exc}") from exc
        return cls.from_payload(payload)


def _encode_matrix(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def _decode_matrix(obj) -> np.ndarray:
    shape = tuple(int(s) for s in obj["shape"])
    data = np.asarray(obj["data"], dtype=float)
    if data.size != int(np.prod(shape)):
        raise ModelFormatError(
            f"matrix payload has {data.size} values but declares shape {shape}")
    return data.reshape(shape)


@contextmanager
def _stage(name: str):
    """Re-raise pipeline errors with the failing stage in front."""
    try:
        yield
    except KodError as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def _generate_family(fam: str, feature_model: FeatureModel, cfg: KodConfig,
                     pair_rng, sphere_rng) -> np.ndarray:
    if fam == "one_point":
        return one_point_vectors(feature_model.features)
    if fam == "two_point":
        return two_point_vectors(feature_model.features, cfg.two_point_cap, pair_rng)
    if fam == "basis":
        return basis_vectors(feature_model.q)
    return random_vectors(feature_model.q, cfg.random_count, sphere_rng)


def fit(data, config: KodConfig | None = None) -> tuple[KodModel, ScoreReport]:
    """Fit the detector on ``data`` and score the training rows.

    Returns the persisted-state model and the training-set report. Degenerate
    data raise with a message naming the failing stage.
    """
    cfg = config if config is not None else KodConfig()
    X = as_data_matrix(data)
    if X.shape[0] < 3:
        raise InvalidInputError("fitting needs at least three rows")
    timings: dict[str, float] = {}
    clock = time.perf_counter

    t = clock()
    standardizer = None
    Xw = X
    if cfg.standardize:
        Xw, standardizer = standardize(X)
    timings["standardize"] = clock() - t

    t = clock()
    spec = cfg.kernel_spec()
    if spec.family == "rbf" and spec.sigma is None:
        with _stage("bandwidth selection"):
            spec = KernelSpec("rbf", median_heuristic_sigma(Xw))
    timings["bandwidth"] = clock() - t

    t = clock()
    with _stage("kernel matrix"):
        K = kernel_matrix(Xw, spec)
        K_tilde = center_kernel(K)
    timings["kernel"] = clock() - t

    t = clock()
    with _stage("spectral decomposition"):
        fm = decompose(K_tilde, cfg.retention, cfg.eig_floor)
    timings["decompose"] = clock() - t

    t = clock()
    pair_seed, sphere_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    pair_rng = np.random.default_rng(pair_seed)
    sphere_rng = np.random.default_rng(sphere_seed)
    sets: dict[str, DirectionSet] = {}
    with _stage("direction generation"):
        for fam in cfg.families:
            vectors = _generate_family(fam, fm, cfg, pair_rng, sphere_rng)
            if vectors.shape[0] == 0:
                warnings.warn(f"direction family {fam!r} is empty and will be skipped")
                continue
            sets[fam] = build_direction_set(fam, vectors, fm.features)
        if not sets:
            raise DegenerateDataError("all requested direction families came out empty")

        if "random" in sets:
            random_raw_scales = sets["random"].scales
        else:
            # The floor is always derived from random directions; draw them here
            # solely for that purpose when the family is not part of the run.
            rv = random_vectors(fm.q, cfg.random_count, sphere_rng)
            random_raw_scales = projection_stats(rv, fm.features)[1]
        floor = denominator_floor(random_raw_scales)
        sets = {f: ds.floored(floor) for f, ds in sets.items()}
    timings["directions"] = clock() - t

    t = clock()
    with _stage("outlyingness"):
        raw = {f: type_outlyingness(fm.features, ds, floor) for f, ds in sets.items()}
        medians: dict[str, float] = {}
        for f, vals in raw.items():
            m = float(np.median(vals))
            if m > 0.0:
                medians[f] = m
            else:
                warnings.warn(f"direction family {f!r} has zero median outlyingness; "
                              "excluded from aggregation")
        ko = combined_outlyingness(raw, medians)
    timings["outlyingness"] = clock() - t

    t = clock()
    with _stage("cutoff"):
        cutoff = flagging_cutoff(ko)
    lo = np.log(0.1 + ko)
    flagged = ko >= cutoff
    timings["cutoff"] = clock() - t

    model = KodModel(
        kernel=spec,
        standardizer=standardizer,
        train_data=np.array(Xw, dtype=float, copy=True),
        feature_model=fm,
        direction_sets=sets,
        denom_floor=floor,
        type_medians=medians,
        cutoff=cutoff,
        train_ko_median=float(np.median(ko)),
        seed=cfg.seed,
        config=cfg,
        _train_kernel_cache=K,
    )
    report = ScoreReport(
        raw=raw,
        normalized={f: raw[f] / medians[f] for f in medians},
        ko=ko,
        lo=lo,
        flagged=flagged,
        cutoff=cutoff,
        q=fm.q,
        rank_full=fm.rank_full,
        family_sizes=model.family_sizes,
        timings=timings,
    )
    return model, report
