"""Seeded bivariate benchmark generators and CSV input/output.

Four synthetic datasets exercise qualitatively different outlier structure:

salt_pepper_ring  a noisy ring with outliers sprinkled uniformly over the
                  enclosing disk (inside the ring and in the background)
circle_cluster    the ring with a tight outlier cluster at its center
inside_outside    the ring, a central cluster, and a second larger ring,
                  outliers split evenly between the inside and the outside
moons             two interleaving half circles, the sparse lower arc outlying

Geometry defaults are module constants and can be overridden per call. The
sprinkled salt-pepper noise avoids a band of three noise standard deviations
around the ring itself, so the outlier labels stay geometrically meaningful.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import CsvParseError, InvalidInputError
from .ioutil import atomic_write_text

DATASETS = ("salt_pepper_ring", "circle_cluster", "inside_outside", "moons")

RING_RADIUS = 1.0
RING_NOISE = 0.05
CLUSTER_SPREAD = 0.1
OUTER_RADIUS = 1.5
BACKGROUND_RADIUS = 2.0
MOON_NOISE = 0.07


def _ring(rng, count, radius, noise):
    ang = rng.uniform(0.0, 2.0 * np.pi, count)
    rad = radius + rng.normal(0.0, noise, count)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


def _rejection(count, draw, accept, max_rounds=64):
    """Draw batches until ``count`` rows satisfying ``accept`` are collected."""
    rows = []
    have = 0
    for _ in range(max_rounds):
        if have >= count:
            break
        batch = draw(max(count - have, 8))
        keep = batch[accept(batch)]
        if keep.shape[0]:
            rows.append(keep)
            have += keep.shape[0]
    out = np.vstack(rows)
    return out[:count]


def _counts(n: int, contamination: float) -> tuple[int, int]:
    n_out = int(round(n * contamination))
    return n - n_out, n_out


def _salt_pepper_ring(rng, n, contamination, geo):
    n_reg, n_out = _counts(n, contamination)
    r1 = geo["ring_radius"]
    gap = 3.0 * geo["ring_noise"]
    regular = _ring(rng, n_reg, r1, geo["ring_noise"])

    def draw_noise(k):
        ang = rng.uniform(0.0, 2.0 * np.pi, k)
        rad = geo["background_radius"] * np.sqrt(rng.uniform(0.0, 1.0, k))
        return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])

    noise = _rejection(
        n_out, draw_noise,
        lambda pts: np.abs(np.linalg.norm(pts, axis=1) - r1) > gap,
    )
    return np.vstack([regular, noise])


def _circle_cluster(rng, n, contamination, geo):
    n_reg, n_out = _counts(n, contamination)
    regular = _ring(rng, n_reg, geo["ring_radius"], geo["ring_noise"])
    cluster = rng.normal(0.0, geo["cluster_spread"], (n_out, 2))
    return np.vstack([regular, cluster])


def _inside_outside(rng, n, contamination, geo):
    n_reg, n_out = _counts(n, contamination)
    n_in = n_out // 2
    n_far = n_out - n_in
    r1 = geo["ring_radius"]
    gap = 3.0 * geo["ring_noise"]
    regular = _ring(rng, n_reg, r1, geo["ring_noise"])
    # Resampling keeps the inner cluster strictly inside the ring band and the
    # outer ring strictly outside it, whatever the seed.
    inner = _rejection(
        n_in,
        lambda k: rng.normal(0.0, geo["cluster_spread"], (k, 2)),
        lambda pts: np.linalg.norm(pts, axis=1) < r1 - gap,
    )
    outer = _rejection(
        n_far,
        lambda k: _ring(rng, k, geo["outer_radius"], geo["ring_noise"]),
        lambda pts: np.linalg.norm(pts, axis=1) > r1 + gap,
    )
    return np.vstack([regular, inner, outer])


def _moons(rng, n, contamination, geo):
    n_reg, n_out = _counts(n, contamination)
    t_up = rng.uniform(0.0, np.pi, n_reg)
    upper = np.column_stack([np.cos(t_up), np.sin(t_up)])
    t_lo = rng.uniform(0.0, np.pi, n_out)
    lower = np.column_stack([1.0 - np.cos(t_lo), 0.5 - np.sin(t_lo)])
    pts = np.vstack([upper, lower])
    return pts + rng.normal(0.0, geo["moon_noise"], pts.shape)


_BUILDERS = {
    "salt_pepper_ring": _salt_pepper_ring,
    "circle_cluster": _circle_cluster,
    "inside_outside": _inside_outside,
    "moons": _moons,
}


def make_dataset(name: str, n: int, contamination: float, seed: int,
                 **geometry) -> tuple[np.ndarray, np.ndarray]:
    """Generate one benchmark dataset.

    Returns (points, labels) with regular rows first and exactly
    round(n * contamination) outlier rows (labeled True) after them.
    Identical arguments give bit-identical output.
    """
    if name not in _BUILDERS:
        raise InvalidInputError(f"unknown dataset {name!r}; expected one of {DATASETS}")
    if n < 20:
        raise InvalidInputError("dataset size must be at least 20")
    if not 0.0 < contamination < 0.5:
        raise InvalidInputError("contamination must lie in (0, 0.5)")
    geo = {
        "ring_radius": RING_RADIUS,
        "ring_noise": RING_NOISE,
        "cluster_spread": CLUSTER_SPREAD,
        "outer_radius": OUTER_RADIUS,
        "background_radius": BACKGROUND_RADIUS,
        "moon_noise": MOON_NOISE,
    }
    unknown = set(geometry) - set(geo)
    if unknown:
        raise InvalidInputError(f"unknown geometry parameters {sorted(unknown)}")
    geo.update(geometry)
    rng = np.random.default_rng(seed)
    X = _BUILDERS[name](rng, n, contamination, geo)
    n_reg, n_out = _counts(n, contamination)
    labels = np.zeros(n, dtype=bool)
    labels[n_reg:] = True
    return X, labels


# -- CSV input/output -------------------------------------------------------

_TRUE_CELLS = {"1", "true", "t"}
_FALSE_CELLS = {"0", "false", "f"}


def _parse_label(cell: str, where: str) -> bool:
    text = cell.strip().lower()
    if text in _TRUE_CELLS:
        return True
    if text in _FALSE_CELLS:
        return False
    try:
        value = float(text)
    except ValueError:
        raise CsvParseError(f"{where}: cannot parse {cell!r} as a 0/1 label") from None
    if value == 1.0:
        return True
    if value == 0.0:
        return False
    raise CsvParseError(f"{where}: cannot parse {cell!r} as a 0/1 label")


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, header="auto", label_column=None):
    """Read a rectangular numeric CSV file.

    header        True, False, or "auto" (header iff any first-row cell is
                  non-numeric)
    label_column  column name (requires a header) or 0-based index; its
                  0/1/true/false values are split off and returned as booleans

    Returns (matrix, labels-or-None). Parse failures report the file row and
    column of the offending cell.
    """
    path = Path(path)
    if not path.exists():
        raise CsvParseError(f"{path}: file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        raw_rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                    if any(c.strip() for c in row)]
    if not raw_rows:
        raise CsvParseError(f"{path}: file contains no data")

    first = raw_rows[0][1]
    if header == "auto":
        has_header = not all(_is_number(c) for c in first)
    else:
        has_header = bool(header)
    names = [c.strip() for c in first] if has_header else None
    data_rows = raw_rows[1:] if has_header else raw_rows
    if not data_rows:
        raise CsvParseError(f"{path}: no data rows after the header")
    width = len(names) if has_header else len(data_rows[0][1])

    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
            if names is None:
                raise CsvParseError(
                    f"{path}: label column {label_column!r} requires a header row")
            if label_column not in names:
                raise CsvParseError(f"{path}: no column named {label_column!r}")
            label_idx = names.index(label_column)
        else:
            label_idx = int(label_column)
            if not 0 <= label_idx < width:
                raise CsvParseError(
                    f"{path}: label column index {label_idx} out of range for {width} columns")
        if width < 2:
            raise CsvParseError(f"{path}: no feature columns besides the label column")

    values = np.empty((len(data_rows), width - (1 if label_idx is not None else 0)))
    labels = np.empty(len(data_rows), dtype=bool) if label_idx is not None else None
    for out_i, (rownum, row) in enumerate(data_rows):
        if len(row) != width:
            raise CsvParseError(
                f"{path}: row {rownum} has {len(row)} fields, expected {width}")
        out_j = 0
        for colnum, cell in enumerate(row):
            where = f"{path}: row {rownum}, column {colnum + 1}"
            if colnum == label_idx:
                labels[out_i] = _parse_label(cell, where)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise CsvParseError(f"{where}: cannot parse {cell!r} as a number") from None
            if not np.isfinite(value):
                raise CsvParseError(f"{where}: non-finite value {cell!r}")
            values[out_i, out_j] = value
            out_j += 1
    return values, labels


def write_csv(path, matrix, columns=None, labels=None, label_name="label") -> None:
    """Write a numeric matrix as CSV; float cells keep full round-trip precision.

    An optional boolean label vector is appended as a trailing 0/1 column.
    The file is written atomically.
    """
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2:
        raise InvalidInputError("expected a 2-D matrix")
    if labels is not None:
        labels = np.asarray(labels, dtype=bool)
        if labels.size != X.shape[0]:
            raise InvalidInputError("labels must have one entry per row")
    lines = []
    if columns is not None:
        names = list(columns) + ([label_name] if labels is not None else [])
        if len(names) - (1 if labels is not None else 0) != X.shape[1]:
            raise InvalidInputError("column names do not match the matrix width")
        lines.append(",".join(names))
    for i in range(X.shape[0]):
        cells = [repr(float(v)) for v in X[i]]
        if labels is not None:
            cells.append(str(int(labels[i])))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")
