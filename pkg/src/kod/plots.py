"""Figure rendering for reports, heatmap grids, and benchmark tables.

Every CLI command that writes a delimited report can also render a matching
matplotlib figure next to it. Rendering uses the Agg backend and writes files
atomically.
"""

from __future__ import annotations

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .ioutil import atomic_savefig  # noqa: E402
from .model import ScoreReport, flagging_cutoff  # noqa: E402

_REGULAR_COLOR = "tab:green"
_OUTLIER_COLOR = "black"


def _heat_cmap():
    cmap = plt.get_cmap("Reds").copy()
    cmap.set_under("white")
    return cmap


def score_panels(report: ScoreReport, path, title: str | None = None) -> None:
    """One panel per direction family (median-normalized values with a derived
    per-family threshold) plus the combined values with the model cutoff."""
    fams = list(report.normalized)
    fig, axes = plt.subplots(1, len(fams) + 1, figsize=(3.0 * (len(fams) + 1), 3.0),
                             sharex=True)
    axes = np.atleast_1d(axes)
    idx = np.arange(report.size)
    for ax, fam in zip(axes, fams):
        vals = report.normalized[fam]
        ax.scatter(idx, vals, s=5, c=_REGULAR_COLOR, alpha=0.7)
        if vals.size >= 2:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ax.axhline(flagging_cutoff(vals), color="red", ls="--", lw=1.0)
        ax.set_title(fam.replace("_", " "))
        ax.set_xlabel("case")
    ax = axes[-1]
    colors = np.where(report.flagged, _OUTLIER_COLOR, _REGULAR_COLOR)
    ax.scatter(idx, report.ko, s=5, c=colors, alpha=0.8)
    ax.axhline(report.cutoff, color="red", lw=1.2)
    ax.set_title("combined")
    ax.set_xlabel("case")
    axes[0].set_ylabel("normalized outlyingness")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    atomic_savefig(fig, path)
    plt.close(fig)


def grid_heatmaps(xs, ys, layers: dict[str, np.ndarray],
                  thresholds: dict[str, float], path, title: str | None = None) -> None:
    """Heatmap per layer; cells below the layer threshold are left white."""
    names = list(layers)
    fig, axes = plt.subplots(1, len(names), figsize=(3.2 * len(names), 3.0),
                             sharey=True)
    axes = np.atleast_1d(axes)
    cmap = _heat_cmap()
    for ax, name in zip(axes, names):
        vals = layers[name]
        thr = thresholds[name]
        top = float(vals.max())
        mesh = ax.pcolormesh(xs, ys, vals, cmap=cmap, vmin=thr,
                             vmax=max(top, thr * (1.0 + 1e-9)), shading="auto")
        fig.colorbar(mesh, ax=ax, shrink=0.85)
        ax.set_title(name.replace("_", " "))
        ax.set_aspect("equal")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    atomic_savefig(fig, path)
    plt.close(fig)


def dataset_scatter(points, labels, path, title: str | None = None) -> None:
    """Regular points in green, outliers in black."""
    X = np.asarray(points, dtype=float)
    y = np.asarray(labels, dtype=bool)
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    ax.scatter(X[~y, 0], X[~y, 1], s=8, c=_REGULAR_COLOR, label="regular")
    ax.scatter(X[y, 0], X[y, 1], s=8, c=_OUTLIER_COLOR, label="outlier")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    atomic_savefig(fig, path)
    plt.close(fig)


def metric_curves(rows: list[dict], path, title: str | None = None) -> None:
    """Mean precision-at-N and MCC against the contamination level."""
    conts = [row["contamination"] for row in rows]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(conts, [row["p_at_n"] for row in rows], "o-", label="P@N")
    ax.plot(conts, [row["mcc"] for row in rows], "s--", label="MCC")
    ax.set_xlabel("contamination")
    ax.set_ylabel("mean metric")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    atomic_savefig(fig, path)
    plt.close(fig)
