"""Static figure rendering for analysis reports.

Figures are written next to the delimited output as PNG files.  The PNG
metadata is pinned so identical data produces identical bytes, which the
report pipeline's determinism contract relies on.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import Histogram, TripleMomentGrid

_SAVEFIG = {"dpi": 130, "metadata": {"Software": "pngauss"}}


def render_histogram(hist: Histogram, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    edges = hist.edges()
    ax.bar(edges[:-1], hist.counts, width=np.diff(edges), align="edge",
           color="#31688e", linewidth=0)
    ax.set_xlabel("sample value")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def render_grid(grid: TripleMomentGrid, path, title: str | None = None) -> None:
    """Heatmap of |c(d1, d2)|; the magnitude is what flags peaks."""
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    im = ax.imshow(np.abs(grid.values), origin="lower", cmap="viridis",
                   aspect="auto", interpolation="nearest")
    ax.set_xlabel("delay d2")
    ax.set_ylabel("delay d1")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="|triple product moment|")
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def render_histogram_panel(named_histograms: list[tuple[str, Histogram]], path,
                           ncols: int = 2) -> None:
    """Grid of histograms, one panel per (label, histogram) pair."""
    n = len(named_histograms)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.5 * ncols, 3.6 * nrows),
                             squeeze=False)
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    for ax, (label, hist) in zip(axes.flat, named_histograms):
        edges = hist.edges()
        ax.bar(edges[:-1], hist.counts, width=np.diff(edges), align="edge",
               color="#31688e", linewidth=0)
        ax.set_title(label, fontsize=10)
        ax.set_xlabel("sample value")
        ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)
