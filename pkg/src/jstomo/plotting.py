"""Static figures for the reproduce command (matplotlib, Agg backend)."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no version or date stamps, so reruns give identical files
_META = {"png": {"Software": None}, "svg": {"Date": None, "Creator": None}, "pdf": {"CreationDate": None}}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120, metadata=_META.get(path.suffix.lstrip("."), {}))
    plt.close(fig)
    return path


def symplectic_surfaces(path, x, panels, titles, zlabel=r"$W(x_1, x_2 \mid \mu, \nu)$"):
    """One 3D surface per panel; ``panels`` are (nx, nx) arrays over x1 (rows) and x2 (columns)."""
    fig = plt.figure(figsize=(4.8 * len(panels), 4.2))
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    for i, (vals, title) in enumerate(zip(panels, titles)):
        ax = fig.add_subplot(1, len(panels), i + 1, projection="3d")
        ax.plot_surface(X1, X2, vals, cmap="viridis", rstride=2, cstride=2, linewidth=0, antialiased=False)
        ax.set_xlabel(r"$x_1$")
        ax.set_ylabel(r"$x_2$")
        ax.set_zlabel(zlabel, labelpad=8)
        ax.set_title(title)
        ax.view_init(elev=30, azim=-60)
    fig.tight_layout()
    return _save(fig, path)


def photon_bars(path, rows, row_titles, col_titles):
    """Grid of bar charts; ``rows[r][c]`` is a list of (label, value) for one amplitude."""
    nr, nc = len(rows), max(len(r) for r in rows)
    fig, axes = plt.subplots(nr, nc, figsize=(3.2 * nc, 2.6 * nr), squeeze=False)
    for r, row in enumerate(rows):
        for c, bars in enumerate(row):
            ax = axes[r][c]
            labels = [b[0] for b in bars]
            ax.bar(range(len(bars)), [b[1] for b in bars], color="tab:blue")
            ax.set_xticks(range(len(bars)))
            ax.set_xticklabels(labels, fontsize=7)
            ax.set_ylim(0, max(1e-12, max(b[1] for b in bars)) * 1.15)
            ax.set_title(col_titles[c], fontsize=9)
            if c == 0:
                ax.set_ylabel(row_titles[r])
    fig.tight_layout()
    return _save(fig, path)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return path
