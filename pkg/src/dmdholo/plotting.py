"""Figures written next to the numeric outputs. Images are conveniences; CSVs are the record."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.titlesize": 10,
    "axes.labelsize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "image.origin": "lower",
}
# PNG metadata without version strings keeps reruns byte-identical
_META = {"Software": None}


def _extent_mm(grid):
    x, y = grid.axes()
    return [x[0] * 1e3, x[-1] * 1e3, y[0] * 1e3, y[-1] * 1e3]


def _save(fig, path):
    fig.savefig(path, metadata=_META)
    plt.close(fig)


def plot_field(field, path, title=""):
    """Intensity and phase side by side."""
    with plt.rc_context(RC):
        fig, (a0, a1) = plt.subplots(1, 2, figsize=(8, 3.6))
        ext = _extent_mm(field.grid)
        im = a0.imshow(field.intensity / max(field.intensity.max(), 1e-300), extent=ext,
                       cmap="inferno")
        a0.set_title("intensity (norm.)")
        fig.colorbar(im, ax=a0, fraction=0.046)
        phase = np.where(field.amplitude > 1e-3 * field.amplitude.max(), field.phase, np.nan)
        im = a1.imshow(phase, extent=ext, cmap="twilight", vmin=-np.pi, vmax=np.pi)
        a1.set_title("phase (rad)")
        fig.colorbar(im, ax=a1, fraction=0.046)
        for a in (a0, a1):
            a.set_xlabel("x (mm)")
            a.set_ylabel("y (mm)")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        _save(fig, path)


def plot_hologram(holo, path, title="", zoom=120):
    """Central ``zoom`` x ``zoom`` mirrors of the on/off pattern."""
    g = holo.grid
    cy, cx = g.ny // 2, g.nx // 2
    h = zoom // 2
    crop = holo.bits[max(cy - h, 0):cy + h, max(cx - h, 0):cx + h]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.imshow(crop, cmap="gray", interpolation="nearest", vmin=0, vmax=1)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(title or f"period {holo.config.period_samples} mirrors")
        _save(fig, path)


def plot_image(img, grid, path, title="", cmap="gray"):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 4))
        ax.imshow(img, extent=_extent_mm(grid), cmap=cmap)
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("y (mm)")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def plot_timeline(samples, labels, path, boundaries=None):
    """Normalized detected power per channel versus time (ms)."""
    t = np.array([s.time for s in samples]) * 1e3
    p = np.array([s.channel_power for s in samples])
    with plt.rc_context(RC):
        fig, axes = plt.subplots(len(labels), 1, figsize=(6, 1.4 * len(labels) + 0.6),
                                 sharex=True, squeeze=False)
        for k, (ax, label) in enumerate(zip(axes[:, 0], labels)):
            ax.step(t, p[:, k], where="post", lw=1.2)
            ax.set_ylim(-0.05, 1.1)
            ax.set_ylabel("norm. power")
            ax.set_title(label, loc="left", fontsize=8)
            for b in (boundaries if boundaries is not None else []):
                ax.axvline(b * 1e3, color="0.8", lw=0.6, zorder=0)
        axes[-1, 0].set_xlabel("time (ms)")
        fig.tight_layout()
        _save(fig, path)


def plot_matrix(matrix, row_labels, col_labels, path, title=""):
    with plt.rc_context(RC):
        n = max(len(row_labels), len(col_labels))
        fig, ax = plt.subplots(figsize=(2 + 0.45 * n, 1.5 + 0.45 * n))
        im = ax.imshow(matrix, cmap="viridis", vmin=0, origin="upper")
        ax.set_xticks(range(len(col_labels)), col_labels, rotation=90)
        ax.set_yticks(range(len(row_labels)), row_labels)
        fig.colorbar(im, ax=ax, fraction=0.046)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
