"""Rendering of scan results to image files.

The scan modules emit plot-ready data only; this module turns a
`RegionMap` into a detection-region figure (one panel per criterion)
written alongside the delimited output.  Uses the Agg backend so it works
headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scans import RegionMap

__all__ = ["render_region_map"]


def _margin_grid(rm: RegionMap, criterion: str) -> np.ndarray:
    vals = np.array([
        np.nan if c[criterion].get("margin") is None else float(c[criterion]["margin"])
        for c in rm.cells])
    return vals.reshape(rm.axis1.size, rm.axis2.size)


def render_region_map(rm: RegionMap, path, title: str | None = None) -> None:
    """Write a PNG with the detection region of every criterion in the map.

    Detected cells are shaded; cells without a margin (forbidden parameter
    region or per-cell failures) are hatched out via NaN masking.
    """
    n_crit = len(rm.criteria)
    n_cols = min(3, n_crit)
    n_rows = (n_crit + n_cols - 1) // n_cols
    fig, axes = plt.subplots(n_rows, n_cols, squeeze=False,
                             figsize=(4.2 * n_cols, 3.6 * n_rows),
                             constrained_layout=True)

    def padded(axis):
        half = 0.5 * (axis[1] - axis[0]) if axis.size > 1 else max(0.5, 0.1 * abs(axis[0]))
        return axis[0] - half, axis[-1] + half

    x_lo, x_hi = padded(rm.axis2)
    y_lo, y_hi = padded(rm.axis1)
    extent = (x_lo, x_hi, y_lo, y_hi)
    for k, crit in enumerate(rm.criteria):
        ax = axes[k // n_cols][k % n_cols]
        detected = rm.detection_grid(crit).astype(float)
        margins = _margin_grid(rm, crit)
        detected[np.isnan(margins)] = np.nan
        ax.imshow(detected, origin="lower", aspect="auto", extent=extent,
                  cmap="Blues", vmin=0.0, vmax=1.0, interpolation="nearest")
        if np.isfinite(margins).any():
            try:
                ax.contour(rm.axis2, rm.axis1, margins, levels=[0.0],
                           colors="k", linewidths=0.8)
            except Exception:  # noqa: BLE001 - contour needs a sign change
                pass
        ax.set_xlabel(rm.axis2_name)
        ax.set_ylabel(rm.axis1_name)
        ax.set_title(crit)
    for k in range(n_crit, n_rows * n_cols):
        axes[k // n_cols][k % n_cols].set_axis_off()
    if title:
        fig.suptitle(title)
    fig.savefig(path, dpi=150)
    plt.close(fig)
