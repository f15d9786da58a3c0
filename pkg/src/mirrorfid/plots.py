"""Matplotlib rendering of the regime map report.

The figure mirrors the CSV report: regime shading over the (theta, p)
rectangle, the fidelity boundary as a solid line, the minimum-error boundary
as a dash-dot line, and dots where the minimum-error measurement fails to
maximize the fidelity.
"""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.lines import Line2D
from matplotlib.patches import Patch

REGIME_ORDER = ("UpDown", "LeftRight", "Degenerate")
REGIME_SHADES = ("#f2c894", "#9ecae9", "#c7e9c0")


def render_map_figure(
    p_values: Sequence[float],
    theta_deg_values: Sequence[float],
    regime_codes: np.ndarray,
    disagree_mask: np.ndarray,
    fidelity_boundary: Sequence[tuple[float, float]],
    minerror_boundary: Sequence[tuple[float, float]],
    path: str,
) -> None:
    """Render the regime map to ``path``.

    ``regime_codes`` and ``disagree_mask`` are (len(p), len(theta)) arrays;
    codes index into REGIME_ORDER.  Boundary polylines are (theta_deg, p)
    points.
    """
    p = np.asarray(p_values, dtype=float)
    theta = np.asarray(theta_deg_values, dtype=float)

    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    ax.pcolormesh(
        theta,
        p,
        regime_codes,
        cmap=ListedColormap(REGIME_SHADES),
        vmin=-0.5,
        vmax=len(REGIME_ORDER) - 0.5,
        shading="nearest",
    )

    if np.any(disagree_mask):
        tt, pp = np.meshgrid(theta, p)
        ax.plot(
            tt[disagree_mask],
            pp[disagree_mask],
            linestyle="none",
            marker=".",
            markersize=2.5,
            color="#7a0d0d",
            alpha=0.55,
            label="min-error POM suboptimal for fidelity",
        )

    if fidelity_boundary:
        bx, by = zip(*sorted(fidelity_boundary))
        ax.plot(bx, by, color="black", linewidth=1.6, label="fidelity regime boundary")
    if minerror_boundary:
        mx, my = zip(*sorted(minerror_boundary))
        ax.plot(
            mx,
            my,
            color="#30308c",
            linewidth=1.4,
            linestyle="-.",
            label="min-error regime boundary",
        )

    ax.set_xlabel("mirror-pair half angle theta (deg)")
    ax.set_ylabel("mirror-pair prior p")
    ax.set_xlim(theta.min(), theta.max())
    ax.set_ylim(p.min(), p.max())
    ax.set_title("Optimal-strategy regimes over the mirror ensemble")

    handles = [
        Patch(facecolor=shade, label=name)
        for name, shade in zip(REGIME_ORDER, REGIME_SHADES)
    ]
    extra_handles, extra_labels = ax.get_legend_handles_labels()
    handles.extend(
        h for h, lbl in zip(extra_handles, extra_labels) if isinstance(h, Line2D)
    )
    ax.legend(handles=handles, loc="upper left", fontsize=8, framealpha=0.9)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
