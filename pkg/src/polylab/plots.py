"""Figure rendering for the report path (headless matplotlib backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import polytope

__all__ = ["save_field_png", "save_trace_png"]


def save_field_png(xs, ys, values, name: str, path) -> None:
    """Render one scalar field sampled on the (xs, ys) grid to a PNG.

    ``values`` has shape (len(xs), len(ys)); NaNs render as gaps.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.5), constrained_layout=True)
    mesh = ax.pcolormesh(
        np.asarray(xs), np.asarray(ys), np.asarray(values).T, shading="auto"
    )
    fig.colorbar(mesh, ax=ax, label=name)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(name)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trace_png(mp: polytope.MomentumMap, path) -> None:
    """Plot the x = 0 trace of a momentum map with its kink points."""
    kink_y = [k.y0 for k in mp.kinks]
    lo = min(kink_y, default=0.0) - 2.0
    hi = max(kink_y, default=0.0) + 2.0
    ys = np.linspace(lo, hi, 600)
    t1, t2 = polytope.trace(mp, ys)
    fig, ax = plt.subplots(figsize=(5.0, 5.0), constrained_layout=True)
    ax.plot(t1, t2, lw=1.5)
    if kink_y:
        k1, k2 = polytope.trace(mp, np.asarray(kink_y))
        ax.plot(k1, k2, "o", ms=5)
    ax.set_xlabel("phi1")
    ax.set_ylabel("phi2")
    ax.set_title("boundary trace")
    ax.set_aspect("equal", adjustable="datalim")
    fig.savefig(path, dpi=150)
    plt.close(fig)
