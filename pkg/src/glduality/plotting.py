"""Optional report figures (``--figures``).

The figures are a convenience for eyeballing a run; every number they show
is also in the emitted tables and reports.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .integrate import Trajectory  # noqa: E402
from .invariants import applicable_quantities, series  # noqa: E402

STYLE = {
    "figure.figsize": (9.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
    "savefig.bbox": "tight",
}


def _orbit_axes(ax, z: np.ndarray, label: str, **kw) -> None:
    ax.plot(z.real, z.imag, lw=0.8, label=label, **kw)
    ax.plot([0.0], [0.0], "k+", ms=6)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")


def simulate_figure(traj: Trajectory, path, title: str = "") -> Path:
    """Orbit on the left, relative drift of each conserved quantity on the right."""
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(1, 2, gridspec_kw={"wspace": 0.35})
        _orbit_axes(ax0, traj.z, traj.spec.label)
        ax0.set_title(title or traj.spec.label)
        clock = traj.clocks
        for q in applicable_quantities(traj.spec):
            values = series(traj, q)
            scale = max(abs(values[0]), 1e-12)
            ax1.semilogy(clock, np.maximum(np.abs(values - values[0]) / scale, 1e-18), lw=0.8, label=q)
        ax1.set_xlabel(traj.frame.value + " time")
        ax1.set_ylabel("relative deviation")
        ax1.legend()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path)
        plt.close(fig)
    return path


def dual_figure(source: Trajectory, dual: Trajectory, path, title: str = "") -> Path:
    """Source pseudomotion and its dual side by side."""
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(1, 2, gridspec_kw={"wspace": 0.35})
        _orbit_axes(ax0, source.z, "z(s)")
        ax0.set_title(f"source, nu = {source.spec.nu:g}")
        _orbit_axes(ax1, dual.z, "w(sigma)", color="C1")
        ax1.set_title(f"dual, mu = {dual.spec.nu:g}")
        if title:
            fig.suptitle(title)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path)
        plt.close(fig)
    return path
