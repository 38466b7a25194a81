"""Matplotlib report figures rendered to files next to the CSV output."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib import cm
from matplotlib.colors import Normalize

if TYPE_CHECKING:
    from .orchestrator import Trajectory

_FIELD_LABELS = {
    "alpha": "cell volume fraction",
    "u": "cell velocity",
    "c": "oxygen tension",
}


def render_report_figures(trajectory: "Trajectory", directory: str | Path) -> list[Path]:
    """Write alpha/u/c snapshot figures and the radius history as PNG files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for field in ("alpha", "u", "c"):
        written.append(_field_figure(trajectory, field, directory / f"{field}.png"))
    written.append(_radius_figure(trajectory, directory / "radius.png"))
    return written


def _field_figure(trajectory: "Trajectory", field: str, path: Path) -> Path:
    h = trajectory.mesh.h
    t_max = max((snap.t for snap in trajectory.snapshots), default=1.0)
    norm = Normalize(vmin=0.0, vmax=t_max if t_max > 0.0 else 1.0)
    cmap = cm.get_cmap("viridis")

    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    for snap in trajectory.snapshots:
        m = snap.state.radius_index
        colour = cmap(norm(snap.t))
        if field == "alpha":
            if m == 0:
                continue
            xs = np.arange(m + 1) * h
            ax.stairs(snap.state.alpha[:m], xs, color=colour, linewidth=1.2)
        else:
            values = snap.state.u if field == "u" else snap.state.c
            xs = np.arange(m + 1) * h
            ax.plot(xs, values[: m + 1], color=colour, linewidth=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel(_FIELD_LABELS[field])
    fig.colorbar(cm.ScalarMappable(norm=norm, cmap=cmap), ax=ax, label="t")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _radius_figure(trajectory: "Trajectory", path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    ax.plot(trajectory.times, trajectory.radius_series, color="#1f77b4", linewidth=1.4)
    ax.set_xlabel("t")
    ax.set_ylabel("tumour radius")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
