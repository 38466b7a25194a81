"""Standalone SVG 1.1 line plots of a trajectory, no rendering dependency.

Field plots draw one polyline per stored snapshot over that snapshot's
recovered domain, colour-graded from blue (early) to red (late) with a
time legend; the radius plot is a single time-versus-radius polyline.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .orchestrator import Trajectory

WIDTH = 760
HEIGHT = 480
MARGIN_LEFT = 64
MARGIN_RIGHT = 120
MARGIN_TOP = 32
MARGIN_BOTTOM = 48

_EARLY_RGB = (31, 119, 180)
_LATE_RGB = (214, 39, 40)

_FIELDS = ("alpha", "u", "c", "radius")
_TITLES = {
    "alpha": "cell volume fraction",
    "u": "cell velocity",
    "c": "oxygen tension",
    "radius": "tumour radius",
}
_XLABELS = {"alpha": "x", "u": "x", "c": "x", "radius": "t"}


def render_svg(trajectory: "Trajectory", which: str) -> str:
    """Return an SVG document for one of alpha, u, c, or radius."""
    if which not in _FIELDS:
        raise ValueError(f"which must be one of {_FIELDS}, got {which!r}")
    if which == "radius":
        curves = [(0.0, trajectory.times, trajectory.radius_series)]
    else:
        curves = _field_curves(trajectory, which)
    if not curves:
        raise ValueError("trajectory holds no drawable snapshot")
    return _document(curves, which, trajectory)


def _field_curves(trajectory: "Trajectory", which: str):
    h = trajectory.mesh.h
    curves = []
    for snap in trajectory.snapshots:
        m = snap.state.radius_index
        if which == "alpha":
            if m == 0:
                continue
            # Staircase over the cells of the recovered domain.
            xs = np.repeat(np.arange(m + 1) * h, 2)[1:-1]
            ys = np.repeat(snap.state.alpha[:m], 2)
        else:
            values = snap.state.u if which == "u" else snap.state.c
            xs = np.arange(m + 1) * h
            ys = values[: m + 1]
            if xs.size < 2:
                continue
        curves.append((snap.t, xs, ys))
    return curves


def _colour(t: float, t_max: float) -> str:
    s = t / t_max if t_max > 0.0 else 0.0
    rgb = tuple(
        round(a + s * (b - a)) for a, b in zip(_EARLY_RGB, _LATE_RGB)
    )
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _document(curves, which: str, trajectory: "Trajectory") -> str:
    x_lo = 0.0
    x_hi = max(float(np.max(xs)) for _, xs, _ in curves)
    y_lo = min(float(np.min(ys)) for _, _, ys in curves)
    y_hi = max(float(np.max(ys)) for _, _, ys in curves)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        pad = max(abs(y_lo), 1.0) * 0.1
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    t_max = max(t for t, _, _ in curves)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="20" font-size="14" '
        f'text-anchor="middle" font-family="sans-serif">{_TITLES[which]}</text>',
    ]

    for xt in _ticks(x_lo, x_hi):
        px = sx(xt)
        parts.append(
            f'<line x1="{px:.2f}" y1="{MARGIN_TOP}" x2="{px:.2f}" '
            f'y2="{MARGIN_TOP + plot_h}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{MARGIN_TOP + plot_h + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{xt:.3g}</text>'
        )
    for yt in _ticks(y_lo, y_hi):
        py = sy(yt)
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{py:.2f}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{py:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.2f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{yt:.3g}</text>'
        )
    parts.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 10}" font-size="12" '
        f'text-anchor="middle" font-family="sans-serif">{_XLABELS[which]}</text>'
    )

    for t, xs, ys in curves:
        points = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{_colour(t, t_max)}" '
            f'stroke-width="1.5" points="{points}"/>'
        )

    legend = curves if which != "radius" else []
    if len(legend) > 12:
        stride = (len(legend) + 11) // 12
        legend = legend[::stride]
    lx = MARGIN_LEFT + plot_w + 12
    for i, (t, _, _) in enumerate(legend):
        ly = MARGIN_TOP + 14 + 18 * i
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{_colour(t, t_max)}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-size="11" '
            f'font-family="sans-serif">t={t:.4g}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
