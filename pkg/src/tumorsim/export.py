"""Delimited and JSON outputs for runs, sweeps, and refinement studies.

All CSV files use LF line endings, '.' decimal separators, and 17
significant digits, which round-trips IEEE doubles exactly. Non-finite
values are mapped to null in JSON documents.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from .diagnostics import RunSummary
from .kernel import FloatArray, Mesh, State

if TYPE_CHECKING:
    from .orchestrator import CflReport, Horizon, HorizonRow, RefinementReport, Trajectory

# Reference stability constant reported for the standard parameter set
# (k = mu = 1, a bounds 0.4/0.82, repulsion threshold 0.8, box length 10).
# Direct evaluation of the stability formula gives ~0.0512 for the same
# numbers; both admit the reference ratio delta/h = 0.02. The mismatch is
# documented whenever that parameter set is detected.
PUBLISHED_REFERENCE_CCFL = 0.0361
_REFERENCE_CONSTANTS = {
    "mu": 1.0,
    "a_star_lo": 0.4,
    "a_star_hi": 0.82,
    "alphaR": 0.8,
    "ellm": 10.0,
}


def fmt(value: float) -> str:
    """Serialize a double with 17 significant digits (exact round trip)."""
    return format(float(value), ".17g")


def write_snapshot_csv(path: str | Path, mesh: Mesh, state: State) -> None:
    """One row per node: x, alpha (containing cell, duplicated at the last
    node), u, c."""
    lines = ["x,alpha,u,c"]
    J = mesh.J
    for j in range(J + 1):
        a = state.alpha[min(j, J - 1)]
        lines.append(
            f"{fmt(mesh.nodes[j])},{fmt(a)},{fmt(state.u[j])},{fmt(state.c[j])}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_snapshot_csv(path: str | Path) -> dict[str, FloatArray]:
    """Parse a snapshot written by :func:`write_snapshot_csv`."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    header = lines[0].split(",")
    cols: dict[str, list[float]] = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            cols[name].append(float(cell))
    return {name: np.asarray(vals) for name, vals in cols.items()}


def write_radius_csv(path: str | Path, times: FloatArray, radii: FloatArray) -> None:
    lines = ["t,ell"]
    for t, ell in zip(times, radii):
        lines.append(f"{fmt(t)},{fmt(ell)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_horizon_csv(path: str | Path, rows: "list[HorizonRow]") -> None:
    lines = ["a_star_lo,a_star_hi,m02,F_min,T_m,F_max,T_M,T_ell,T_star"]
    for row in rows:
        hz = row.horizon
        lines.append(
            ",".join(
                fmt(v)
                for v in (
                    row.a_star_lo,
                    row.a_star_hi,
                    row.m02,
                    hz.F_min,
                    hz.T_m,
                    hz.F_max,
                    hz.T_M,
                    hz.T_ell,
                    hz.T_star,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_refinement_csv(path: str | Path, report: "RefinementReport") -> None:
    lines = ["level,h,delta,steps,l1_diff_to_previous,spatial_bv,temporal_bv,oxygen_energy"]
    for i, level in enumerate(report.levels):
        diff = report.l1_differences[i - 1] if i > 0 else math.nan
        lines.append(
            f"{i},{fmt(level.h)},{fmt(level.delta)},{level.steps},"
            f"{fmt(diff)},{fmt(level.spatial_bv_final)},"
            f"{fmt(level.temporal_bv_sum)},{fmt(level.oxygen_energy_sum)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def sanitize(value: Any) -> Any:
    """Recursively replace non-finite floats by None for strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, (np.floating, np.integer)):
        return sanitize(value.item())
    if isinstance(value, np.ndarray):
        return [sanitize(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    return value


def cfl_to_dict(report: "CflReport", params=None, config=None) -> dict[str, Any]:
    out = {
        "c_cfl": report.c_cfl,
        "ratio": report.ratio,
        "lower": report.lower,
        "delta_cap": report.delta_cap,
        "feasible": report.feasible,
        "unbounded": report.unbounded,
    }
    note = reference_discrepancy_note(report, params, config)
    if note is not None:
        out["published_reference"] = note
    return sanitize(out)


def reference_discrepancy_note(report: "CflReport", params, config) -> dict | None:
    """Describe the published-versus-computed stability constant mismatch.

    Only attached when the configuration matches the reference parameter
    set the published value belongs to.
    """
    if params is None or config is None:
        return None
    actual = {
        "mu": params.mu,
        "a_star_lo": config.a_star_lo,
        "a_star_hi": config.a_star_hi,
        "alphaR": params.alphaR,
        "ellm": config.ellm,
    }
    for key, expected in _REFERENCE_CONSTANTS.items():
        if not math.isclose(actual[key], expected, rel_tol=1e-9):
            return None
    return {
        "c_cfl": PUBLISHED_REFERENCE_CCFL,
        "note": (
            "the originally published stability constant for this parameter "
            f"set is {PUBLISHED_REFERENCE_CCFL}; direct evaluation of the "
            f"formula gives {report.c_cfl:.6g}; both admit the ratio "
            f"{report.ratio:.6g}"
        ),
    }


def horizon_to_dict(horizon: "Horizon") -> dict[str, Any]:
    return sanitize(
        {
            "F_min": horizon.F_min,
            "F_max": horizon.F_max,
            "T_m": horizon.T_m,
            "T_M": horizon.T_M,
            "T_ell": horizon.T_ell,
            "T_star": horizon.T_star,
        }
    )


def summary_to_dict(
    trajectory: "Trajectory",
    summary: RunSummary,
    horizon: "Horizon | None",
    horizon_error: str | None = None,
    snapshot_files: list[str] | None = None,
    max_logged_violations: int = 200,
) -> dict[str, Any]:
    """Self-describing run summary: always carries the monitor verdicts,
    the stability report, and the horizon (or the reason it is undefined)."""
    violations = [
        {"monitor": v.monitor, "step": v.step, "index": v.index, "value": v.value}
        for v in summary.violations[:max_logged_violations]
    ]
    doc = {
        "termination": summary.termination,
        "steps": summary.steps,
        "forced": trajectory.forced,
        "cfl": cfl_to_dict(trajectory.cfl, trajectory.params, trajectory.config),
        "horizon": horizon_to_dict(horizon) if horizon is not None else None,
        "monitors": {
            "max_mass_residual": summary.max_mass_residual,
            "c_min": summary.c_min,
            "c_max": summary.c_max,
            "alpha_temporal_bv": summary.alpha_temporal_bv,
            "max_alpha_space_bv": summary.max_alpha_space_bv,
            "max_flux_bv": summary.max_flux_bv,
            "oxygen_energy_sum": summary.oxygen_energy_sum,
            "radius_final": summary.radius_final,
            "radius_decomposition_pass": summary.radius_decomposition_pass,
            "radius_decomposition_first_bad_step": summary.radius_decomposition_first_bad_step,
            "violation_count": len(summary.violations),
            "violations_logged": violations,
        },
        "snapshots": snapshot_files or [],
    }
    if horizon_error is not None:
        doc["horizon_unavailable_reason"] = horizon_error
    return sanitize(doc)


def write_summary_json(path: str | Path, doc: dict[str, Any]) -> None:
    Path(path).write_text(
        json.dumps(doc, indent=2, allow_nan=False) + "\n", encoding="utf-8", newline="\n"
    )
