"""Command-line surface: run, cfl, horizon, sweep, refine.

Exit codes: 0 on success, 1 on model or monitor errors (including runs
that terminate early), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, export, mplfigs, svgplot
from .config import ParsedConfig, parse_config
from .errors import ConfigError, PreconditionViolated, TumorSimError
from .orchestrator import (
    RunOptions,
    existence_horizon,
    refinement_study,
    run,
    sweep_horizon,
    validate_cfl,
)

EXIT_OK = 0
EXIT_MODEL_ERROR = 1
EXIT_CONFIG_ERROR = 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        parsed = parse_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    try:
        return args.handler(args, parsed)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except TumorSimError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_MODEL_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tumor-sim",
        description="One-dimensional two-phase tumour growth simulator",
    )
    sub = parser.add_subparsers(required=True, dest="command")

    p_run = sub.add_parser("run", help="simulate and write snapshots, radius history, summary, figures")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (overrides the config)")
    p_run.add_argument("--snapshots", type=int, help="number of stored snapshots")
    p_run.add_argument("--force", action="store_true", help="override the stability window and keep going past monitor violations")
    p_run.set_defaults(handler=_cmd_run)

    p_cfl = sub.add_parser("cfl", help="print the stability report as JSON")
    p_cfl.add_argument("config")
    p_cfl.set_defaults(handler=_cmd_cfl)

    p_hz = sub.add_parser("horizon", help="print the existence horizon as JSON")
    p_hz.add_argument("config")
    p_hz.set_defaults(handler=_cmd_horizon)

    p_sweep = sub.add_parser("sweep", help="tabulate the horizon over a parameter grid")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--grid", required=True, help="axes as name=start:stop:count (comma separated; names: a_star_lo, a_star_hi, m02)")
    p_sweep.add_argument("--out", help="output directory (overrides the config)")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_ref = sub.add_parser("refine", help="rerun on halved (h, delta) and report L1 differences")
    p_ref.add_argument("config")
    p_ref.add_argument("--levels", type=int, default=3)
    p_ref.add_argument("--out", help="output directory (overrides the config)")
    p_ref.add_argument("--force", action="store_true")
    p_ref.set_defaults(handler=_cmd_refine)
    return parser


def _out_dir(args, parsed: ParsedConfig) -> Path:
    directory = Path(args.out if getattr(args, "out", None) else parsed.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _cmd_run(args, parsed: ParsedConfig) -> int:
    out = _out_dir(args, parsed)
    options = RunOptions(
        forced=parsed.forced or args.force,
        snapshots=args.snapshots if args.snapshots else parsed.output.snapshots,
    )
    trajectory = run(parsed.params, parsed.config, parsed.alpha0, parsed.c0, options)
    summary = diagnostics.summarize(trajectory)

    snapshot_files = []
    for i, snap in enumerate(trajectory.snapshots):
        name = f"snapshot_{i:03d}.csv"
        export.write_snapshot_csv(out / name, trajectory.mesh, snap.state)
        snapshot_files.append(name)
    export.write_radius_csv(out / "radius.csv", trajectory.times, trajectory.radius_series)

    horizon = None
    horizon_error = None
    try:
        horizon = existence_horizon(parsed.params, parsed.config)
    except PreconditionViolated as err:
        horizon_error = str(err)
    doc = export.summary_to_dict(trajectory, summary, horizon, horizon_error, snapshot_files)
    export.write_summary_json(out / "summary.json", doc)

    if parsed.output.plots:
        figures = out / "figures"
        mplfigs.render_report_figures(trajectory, figures)
        for field in ("alpha", "u", "c", "radius"):
            (figures / f"{field}.svg").write_text(
                svgplot.render_svg(trajectory, field), encoding="utf-8", newline="\n"
            )

    print(json.dumps(export.sanitize({
        "termination": summary.termination,
        "steps": summary.steps,
        "radius_final": summary.radius_final,
        "violation_count": len(summary.violations),
        "output_directory": str(out),
    }), indent=2))
    return EXIT_OK if summary.termination == "completed" else EXIT_MODEL_ERROR


def _cmd_cfl(args, parsed: ParsedConfig) -> int:
    report = validate_cfl(parsed.params, parsed.config)
    print(json.dumps(export.cfl_to_dict(report, parsed.params, parsed.config), indent=2))
    return EXIT_OK


def _cmd_horizon(args, parsed: ParsedConfig) -> int:
    horizon = existence_horizon(parsed.params, parsed.config)
    print(json.dumps(export.horizon_to_dict(horizon), indent=2))
    return EXIT_OK


def _parse_grid(spec: str) -> dict[str, list[float]]:
    grid: dict[str, list[float]] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError("--grid", f"expected name=start:stop:count, got {part!r}")
        name, _, values = part.partition("=")
        name = name.strip()
        if name not in ("a_star_lo", "a_star_hi", "m02"):
            raise ConfigError("--grid", f"unknown axis {name!r}")
        pieces = values.split(":")
        try:
            if len(pieces) == 1:
                grid[name] = [float(pieces[0])]
            elif len(pieces) == 3:
                start, stop, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
                if count < 1:
                    raise ValueError("count must be positive")
                grid[name] = [float(v) for v in np.linspace(start, stop, count)]
            else:
                raise ValueError("expected start:stop:count or a single value")
        except ValueError as err:
            raise ConfigError("--grid", f"{name}: {err}") from err
    if not grid:
        raise ConfigError("--grid", "empty grid specification")
    return grid


def _cmd_sweep(args, parsed: ParsedConfig) -> int:
    grid = _parse_grid(args.grid)
    rows = sweep_horizon(parsed.params, parsed.config, grid)
    out = _out_dir(args, parsed)
    export.write_horizon_csv(out / "horizon_sweep.csv", rows)
    best = None
    for row in rows:
        if best is None or row.horizon.T_star > best.horizon.T_star:
            best = row  # first grid point attaining the maximum wins ties
    print(json.dumps(export.sanitize({
        "rows": len(rows),
        "output": str(out / "horizon_sweep.csv"),
        "argmax": None if best is None else {
            "a_star_lo": best.a_star_lo,
            "a_star_hi": best.a_star_hi,
            "m02": best.m02,
            "T_star": best.horizon.T_star,
        },
    }), indent=2))
    return EXIT_OK


def _cmd_refine(args, parsed: ParsedConfig) -> int:
    if args.levels < 1:
        raise ConfigError("--levels", "must be at least 1")
    options = RunOptions(forced=parsed.forced or args.force, snapshots=1)
    report = refinement_study(
        parsed.params, parsed.config, parsed.alpha0, parsed.c0, args.levels, options
    )
    out = _out_dir(args, parsed)
    export.write_refinement_csv(out / "refinement.csv", report)
    print(json.dumps(export.sanitize({
        "levels": [
            {"h": lv.h, "delta": lv.delta, "steps": lv.steps,
             "spatial_bv": lv.spatial_bv_final, "temporal_bv": lv.temporal_bv_sum}
            for lv in report.levels
        ],
        "l1_differences": report.l1_differences,
        "output": str(out / "refinement.csv"),
    }), indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
