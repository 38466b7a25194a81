"""JSON run-configuration parsing with strict key validation.

A run file has four sections and a mode flag::

    {
      "model":  {"k": .., "mu": .., "lambda": .., "Q": .., "Q1hat": ..,
                 "s1": .., "s2": .., "s3": .., "s4": .., "alphaR": ..},
      "scheme": {"h": .., "delta": .., "ell0": .., "ellm": .., "alpha_thr": ..,
                 "rho": .., "a_star_lo": .., "a_star_hi": ..,
                 "m01": .., "m02": .., "T_final": ..},
      "initial": {"alpha0": PRESET, "c0": PRESET},
      "output": {"directory": "out", "snapshots": 10, "plots": true},
      "mode": "strict" | "forced"
    }

where PRESET is either ``{"type": "constant", "value": v}`` or
``{"type": "polynomial", "coeffs": [c0, c1, ...]}`` (coefficients in
ascending powers of x). Unknown keys anywhere are rejected. ``ell0``
defaults to 1, ``rho`` to 0.1, and the snapshot count to 10.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .errors import ConfigError, NonIntegerGrid
from .kernel import ModelParams, SchemeConfig

MODEL_KEYS = {
    "k": "k",
    "mu": "mu",
    "lambda": "lam",
    "Q": "Q",
    "Q1hat": "Q1hat",
    "s1": "s1",
    "s2": "s2",
    "s3": "s3",
    "s4": "s4",
    "alphaR": "alphaR",
}
SCHEME_KEYS = (
    "h",
    "delta",
    "ell0",
    "ellm",
    "alpha_thr",
    "rho",
    "a_star_lo",
    "a_star_hi",
    "m01",
    "m02",
    "T_final",
)
SCHEME_DEFAULTS = {"ell0": 1.0, "rho": 0.1}


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "out"
    snapshots: int = 10
    plots: bool = True


@dataclass(frozen=True)
class ParsedConfig:
    params: ModelParams
    config: SchemeConfig
    alpha0: Callable[[float], float]
    c0: Callable[[float], float]
    output: OutputOptions
    forced: bool


def parse_config(path: str | Path) -> ParsedConfig:
    """Load and validate a run-configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "configuration file does not exist")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(str(path), f"invalid JSON: {err}") from err
    if not isinstance(raw, dict):
        raise ConfigError(str(path), "top level must be a JSON object")

    _reject_unknown(raw, {"model", "scheme", "initial", "output", "mode"}, "")
    model = _section(raw, "model")
    scheme = _section(raw, "scheme")
    initial = _section(raw, "initial")
    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output", "must be a JSON object")

    params = _parse_model(model)
    config = _parse_scheme(scheme)
    _reject_unknown(initial, {"alpha0", "c0"}, "initial")
    alpha0 = _parse_preset(initial, "alpha0")
    c0 = _parse_preset(initial, "c0")
    opts = _parse_output(output)

    mode = raw.get("mode", "strict")
    if mode not in ("strict", "forced"):
        raise ConfigError("mode", f"must be 'strict' or 'forced', got {mode!r}")
    return ParsedConfig(
        params=params,
        config=config,
        alpha0=alpha0,
        c0=c0,
        output=opts,
        forced=(mode == "forced"),
    )


def _section(raw: dict, name: str) -> dict:
    if name not in raw:
        raise ConfigError(name, "required section is missing")
    value = raw[name]
    if not isinstance(value, dict):
        raise ConfigError(name, "must be a JSON object")
    return value


def _reject_unknown(obj: dict, allowed: set[str], prefix: str) -> None:
    for key in obj:
        if key not in allowed:
            path = f"{prefix}.{key}" if prefix else key
            raise ConfigError(path, "unknown key")


def _number(obj: dict, section: str, key: str, default: float | None = None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise ConfigError(f"{section}.{key}", "required key is missing")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}", f"must be a number, got {value!r}")
    return float(value)


def _parse_model(model: dict) -> ModelParams:
    _reject_unknown(model, set(MODEL_KEYS), "model")
    kwargs = {attr: _number(model, "model", key) for key, attr in MODEL_KEYS.items()}
    try:
        return ModelParams(**kwargs)
    except ValueError as err:
        raise ConfigError(_locate("model", MODEL_KEYS.values(), err), str(err)) from err


def _parse_scheme(scheme: dict) -> SchemeConfig:
    _reject_unknown(scheme, set(SCHEME_KEYS), "scheme")
    kwargs = {
        key: _number(scheme, "scheme", key, SCHEME_DEFAULTS.get(key))
        for key in SCHEME_KEYS
    }
    try:
        return SchemeConfig(**kwargs)
    except (ValueError, NonIntegerGrid) as err:
        raise ConfigError(_locate("scheme", SCHEME_KEYS, err), str(err)) from err


def _locate(section: str, fields, err: Exception) -> str:
    """Best-effort key path for a dataclass validation error."""
    message = str(err)
    for name in fields:
        if name in message:
            return f"{section}.{name}"
    return section


def _parse_preset(initial: dict, key: str) -> Callable[[float], float]:
    if key not in initial:
        raise ConfigError(f"initial.{key}", "required key is missing")
    preset = initial[key]
    if not isinstance(preset, dict) or "type" not in preset:
        raise ConfigError(f"initial.{key}", "must be an object with a 'type' key")
    kind = preset["type"]
    if kind == "constant":
        _reject_unknown(preset, {"type", "value"}, f"initial.{key}")
        value = _number(preset, f"initial.{key}", "value")
        return lambda x: value
    if kind == "polynomial":
        _reject_unknown(preset, {"type", "coeffs"}, f"initial.{key}")
        coeffs = preset.get("coeffs")
        if (
            not isinstance(coeffs, list)
            or not coeffs
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs)
        ):
            raise ConfigError(
                f"initial.{key}.coeffs", "must be a nonempty list of numbers"
            )
        frozen = [float(c) for c in coeffs]

        def poly(x: float) -> float:
            acc = 0.0
            for c in reversed(frozen):
                acc = acc * x + c
            return acc

        return poly
    raise ConfigError(
        f"initial.{key}.type", f"must be 'constant' or 'polynomial', got {kind!r}"
    )


def _parse_output(output: dict) -> OutputOptions:
    _reject_unknown(output, {"directory", "snapshots", "plots"}, "output")
    directory = output.get("directory", "out")
    if not isinstance(directory, str):
        raise ConfigError("output.directory", "must be a string")
    snapshots = output.get("snapshots", 10)
    if isinstance(snapshots, bool) or not isinstance(snapshots, int) or snapshots < 1:
        raise ConfigError("output.snapshots", "must be a positive integer")
    plots = output.get("plots", True)
    if not isinstance(plots, bool):
        raise ConfigError("output.plots", "must be a boolean")
    return OutputOptions(directory=directory, snapshots=snapshots, plots=plots)
