"""Run-configuration parsing and validation for the command-line runner.

Configs are JSON objects with a fixed schema per command. Everything is
validated eagerly: unknown keys are rejected with a spelling suggestion,
numeric overrides are range-checked, and grids get a stability pre-check
so obviously unstable subregions are flagged before any compute starts.
All algorithms downstream are deterministic, so a config fully determines
the output bytes.
"""

from __future__ import annotations

import difflib
import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .models import Model, stability_check
from .phases import _build_model

__all__ = ["RunConfig", "ConfigError", "load_config", "validate_config"]

COMMANDS = ("sweep", "boundary", "minimize", "ed", "selfconsistent")

# Sane ranges for numeric overrides; anything outside is a config error.
_TOLERANCE_RANGES = {
    "t_tol": (1.0e-12, 1.0e-2),
    "grid_points": (3, 41),
    "grid_half_width": (0.5, 10.0),
    "energy_tol": (1.0e-14, 1.0e-3),
    "photon_tol": (1.0e-12, 1.0e-1),
}

_MODEL_KEYS = {
    "multimode_dicke12": {"kind", "gamma", "gamma_prime"},
    "rabi_stark_hubbard": {"kind", "gamma", "j_tilde", "u_tilde"},
    "anisotropic_rabi_stark": {"kind", "gamma1", "gamma2", "u_tilde"},
}

# Canonical parameter order for output columns; set iteration would leak
# hash randomization into the CSV header.
_PARAM_ORDER = {
    "rabi_stark_hubbard": ("gamma", "j_tilde", "u_tilde"),
    "anisotropic_rabi_stark": ("gamma1", "gamma2", "u_tilde"),
}

_TOP_KEYS = {
    "command",
    "model",
    "beta_omega",
    "grid",
    "ray",
    "ed",
    "selfconsistent",
    "output",
    "tolerances",
    "workers",
}


class ConfigError(ValueError):
    """Raised for malformed configs; message carries key diagnostics."""


def _reject_unknown(section: Dict[str, Any], allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            hint = difflib.get_close_matches(key, sorted(allowed), n=1)
            suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ConfigError(f"unknown key {key!r} in {where}{suggestion}")


def _require(section: Dict[str, Any], key: str, where: str) -> Any:
    if key not in section:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return section[key]


def _axis_values(axis: Dict[str, Any], where: str) -> Tuple[str, np.ndarray]:
    _reject_unknown(axis, {"param", "start", "stop", "count", "values"}, where)
    param = _require(axis, "param", where)
    if "values" in axis:
        values = np.asarray(axis["values"], dtype=float)
        if values.ndim != 1:
            raise ConfigError(f"{where}: values must be a flat list")
        return str(param), values
    start = float(_require(axis, "start", where))
    stop = float(_require(axis, "stop", where))
    count = int(_require(axis, "count", where))
    if count < 0:
        raise ConfigError(f"{where}: count must be nonnegative")
    return str(param), np.linspace(start, stop, count)


@dataclass
class RunConfig:
    """Parsed and validated run configuration."""

    command: str
    model: Optional[Model]
    model_kind: Optional[str]
    base_params: Dict[str, float]
    beta_omega: Optional[float]
    axes: List[Tuple[str, np.ndarray]] = field(default_factory=list)
    ray: Dict[str, Any] = field(default_factory=dict)
    ed: Dict[str, Any] = field(default_factory=dict)
    selfconsistent: Dict[str, Any] = field(default_factory=dict)
    output_format: str = "csv"
    output_path: Optional[str] = None
    plot: bool = True
    workers: int = 1
    tolerances: Dict[str, float] = field(default_factory=dict)


def _parse_model(section: Dict[str, Any]) -> Tuple[Model, str, Dict[str, float]]:
    kind = _require(section, "kind", "model")
    if kind not in _MODEL_KEYS:
        hint = difflib.get_close_matches(kind, sorted(_MODEL_KEYS), n=1)
        suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigError(f"unknown model kind {kind!r}{suggestion}")
    _reject_unknown(section, _MODEL_KEYS[kind], "model")
    flat: Dict[str, float] = {}
    if kind == "multimode_dicke12":
        gamma = _require(section, "gamma", "model")
        gamma_prime = _require(section, "gamma_prime", "model")
        if not isinstance(gamma, (list, tuple)) or not isinstance(
            gamma_prime, (list, tuple)
        ):
            raise ConfigError("model: gamma and gamma_prime must be lists")
        if len(gamma) != len(gamma_prime):
            raise ConfigError("model: gamma and gamma_prime lengths differ")
        for i, g in enumerate(gamma, start=1):
            flat[f"gamma{i}"] = float(g)
        for i, gp in enumerate(gamma_prime, start=1):
            flat[f"gamma_prime{i}"] = float(gp)
    else:
        for key in _PARAM_ORDER[kind]:
            flat[key] = float(_require(section, key, "model"))
    try:
        model = _build_model(kind, flat)
    except ValueError as err:
        raise ConfigError(f"model: {err}") from err
    return model, kind, flat


def load_config(path: str) -> RunConfig:
    """Parse a JSON config file into a validated RunConfig."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"config parse error at line {err.lineno}, column {err.colno}: "
            f"{err.msg}"
        ) from err
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")
    command = _require(raw, "command", "config")
    if command not in COMMANDS:
        hint = difflib.get_close_matches(command, COMMANDS, n=1)
        suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
        raise ConfigError(f"unknown command {command!r}{suggestion}")

    model = None
    kind = None
    base_params: Dict[str, float] = {}
    if command == "selfconsistent":
        if "model" in raw:
            model, kind, base_params = _parse_model(raw["model"])
            if kind != "rabi_stark_hubbard":
                raise ConfigError(
                    "selfconsistent requires the hopping family model"
                )
    else:
        model, kind, base_params = _parse_model(_require(raw, "model", "config"))

    beta_omega = raw.get("beta_omega")
    if beta_omega is not None:
        beta_omega = float(beta_omega)
        if not 0.0 < beta_omega <= 1.0e4:
            raise ConfigError("beta_omega must lie in (0, 1e4]")

    cfg = RunConfig(
        command=command,
        model=model,
        model_kind=kind,
        base_params=base_params,
        beta_omega=beta_omega,
    )

    if "grid" in raw:
        grid = raw["grid"]
        _reject_unknown(grid, {"axes"}, "grid")
        axes_raw = _require(grid, "axes", "grid")
        cfg.axes = [
            _axis_values(axis, f"grid.axes[{i}]")
            for i, axis in enumerate(axes_raw)
        ]
        for name, _ in cfg.axes:
            if name not in base_params:
                known = sorted(base_params)
                hint = difflib.get_close_matches(name, known, n=1)
                suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
                raise ConfigError(
                    f"grid axis {name!r} is not a model parameter{suggestion}"
                )

    if "ray" in raw:
        ray = raw["ray"]
        _reject_unknown(ray, {"direction", "max_magnitude", "t_tol"}, "ray")
        direction = np.asarray(_require(ray, "direction", "ray"), dtype=float)
        max_magnitude = float(_require(ray, "max_magnitude", "ray"))
        cfg.ray = {"direction": direction, "max_magnitude": max_magnitude}
        if "t_tol" in ray:
            cfg.ray["t_tol"] = float(ray["t_tol"])

    if "ed" in raw:
        ed = raw["ed"]
        _reject_unknown(
            ed,
            {"eta", "n_cut", "n_levels", "max_dim", "axis", "rsh_variant", "psi"},
            "ed",
        )
        cfg.ed = dict(ed)
        if "axis" in ed:
            cfg.ed["axis"] = _axis_values(ed["axis"], "ed.axis")

    if "selfconsistent" in raw:
        sc = raw["selfconsistent"]
        _reject_unknown(sc, {"u_tilde", "eta", "n_cut", "gamma"}, "selfconsistent")
        cfg.selfconsistent = {
            "u_tilde": float(_require(sc, "u_tilde", "selfconsistent")),
            "eta": float(_require(sc, "eta", "selfconsistent")),
            "n_cut": int(sc.get("n_cut", 100)),
        }
        name, values = _axis_values(
            _require(sc, "gamma", "selfconsistent"), "selfconsistent.gamma"
        )
        if name != "gamma":
            raise ConfigError("selfconsistent grid axis must be 'gamma'")
        cfg.selfconsistent["gamma"] = values

    if "output" in raw:
        out = raw["output"]
        _reject_unknown(out, {"format", "path", "plot"}, "output")
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {fmt!r}")
        cfg.output_format = fmt
        cfg.output_path = out.get("path")
        cfg.plot = bool(out.get("plot", True))

    if "workers" in raw:
        cfg.workers = int(raw["workers"])
        if cfg.workers < 1:
            raise ConfigError("workers must be at least 1")

    if "tolerances" in raw:
        tols = raw["tolerances"]
        _reject_unknown(tols, set(_TOLERANCE_RANGES), "tolerances")
        for key, value in tols.items():
            lo, hi = _TOLERANCE_RANGES[key]
            value = float(value)
            if not lo <= value <= hi:
                raise ConfigError(
                    f"tolerances.{key}={value:g} outside the sane range "
                    f"[{lo:g}, {hi:g}]"
                )
            cfg.tolerances[key] = value

    _check_command_sections(cfg)
    return cfg


def _check_command_sections(cfg: RunConfig) -> None:
    if cfg.command == "sweep" and not cfg.axes:
        raise ConfigError("sweep requires a grid section with axes")
    if cfg.command == "boundary" and not cfg.ray:
        raise ConfigError("boundary requires a ray section")
    if cfg.command == "ed" and "axis" not in cfg.ed:
        raise ConfigError("ed requires an ed.axis section")
    if cfg.command == "selfconsistent" and not cfg.selfconsistent:
        raise ConfigError("selfconsistent requires its parameter section")


def validate_config(path: str) -> List[str]:
    """Schema check plus stability pre-check; returns a list of issues.

    Parse errors come back as single "error: ..." entries instead of
    raising, so the validate command can always print a report. Grid
    corners that violate the stability conditions produce warnings, not
    errors: sweeps are allowed to cover unstable subregions.
    """
    issues: List[str] = []
    try:
        cfg = load_config(path)
    except ConfigError as err:
        return [f"error: {err}"]
    if cfg.command == "sweep":
        corner_values = [
            (values[0], values[-1]) if values.size else ()
            for _, values in cfg.axes
        ]
        names = [name for name, _ in cfg.axes]
        for combo in itertools.product(*corner_values):
            flat = dict(cfg.base_params)
            for name, value in zip(names, combo):
                flat[name] = float(value)
            try:
                corner = _build_model(cfg.model_kind, flat)
            except ValueError:
                issues.append(
                    f"warning: unstable subregion (invalid corner "
                    f"{dict(zip(names, combo))})"
                )
                continue
            stab = stability_check(corner)
            if not stab.stable:
                issues.append(
                    f"warning: unstable subregion at grid corner "
                    f"{dict(zip(names, combo))}: {stab.reason}"
                )
    if cfg.command == "boundary" and cfg.ray:
        direction = cfg.ray["direction"]
        if np.any(np.asarray(direction) < 0.0):
            issues.append("error: ray direction must be nonnegative")
    return issues
