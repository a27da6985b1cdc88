"""Command-line runner: deterministic CSV/JSON reports plus figures.

Commands mirror the library layers: sweep and boundary drive the phase
mapper, minimize reports a single potential minimum, ed sweeps the
truncated-Fock diagonalization along one parameter axis, selfconsistent
tabulates the critical hopping. Outputs are byte-identical across runs of
the same config: no RNG, no timestamps, fixed row order, shortest
round-trip float formatting. Each command also renders a PNG companion
figure next to the data file unless plotting is disabled.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .config import COMMANDS, ConfigError, RunConfig, load_config, validate_config
from .fock import EDConfig, build_hamiltonian, lowest_eigenpairs
from .hopping import compare_with_meanfield
from .landau import phi_reduced, reduced_dim
from .models import from_coupling_vector
from .optimizer import minimize
from .phases import (
    _build_model,
    classify,
    radial_boundary,
    sweep,
)
from . import plotting

__all__ = ["main"]

_ORDER_NAMES = {1: "first", 2: "second", None: "none"}


# ======================================================================
# Output writers
# ======================================================================

def _fmt_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(columns: Sequence[str], rows: List[Dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return None
    if isinstance(value, np.floating):
        return _json_safe(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _write_json(
    cfg: RunConfig, columns: Sequence[str], rows: List[Dict[str, Any]]
) -> str:
    payload = {
        "metadata": {
            "tool": "sptlab",
            "version": __version__,
            "command": cfg.command,
            "model_kind": cfg.model_kind,
            "model": {k: _json_safe(v) for k, v in cfg.base_params.items()},
            "beta_omega": cfg.beta_omega,
            "tolerances": dict(cfg.tolerances),
        },
        "columns": list(columns),
        "rows": [
            {col: _json_safe(row.get(col)) for col in columns} for row in rows
        ],
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _emit(
    cfg: RunConfig,
    columns: Sequence[str],
    rows: List[Dict[str, Any]],
    out_path: Optional[str],
) -> Optional[Path]:
    text = (
        _write_csv(columns, rows)
        if cfg.output_format == "csv"
        else _write_json(cfg, columns, rows)
    )
    if out_path is None:
        sys.stdout.write(text)
        return None
    path = Path(out_path)
    path.write_text(text, encoding="utf-8")
    return path


def _plot_path(out_path: Path, suffix: str = "") -> str:
    return str(out_path.with_name(out_path.stem + suffix + ".png"))


# ======================================================================
# Command implementations
# ======================================================================

def _minimize_kwargs(cfg: RunConfig) -> Dict[str, Any]:
    kwargs: Dict[str, Any] = {}
    if "grid_points" in cfg.tolerances:
        kwargs["grid_points"] = int(cfg.tolerances["grid_points"])
    if "grid_half_width" in cfg.tolerances:
        kwargs["grid_half_width"] = cfg.tolerances["grid_half_width"]
    return kwargs


def _run_sweep(cfg: RunConfig, out_path: Optional[str], workers: int) -> Tuple[int, List[Dict], List[str], Optional[Path]]:
    points = sweep(
        cfg.model_kind,
        cfg.base_params,
        cfg.axes,
        cfg.beta_omega,
        workers=workers,
        **_minimize_kwargs(cfg),
    )
    param_cols = list(cfg.base_params)
    columns = param_cols + ["phase", "order_parameter", "free_energy", "error"]
    rows = [
        {
            **pp.params,
            "phase": pp.phase,
            "order_parameter": pp.order_parameter,
            "free_energy": pp.phi,
            "error": "",
        }
        for pp in points
    ]
    written = _emit(cfg, columns, rows, out_path)
    if written is not None and cfg.plot and rows:
        plotting.plot_sweep(rows, [name for name, _ in cfg.axes], _plot_path(written))
    return 0, rows, columns, written


def _run_boundary(cfg: RunConfig, out_path: Optional[str]) -> Tuple[int, List[Dict], List[str], Optional[Path]]:
    ray = cfg.ray
    t_tol = cfg.tolerances.get("t_tol", ray.get("t_tol", 1.0e-6))
    crossing = radial_boundary(
        cfg.model_kind,
        ray["direction"],
        ray["max_magnitude"],
        cfg.beta_omega,
        t_tol=t_tol,
        **_minimize_kwargs(cfg),
    )
    direction = crossing.direction
    row = {
        "kind": cfg.model_kind,
        "direction": " ".join(repr(float(c)) for c in direction),
        "critical_magnitude": crossing.t_c,
        "order": _ORDER_NAMES[crossing.order],
        "z_c_squared": crossing.jump,
        "error": "",
    }
    columns = ["kind", "direction", "critical_magnitude", "order", "z_c_squared", "error"]
    written = _emit(cfg, columns, [row], out_path)
    if written is not None and cfg.plot:
        ts = np.linspace(0.0, ray["max_magnitude"], 200)[1:]
        order_params = np.array(
            [
                minimize(
                    from_coupling_vector(cfg.model_kind, t * direction),
                    cfg.beta_omega,
                ).order_parameter
                for t in ts
            ]
        )
        plotting.plot_boundary(ts, order_params, crossing.t_c, _plot_path(written))
    return 0, [row], columns, written


def _run_minimize(cfg: RunConfig, out_path: Optional[str]) -> Tuple[int, List[Dict], List[str], Optional[Path]]:
    pp = classify(cfg.model, cfg.beta_omega, **_minimize_kwargs(cfg))
    row: Dict[str, Any] = dict(pp.params)
    row["phase"] = pp.phase
    row["order_parameter"] = pp.order_parameter
    row["free_energy"] = pp.phi
    z = pp.z_min if pp.z_min is not None else []
    for i, zi in enumerate(z, start=1):
        row[f"z_{i}"] = float(zi)
    row["degenerate"] = pp.degenerate
    row["error"] = ""
    columns = list(row)
    written = _emit(cfg, columns, [row], out_path)
    if written is not None and cfg.plot and pp.z_min is not None:
        model = cfg.model
        d = reduced_dim(model)
        x_min = np.asarray(pp.z_min[: model.z_dim // 2], dtype=float)[:d]
        if model.kind == "anisotropic_rabi_stark":
            x_min = np.asarray(pp.z_min, dtype=float)
        lead = float(np.max(np.abs(x_min)))
        span = max(2.5 * lead, 1.0)
        xs = np.linspace(-span, span, 401)
        cuts = np.tile(x_min, (xs.size, 1))
        cuts[:, 0] = xs
        phis = phi_reduced(model, cuts, cfg.beta_omega)
        plotting.plot_minimize(
            xs, phis, float(x_min[0]), pp.phi, _plot_path(written)
        )
    return 0, [row], columns, written


def _run_ed(cfg: RunConfig, out_path: Optional[str]) -> Tuple[int, List[Dict], List[str], Optional[Path]]:
    ed = cfg.ed
    axis_name, axis_values = ed["axis"]
    if axis_name not in cfg.base_params:
        raise ConfigError(f"ed axis {axis_name!r} is not a model parameter")
    ed_cfg = EDConfig(
        eta=ed.get("eta", 200.0),
        n_cut=int(ed.get("n_cut", 40)),
        n_levels=max(2, int(ed.get("n_levels", 4))),
        max_dim=int(ed.get("max_dim", 200_000)),
    )
    n_modes = (
        cfg.model.n_modes if cfg.model_kind == "multimode_dicke12" else 1
    )
    photon_cols = [f"photon_{m}" for m in range(1, n_modes + 1)]
    columns = [axis_name, "e0", "e1", "gap"] + photon_cols + ["parity_0", "error"]
    rows: List[Dict[str, Any]] = []
    n_errors = 0
    for value in axis_values:
        flat = dict(cfg.base_params)
        flat[axis_name] = float(value)
        row: Dict[str, Any] = {axis_name: float(value), "error": ""}
        try:
            model = _build_model(cfg.model_kind, flat)
            h, basis = build_hamiltonian(
                model,
                ed_cfg,
                rsh_variant=ed.get("rsh_variant", "bare"),
                psi=float(ed.get("psi", 0.0)),
            )
            res = lowest_eigenpairs(h, basis, ed_cfg.n_levels)
            row["e0"] = float(res.energies[0])
            row["e1"] = float(res.energies[1])
            row["gap"] = float(res.energies[1] - res.energies[0])
            for m, col in enumerate(photon_cols):
                row[col] = float(res.photon_numbers[0, m])
            row["parity_0"] = (
                float(res.parity[0]) if res.parity is not None else None
            )
        except (ValueError, RuntimeError) as err:
            n_errors += 1
            row["error"] = str(err)
            for col in ("e0", "e1", "gap", *photon_cols):
                row[col] = math.nan
            row["parity_0"] = None
        rows.append(row)
    written = _emit(cfg, columns, rows, out_path)
    if written is not None and cfg.plot:
        plotting.plot_ed(rows, axis_name, n_modes, _plot_path(written))
    return (1 if n_errors else 0), rows, columns, written


def _run_selfconsistent(cfg: RunConfig, out_path: Optional[str]) -> Tuple[int, List[Dict], List[str], Optional[Path]]:
    sc = cfg.selfconsistent
    ed_cfg = EDConfig(eta=sc["eta"], n_cut=sc["n_cut"], n_levels=2)
    columns = ["gamma", "j_spectral", "j_meanfield", "relative_difference", "error"]
    rows: List[Dict[str, Any]] = []
    n_errors = 0
    for gamma in sc["gamma"]:
        try:
            (cmp_row,) = compare_with_meanfield([float(gamma)], sc["u_tilde"], ed_cfg)
            rows.append(
                {
                    "gamma": cmp_row.gamma,
                    "j_spectral": cmp_row.j_spectral,
                    "j_meanfield": cmp_row.j_meanfield,
                    "relative_difference": cmp_row.relative_difference,
                    "error": "",
                }
            )
        except (ValueError, RuntimeError) as err:
            n_errors += 1
            rows.append(
                {
                    "gamma": float(gamma),
                    "j_spectral": math.nan,
                    "j_meanfield": math.nan,
                    "relative_difference": math.nan,
                    "error": str(err),
                }
            )
    written = _emit(cfg, columns, rows, out_path)
    if written is not None and cfg.plot:
        plotting.plot_selfconsistent(rows, _plot_path(written))
    return (1 if n_errors else 0), rows, columns, written


# ======================================================================
# Entry point
# ======================================================================

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spt",
        description=(
            "Phase-diagram engine for superradiant phase transitions: "
            "mean-field sweeps, radial boundary tracing, truncated-Fock "
            "diagonalization, and the self-consistent hopping criterion."
        ),
    )
    parser.add_argument("--version", action="version", version=f"spt {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS + ("validate",):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        if name != "validate":
            p.add_argument("--out", default=None, help="output file path")
            p.add_argument("--workers", type=int, default=None)
            p.add_argument(
                "--plot",
                action=argparse.BooleanOptionalAction,
                default=None,
                help="render a PNG figure next to the output file",
            )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.subcommand == "validate":
        issues = validate_config(args.config)
        if not issues:
            print("ok")
        for issue in issues:
            print(issue)
        return 0

    try:
        cfg = load_config(args.config)
        if cfg.command != args.subcommand:
            raise ConfigError(
                f"config declares command {cfg.command!r} but "
                f"{args.subcommand!r} was invoked"
            )
        out_path = args.out if args.out is not None else cfg.output_path
        if args.plot is not None:
            cfg.plot = args.plot
        workers = args.workers if args.workers is not None else cfg.workers

        if cfg.command == "sweep":
            status, _, _, _ = _run_sweep(cfg, out_path, workers)
        elif cfg.command == "boundary":
            status, _, _, _ = _run_boundary(cfg, out_path)
        elif cfg.command == "minimize":
            status, _, _, _ = _run_minimize(cfg, out_path)
        elif cfg.command == "ed":
            status, _, _, _ = _run_ed(cfg, out_path)
        else:
            status, _, _, _ = _run_selfconsistent(cfg, out_path)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if status:
        print("completed with row-level errors", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
