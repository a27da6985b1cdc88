"""Figure rendering for the command-line runner.

Each report command can drop a PNG next to its delimited output. The
figures are diagnostic companions to the data files, not publication
graphics: phase maps as colored scatter, spectra and photon numbers as
line plots, boundary scans as order-parameter curves with the located
crossing marked.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_sweep",
    "plot_boundary",
    "plot_minimize",
    "plot_ed",
    "plot_selfconsistent",
]

_PHASE_COLORS = {
    "NP": "#4878cf",
    "SP": "#d65f5f",
    "SP_u": "#ee854a",
    "SP_v": "#6acc64",
    "unstable": "#808080",
    "error": "#000000",
}


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep(rows: List[Dict], axes_names: Sequence[str], path: str) -> Optional[str]:
    """Phase map of a sweep: scatter for two axes, curve for one."""
    if not rows or not axes_names:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if len(axes_names) >= 2:
        xname, yname = axes_names[0], axes_names[1]
        for phase, color in _PHASE_COLORS.items():
            xs = [r[xname] for r in rows if r["phase"] == phase]
            ys = [r[yname] for r in rows if r["phase"] == phase]
            if xs:
                ax.scatter(xs, ys, s=9, c=color, label=phase, marker="s")
        ax.set_xlabel(xname)
        ax.set_ylabel(yname)
        ax.legend(loc="best", fontsize=8)
        ax.set_title("phase map")
    else:
        xname = axes_names[0]
        xs = [r[xname] for r in rows]
        ys = [r["order_parameter"] for r in rows]
        ax.plot(xs, ys, "-", color=_PHASE_COLORS["SP"])
        ax.set_xlabel(xname)
        ax.set_ylabel("order parameter")
        ax.set_title("order parameter along sweep")
    return _finish(fig, path)


def plot_boundary(
    ts: np.ndarray, order_params: np.ndarray, t_c: Optional[float], path: str
) -> str:
    """Order parameter along the scanned ray with the crossing marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(ts, order_params, "-", color=_PHASE_COLORS["SP"])
    if t_c is not None:
        ax.axvline(t_c, color="k", linestyle="--", linewidth=1.0,
                   label=f"crossing t={t_c:.6f}")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("ray magnitude t")
    ax.set_ylabel("order parameter")
    ax.set_title("radial boundary scan")
    return _finish(fig, path)


def plot_minimize(
    xs: np.ndarray, phis: np.ndarray, x_min: float, phi_min: float, path: str
) -> str:
    """One-dimensional cut of the potential through the minimum."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(xs, phis, "-", color=_PHASE_COLORS["NP"])
    ax.plot([x_min], [phi_min], "o", color=_PHASE_COLORS["SP"],
            label=f"minimum ({x_min:.4f}, {phi_min:.6f})")
    ax.set_xlabel("displacement u (leading axis)")
    ax.set_ylabel("potential")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("potential cut through the minimum")
    return _finish(fig, path)


def plot_ed(rows: List[Dict], axis_name: str, n_modes: int, path: str) -> Optional[str]:
    """Spectrum and photon numbers along the ED sweep axis."""
    good = [r for r in rows if not r.get("error")]
    if not good:
        return None
    xs = [r[axis_name] for r in good]
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.0, 6.5), sharex=True)
    ax0.plot(xs, [r["e0"] for r in good], "-", label="E0")
    ax0.plot(xs, [r["e1"] for r in good], "--", label="E1")
    ax0.set_ylabel("energy")
    ax0.legend(loc="best", fontsize=8)
    for m in range(1, n_modes + 1):
        ax1.plot(xs, [r[f"photon_{m}"] for r in good], "-",
                 label=f"mode {m} photons/eta")
    ax1.set_xlabel(axis_name)
    ax1.set_ylabel("rescaled photons")
    ax1.legend(loc="best", fontsize=8)
    ax0.set_title("spectrum and ground-state photons")
    return _finish(fig, path)


def plot_selfconsistent(rows: List[Dict], path: str) -> Optional[str]:
    """Spectral and mean-field critical hopping curves."""
    good = [r for r in rows if not r.get("error")]
    if not good:
        return None
    xs = [r["gamma"] for r in good]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(xs, [r["j_spectral"] for r in good], "-", label="spectral")
    mf = [(x, r["j_meanfield"]) for x, r in zip(xs, good)
          if not np.isnan(r["j_meanfield"])]
    if mf:
        ax.plot([p[0] for p in mf], [p[1] for p in mf], "--", label="mean field")
    ax.set_xlabel("gamma")
    ax.set_ylabel("critical hopping")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("self-consistent critical hopping")
    return _finish(fig, path)
