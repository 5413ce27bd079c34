"""The figure panels, one renderer per panel.

Renderers are read-only consumers of the CSV files: no physics is
recomputed here, and analytic overlay curves (effective lattice constant,
band-gap edges, cavity reflectance) come from dedicated CSV columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvdata import load_columns


@dataclass(frozen=True)
class FigureSpec:
    panel: str
    inputs: tuple[str, ...]
    render: Callable
    description: str


def _save(fig, out_dir, panel) -> Path:
    out = Path(out_dir) / f"fig{panel}.png"
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def render_1c(csv_dir, out_dir):
    cols = load_columns(csv_dir, "fig1c_weak_lattice.csv")
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.plot(cols["j"], cols["f_j"], "o-", color="tab:blue", ms=5)
    ax.set_xlabel("atom index $j$")
    ax.set_ylabel("$f_j$")
    ax.set_ylim(0.0, 1.05)
    ax.set_xticks(cols["j"])
    ax.set_title("weak-scattering staircase")
    ax.grid(alpha=0.3)
    return _save(fig, out_dir, "1c")


_PANEL_2A_TARGETS = (-15.0, -1.0, -0.2, 0.0, 0.5, 6.0)


def render_2a(csv_dir, out_dir):
    cols = load_columns(csv_dir, "sweep_positions.csv")
    deltas = np.unique(cols["delta"])
    chosen = sorted({float(deltas[np.argmin(np.abs(deltas - t))])
                     for t in _PANEL_2A_TARGETS})
    fig, axes = plt.subplots(1, len(chosen), figsize=(2.2 * len(chosen), 2.8),
                             sharey=True)
    axes = np.atleast_1d(axes)
    for ax, d in zip(axes, chosen):
        sel = cols["delta"] == d
        ax.plot(cols["j"][sel], cols["f_j"][sel], ".", ms=2.5)
        ax.set_title(f"$\\delta = {d:+.2f}\\,\\Gamma$", fontsize=9)
        ax.set_xlabel("$j$", fontsize=9)
        ax.set_ylim(0.0, 1.05)
    axes[0].set_ylabel("$f_j$")
    return _save(fig, out_dir, "2a")


def render_2b(csv_dir, out_dir):
    cols = load_columns(csv_dir, "sweep_positions.csv")
    j_all = np.unique(cols["j"])
    shown = j_all[np.linspace(0, j_all.size - 1, min(16, j_all.size)).astype(int)]
    fig, ax = plt.subplots(figsize=(5.5, 3.4))
    for j in shown:
        sel = cols["j"] == j
        order = np.argsort(cols["delta"][sel])
        ax.plot(cols["delta"][sel][order], cols["f_j"][sel][order],
                ".", ms=2, color="tab:blue")
    ax.set_xlabel("pump detuning $\\delta/\\Gamma$")
    ax.set_ylabel("$f_j$")
    ax.set_title("positions vs pump detuning (16 representative atoms)")
    return _save(fig, out_dir, "2b")


def render_2c(csv_dir, out_dir):
    cols = load_columns(csv_dir, "sweep_summary.csv")
    neg = cols["delta"] < 0
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(cols["delta"][neg], cols["d_central"][neg], "o", ms=4, mfc="none",
            label="central pair")
    ax.plot(cols["delta"][neg], cols["d_mean"][neg], "x", ms=4,
            label="all-atom mean")
    order = np.argsort(cols["delta"][neg])
    ax.plot(cols["delta"][neg][order], cols["d_eff"][neg][order], "-",
            color="k", lw=1, label="effective-index model")
    ax.set_xlabel("pump detuning $\\delta/\\Gamma$")
    ax.set_ylabel("lattice constant $d/\\lambda_0$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, out_dir, "2c")


def render_3a(csv_dir, out_dir):
    cols = load_columns(csv_dir, "sweep_summary.csv")
    order = np.argsort(cols["delta"])
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(cols["delta"][order], cols["pop_norm"][order], ".-", ms=3)
    ax.axhline(1.0, ls="--", color="k", lw=0.8)
    ax.set_xlabel("pump detuning $\\delta/\\Gamma$")
    ax.set_ylabel("$\\langle|\\sigma_{ge}|^2\\rangle / s_0$")
    ax.set_yscale("log")
    ax.grid(alpha=0.3)
    return _save(fig, out_dir, "3a")


def render_3b(csv_dir, out_dir):
    cols = load_columns(csv_dir, "phonon_modes.csv")
    fig, ax = plt.subplots(figsize=(5.5, 3.4))
    ax.plot(cols["delta"], cols["re_omega_norm"], "+", ms=3, color="k",
            label="$\\omega_{ph}$")
    deltas = np.unique(cols["delta"])
    gmax = np.array([np.max(cols["im_omega_norm"][cols["delta"] == d])
                     for d in deltas])
    ax.plot(deltas, 10.0 * gmax, "x", ms=4, color="tab:green",
            label="$10\\,\\gamma_{max}$")
    ax.set_xlabel("pump detuning $\\delta/\\Gamma$")
    ax.set_ylabel("modes / $\\sqrt{\\omega_r s_0 N \\Gamma_{1D}}$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, out_dir, "3b")


def render_4a(csv_dir, out_dir):
    cols = load_columns(csv_dir, "reflectance_map.csv")
    edges = load_columns(csv_dir, "bandgap_edges.csv")
    deltas = np.unique(cols["delta"])
    probes = np.unique(cols["delta_p"])
    grid = np.full((probes.size, deltas.size), np.nan)
    di = np.searchsorted(deltas, cols["delta"])
    pi = np.searchsorted(probes, cols["delta_p"])
    grid[pi, di] = cols["R"]
    fig, ax = plt.subplots(figsize=(5.8, 3.8))
    mesh = ax.pcolormesh(deltas, probes, grid, shading="nearest",
                         cmap="inferno", vmin=0.0, vmax=1.0)
    fig.colorbar(mesh, ax=ax, label="reflectance")
    ok = np.isfinite(edges["delta_lo"])
    order = np.argsort(edges["delta"][ok])
    ax.plot(edges["delta"][ok][order], edges["delta_lo"][ok][order],
            "--", color="tab:blue", lw=1)
    ax.plot(edges["delta"][ok][order], edges["delta_hi"][ok][order],
            "--", color="tab:blue", lw=1)
    ax.set_xlabel("pump detuning $\\delta/\\Gamma$")
    ax.set_ylabel("probe detuning $\\delta_p/\\Gamma$")
    return _save(fig, out_dir, "4a")


def render_4b(csv_dir, out_dir):
    cols = load_columns(csv_dir, "peak_reflectance.csv")
    order = np.argsort(cols["delta"])
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(cols["delta"][order], cols["r_max"][order], ".-", ms=4)
    ax.axhline(cols["cavity_r_peak"][0], ls="--", color="tab:red", lw=1,
               label="two-mirror cavity model")
    ax.set_xlabel("pump detuning $\\delta/\\Gamma$")
    ax.set_ylabel("peak reflectance")
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, out_dir, "4b")


PANELS = {
    spec.panel: spec
    for spec in (
        FigureSpec("1c", ("fig1c_weak_lattice.csv",), render_1c,
                   "fractional-position staircase of the weak lattice"),
        FigureSpec("2a", ("sweep_positions.csv",), render_2a,
                   "configurations at selected pump detunings"),
        FigureSpec("2b", ("sweep_positions.csv",), render_2b,
                   "positions versus pump detuning"),
        FigureSpec("2c", ("sweep_summary.csv",), render_2c,
                   "lattice constant versus detuning with the dispersive model"),
        FigureSpec("3a", ("sweep_summary.csv",), render_3a,
                   "normalized excited population versus detuning"),
        FigureSpec("3b", ("phonon_modes.csv",), render_3b,
                   "phonon frequencies and max anti-damping versus detuning"),
        FigureSpec("4a", ("reflectance_map.csv", "bandgap_edges.csv"), render_4a,
                   "reflectance map with band-gap edges"),
        FigureSpec("4b", ("peak_reflectance.csv",), render_4b,
                   "peak reflectance versus detuning with the cavity model"),
    )
}


def render(panel, csv_dir, out_dir) -> Path:
    """Render one panel from its CSVs; raises SchemaError on bad inputs."""
    if panel not in PANELS:
        raise KeyError(f"unknown panel {panel!r}; have {sorted(PANELS)}")
    return PANELS[panel].render(csv_dir, out_dir)
