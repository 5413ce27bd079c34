"""Strict readers for the simulation CSV files.

Every file is expected to carry an optional '#' provenance comment, then a
header row that must match the documented schema exactly; anything else is
a hard error so stale or foreign files cannot silently produce figures.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SCHEMAS = {
    "fig1c_weak_lattice.csv": ["j", "f_j"],
    "sweep_positions.csv": ["delta", "j", "f_j"],
    "sweep_summary.csv": ["delta", "d_central", "d_mean", "d_eff", "pop_norm",
                          "n_segments", "delta_f"],
    "phonon_modes.csv": ["delta", "j", "re_omega", "im_omega",
                         "re_omega_norm", "im_omega_norm"],
    "reflectance_map.csv": ["delta", "delta_p", "R"],
    "peak_reflectance.csv": ["delta", "delta_p_star", "r_max",
                             "cavity_r_peak", "cavity_fwhm"],
    "bandgap_edges.csv": ["delta", "epsilon", "delta_lo", "delta_hi"],
}


class SchemaError(RuntimeError):
    """Input CSV is missing, empty, or has an unexpected header."""


def load_columns(csv_dir, name) -> dict[str, np.ndarray]:
    """Read one schema-checked CSV into named float columns."""
    path = Path(csv_dir) / name
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header, data = rows[0], rows[1:]
    expect = SCHEMAS[name]
    if header != expect:
        raise SchemaError(f"{path}: header {header} does not match schema {expect}")
    if not data:
        raise SchemaError(f"{path}: no data rows")
    arr = np.array([[float(v) for v in row] for row in data])
    return {col: arr[:, i] for i, col in enumerate(expect)}
