"""End-to-end: regenerate every panel from a real simulation run.

Drives the atomchain CLI (the only interface this package consumes)
on a reduced-size configuration, then renders all panels from the
resulting CSV files.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from figscripts import PANELS, render
from figscripts.csvdata import SCHEMAS, load_columns


@pytest.fixture(scope="session")
def figdata_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("figdata")
    config = {
        "params": {
            "n_atoms": 16,
            "gamma_1d": 0.25,
            "rabi": 0.05,
            "pump_detuning": -12.0,
            "recoil": 1e-3,
            "ext_damping": 0.0,
        },
        "figdata": {
            "weak_lattice_n": 10,
            "negative": {"delta_start": -12.0, "delta_end": -4.0, "n_steps": 5},
            "positive": {"delta_start": 6.0, "delta_end": 0.5, "n_steps": 10},
            "fix_saturation": 0.01,
            "probe_min": -10.0, "probe_max": 10.0, "probe_points": 81,
        },
    }
    cfg = root / "config.json"
    cfg.write_text(json.dumps(config))
    out = root / "csv"
    proc = subprocess.run(
        [sys.executable, "-m", "atomchain.cli", "figdata",
         "--config", str(cfg), "--out", str(out), "--seed", "0"],
        capture_output=True, text=True, timeout=900,
    )
    assert proc.returncode == 0, proc.stderr
    return out


def test_figdata_produces_all_schema_files(figdata_dir):
    assert len(SCHEMAS) == 7
    for name in SCHEMAS:
        cols = load_columns(figdata_dir, name)  # raises on schema mismatch
        assert next(iter(cols.values())).size > 0


def test_all_panels_render_from_pipeline_output(figdata_dir, tmp_path):
    out = tmp_path / "figs"
    rendered = [render(panel, figdata_dir, out) for panel in sorted(PANELS)]
    assert len(rendered) == 8
    for path in rendered:
        assert path.exists() and path.stat().st_size > 1000


def test_fig1c_pixels_encode_the_analytic_staircase(figdata_dir, tmp_path):
    # render once from the pipeline CSV and once from a file holding the
    # analytic values 1 - (j-1)/20; identical pixels prove the pipeline
    # panel encodes exactly those numbers
    cols = load_columns(figdata_dir, "fig1c_weak_lattice.csv")
    analytic = 1.0 - np.arange(10) / 20.0
    assert cols["f_j"] == pytest.approx(analytic, abs=0.0)

    ref_dir = tmp_path / "ref_csv"
    ref_dir.mkdir()
    lines = ["# provenance: analytic reference", "j,f_j"]
    lines += [f"{j + 1},{float(value)!r}" for j, value in enumerate(analytic)]
    (ref_dir / "fig1c_weak_lattice.csv").write_text("\n".join(lines) + "\n")

    got = render("1c", figdata_dir, tmp_path / "a")
    ref = render("1c", ref_dir, tmp_path / "b")
    assert got.read_bytes() == ref.read_bytes()
