"""Command-line entry point for reproducible file-based runs.

Subcommands: relax | sweep | phonons | spectrum | figdata.  Each reads a
JSON config, validates it completely before computing anything, and
writes CSV files with a provenance comment line.  Identical config and
seed produce byte-identical outputs.

Exit codes: 0 success, 1 usage/config error, 2 non-convergence,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import csvio
from .analytics import cavity_model, weak_lattice
from .continuation import SweepResult, adiabatic_sweep
from .dynamics import (
    DEFAULT_TOL_F,
    DEFAULT_TOL_P,
    default_ext_damping,
    force,
    initial_state,
    relax_to_steady_state,
)
from .errors import (
    ConfigError,
    ConvergenceTimeout,
    DegenerateConfigurationError,
    InvalidStateError,
    SimulationError,
)
from .model import ChainState, SystemParams
from .optics import (
    band_gap_edges,
    chain_spectrum_transfer,
    default_probe_grid,
    spectrum_peak_stats,
)
from .phonons import damping_matrix, normal_modes, stiffness_matrix

_BLOCK_KEYS = {
    "relax": {"seed", "state_csv", "perturbation", "tol_p", "tol_f", "t_max", "mode"},
    "sweep": {"delta_start", "delta_end", "n_steps", "fix_saturation"},
    "phonons": {"state", "state_csv"},
    "spectrum": {"state", "state_csv", "probe_min", "probe_max", "probe_points"},
    "figdata": {"weak_lattice_n", "negative", "positive", "fix_saturation",
                "probe_min", "probe_max", "probe_points"},
}
_SWEEP_BLOCK_KEYS = {"delta_start", "delta_end", "n_steps"}


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(config) - ({"params"} | set(_BLOCK_KEYS)))
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(unknown)}")
    if "params" not in config:
        raise ConfigError("config must contain a 'params' section")
    for name, allowed in _BLOCK_KEYS.items():
        block = config.get(name, {})
        if not isinstance(block, dict):
            raise ConfigError(f"config section '{name}' must be an object")
        bad = sorted(set(block) - allowed)
        if bad:
            raise ConfigError(f"unknown keys in '{name}' section: {', '.join(bad)}")
    return config


def _params_from(config: dict) -> SystemParams:
    return SystemParams.from_dict(config["params"])


def _with_damping(params: SystemParams) -> SystemParams:
    if params.ext_damping > 0.0:
        return params
    return replace(params, ext_damping=default_ext_damping(params))


def _seed_state(params: SystemParams, block: dict, rng) -> ChainState:
    try:
        if "state_csv" in block:
            return csvio.read_state(block["state_csv"])
        seed = block.get("seed", "weak_lattice")
        if seed != "weak_lattice":
            raise ConfigError(f"unknown seed kind {seed!r}")
        z = weak_lattice(params.n_atoms).positions.copy()
        amp = float(block.get("perturbation", 0.0))
        if amp > 0.0:
            z = np.sort(z + rng.uniform(-amp, amp, size=params.n_atoms))
        if z.size > 1 and np.any(np.diff(z) <= 1e-6):
            raise ConfigError("seed places atoms closer than the crossing guard")
        return initial_state(params, z)
    except (InvalidStateError, DegenerateConfigurationError) as exc:
        raise ConfigError(f"invalid seed state (ordering violation): {exc}") from exc


def _state_for_analysis(params: SystemParams, block: dict) -> ChainState:
    if "state_csv" in block:
        path = Path(block["state_csv"])
        if not path.exists():
            raise ConfigError(f"input state file does not exist: {path}")
        return csvio.read_state(path)
    kind = block.get("state", "weak_lattice")
    if kind == "weak_lattice":
        return initial_state(params, weak_lattice(params.n_atoms).positions)
    if kind == "single_atom":
        one = replace(params, n_atoms=1)
        return initial_state(one, np.zeros(1))
    raise ConfigError(f"unknown state kind {kind!r}")


def _probe_grid(block: dict) -> np.ndarray:
    if not ({"probe_min", "probe_max", "probe_points"} & set(block)):
        return default_probe_grid()
    lo = float(block.get("probe_min", -60.0))
    hi = float(block.get("probe_max", 60.0))
    n = int(block.get("probe_points", 601))
    if not (hi > lo and n >= 2):
        raise ConfigError("probe grid needs probe_max > probe_min and >= 2 points")
    return np.linspace(lo, hi, n)


def cmd_relax(config: dict, out: Path, seed: int, threads: int) -> int:
    params = _with_damping(_params_from(config))
    block = config.get("relax", {})
    rng = np.random.default_rng(seed)
    state = _seed_state(params, block, rng)
    tol_p = float(block.get("tol_p", DEFAULT_TOL_P))
    tol_f = float(block.get("tol_f", DEFAULT_TOL_F))
    mode = block.get("mode", "adiabatic")

    f0 = force(params, state.z, state.sigma)
    no_op = bool(np.max(np.abs(state.p), initial=0.0) < tol_p
                 and np.max(np.abs(f0)) < tol_f)
    final = relax_to_steady_state(
        params, state, tol_p=tol_p, tol_f=tol_f,
        t_max=float(block.get("t_max", 2e6)), mode=mode,
    )
    out.mkdir(parents=True, exist_ok=True)
    prov = csvio.provenance_line(config, seed)
    csvio.write_state(out / "relaxed_state.csv", final, prov)
    sigma = final.sigma
    log = {
        "no_op": no_op,
        "max_momentum": float(np.max(np.abs(final.p), initial=0.0)),
        "max_force": float(np.max(np.abs(force(params, final.z, sigma)))),
        "tol_p": tol_p,
        "tol_f": tol_f,
        "ext_damping": params.ext_damping,
        "config_sha256": csvio.config_hash(config),
    }
    (out / "relax_log.json").write_text(json.dumps(log, indent=2, sort_keys=True) + "\n")
    return 0


def _run_sweep(params: SystemParams, block: dict):
    if "delta_start" not in block or "delta_end" not in block:
        raise ConfigError("sweep section requires delta_start and delta_end")
    n_steps = block.get("n_steps")
    fix_s0 = block.get("fix_saturation")
    return adiabatic_sweep(
        params,
        float(block["delta_start"]),
        float(block["delta_end"]),
        n_steps=None if n_steps is None else int(n_steps),
        fix_saturation=None if fix_s0 is None else float(fix_s0),
    )


def cmd_sweep(config: dict, out: Path, seed: int, threads: int) -> int:
    params = _params_from(config)
    result = _run_sweep(params, config.get("sweep", {}))
    out.mkdir(parents=True, exist_ok=True)
    prov = csvio.provenance_line(config, seed, **result.provenance)
    result.to_positions_csv(out / "sweep_positions.csv", prov)
    result.to_summary_csv(out / "sweep_summary.csv", prov)
    return 0


def cmd_phonons(config: dict, out: Path, seed: int, threads: int) -> int:
    params = _params_from(config)
    state = _state_for_analysis(params, config.get("phonons", {}))
    k = stiffness_matrix(params, state.z)
    el = damping_matrix(params, state.z)
    modes = normal_modes(k, el, params)
    out.mkdir(parents=True, exist_ok=True)
    modes.to_csv(out / "phonon_modes.csv", params,
                 provenance=csvio.provenance_line(config, seed))
    return 0


def cmd_spectrum(config: dict, out: Path, seed: int, threads: int) -> int:
    params = _params_from(config)
    block = config.get("spectrum", {})
    state = _state_for_analysis(params, block)
    spec = chain_spectrum_transfer(params, state.z, _probe_grid(block))
    out.mkdir(parents=True, exist_ok=True)
    spec.to_csv(out / "spectrum.csv", csvio.provenance_line(config, seed))
    return 0


def cmd_figdata(config: dict, out: Path, seed: int, threads: int) -> int:
    """Batch-generate the seven CSV files behind the reference figures."""
    params = _params_from(config)
    block = config.get("figdata", {})
    fix_s0 = block.get("fix_saturation", 0.01)
    fix_s0 = None if fix_s0 is None else float(fix_s0)
    neg = {"delta_start": -15.0, "delta_end": -0.1, **block.get("negative", {})}
    pos = {"delta_start": 40.0, "delta_end": 0.25, **block.get("positive", {})}
    for sub in (neg, pos):
        bad = sorted(set(sub) - _SWEEP_BLOCK_KEYS)
        if bad:
            raise ConfigError(f"unknown keys in figdata sweep block: {', '.join(bad)}")
    grid = _probe_grid(block)

    sweeps = [_run_sweep(params, {**sub, "fix_saturation": fix_s0})
              for sub in (neg, pos)]
    records = sorted((rec for sweep in sweeps for rec in sweep.records),
                     key=lambda rec: rec.delta)

    out.mkdir(parents=True, exist_ok=True)
    prov = csvio.provenance_line(config, seed)

    # 1. weak lattice staircase (the N = 10 illustration is conventional)
    n_fig1 = int(block.get("weak_lattice_n", 10))
    wl = weak_lattice(n_fig1)
    csvio.write_csv(out / "fig1c_weak_lattice.csv", ["j", "f_j"],
                    ([j + 1, f] for j, f in enumerate(wl.config.f)), prov)

    # 2./3. positions and summary over both sweeps
    merged = SweepResult(records=list(records), params=params)
    merged.to_positions_csv(out / "sweep_positions.csv", prov)
    merged.to_summary_csv(out / "sweep_summary.csv", prov)

    # 4. phonon modes per record
    def mode_rows(rec):
        step_params = params.detuned(rec.delta)
        if fix_s0 is not None:
            step_params = step_params.with_saturation(fix_s0)
        k = stiffness_matrix(step_params, rec.state.z, check_equilibrium=False)
        el = damping_matrix(step_params, rec.state.z)
        modes = normal_modes(k, el, step_params)
        s0 = step_params.saturation
        norm = np.sqrt(step_params.recoil * s0 * step_params.n_atoms
                       * step_params.gamma_1d)
        return [
            [rec.delta, j, w.real, w.imag, w.real / norm, w.imag / norm]
            for j, w in enumerate(modes.omega)
        ]

    # 5./6. probe spectra per record
    def spectrum_rows(rec):
        spec = chain_spectrum_transfer(params, rec.state.z, grid)
        dp_star, r_max, _ = spectrum_peak_stats(spec)
        map_rows = [
            [rec.delta, dp, refl]
            for dp, refl in zip(spec.delta_p, spec.reflectance)
        ]
        return map_rows, [rec.delta, dp_star, r_max]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_modes = list(pool.map(mode_rows, records))
            all_specs = list(pool.map(spectrum_rows, records))
    else:
        all_modes = [mode_rows(rec) for rec in records]
        all_specs = [spectrum_rows(rec) for rec in records]

    csvio.write_csv(
        out / "phonon_modes.csv",
        ["delta", "j", "re_omega", "im_omega", "re_omega_norm", "im_omega_norm"],
        (row for rows in all_modes for row in rows), prov,
    )
    csvio.write_csv(
        out / "reflectance_map.csv", ["delta", "delta_p", "R"],
        (row for rows, _ in all_specs for row in rows), prov,
    )
    r_peak_model, fwhm_model = cavity_model(params)
    csvio.write_csv(
        out / "peak_reflectance.csv",
        ["delta", "delta_p_star", "r_max", "cavity_r_peak", "cavity_fwhm"],
        ([*peak, r_peak_model, fwhm_model] for _, peak in all_specs), prov,
    )

    # 7. band-gap edges where a single lattice constant exists
    def gap_rows():
        for rec in records:
            eps = 2.0 * np.pi * (1.0 - rec.d_mean)
            edges = band_gap_edges(params, rec.d_mean) \
                if rec.slip.n_segments == 1 and eps > 0.0 else None
            lo, hi = edges if edges is not None else (float("nan"), float("nan"))
            yield [rec.delta, eps, lo, hi]

    import warnings as _warnings
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        csvio.write_csv(out / "bandgap_edges.csv",
                        ["delta", "epsilon", "delta_lo", "delta_hi"], gap_rows(), prov)
    return 0


_COMMANDS = {
    "relax": cmd_relax,
    "sweep": cmd_sweep,
    "phonons": cmd_phonons,
    "spectrum": cmd_spectrum,
    "figdata": cmd_figdata,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomchain",
        description="Self-organized atom chains along a waveguide: "
                    "relaxation, sweeps, phonons and probe spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0, help="RNG seed for perturbations")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        return _COMMANDS[args.command](config, Path(args.out), args.seed,
                                       max(1, args.threads))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceTimeout as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
