"""Adiabatic detuning sweeps and configuration analysis.

A stable branch of self-organized configurations is tracked by stepping
the pump detuning in small increments, relaxing to steady state at each
step with the previous solution as the seed.  The sweep starts from the
weak-scattering lattice, which is the known solution at large detuning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import csvio
from .analytics import effective_lattice_constant, weak_lattice
from .coherence import excited_population
from .dynamics import default_ext_damping, initial_state, relax_to_steady_state
from .errors import ConvergenceTimeout, OrderingViolationError
from .model import ChainState, FractionalConfig, SystemParams, fractional_positions


def crossover_detuning(params: SystemParams) -> float:
    """Scale N gamma_1d / 2 pi of the crossover into the superradiant regime.

    An order-of-magnitude estimate, not a sharp threshold: it is the
    positive detuning at which the dispersively expanding lattice would
    reach the resonant spacing.
    """
    return params.n_atoms * params.gamma_1d / (2.0 * math.pi)


def lattice_constant(state) -> tuple[float, float]:
    """Lattice-constant estimates (central pair, all-atom mean) in lambda0."""
    z = state.z if isinstance(state, ChainState) else np.asarray(state, dtype=float)
    if z.size < 2:
        raise ValueError("need at least 2 atoms for a lattice constant")
    mid = z.size // 2
    return float(z[mid] - z[mid - 1]), float(np.mean(np.diff(z)))


@dataclass(frozen=True)
class PhaseSlipDescriptor:
    """Segmentation of a configuration at large wrapped jumps of f."""

    boundaries: tuple[int, ...]      # jump between atoms i and i+1 (0-based i)
    segment_means: tuple[float, ...]
    delta_f: tuple[float, ...]       # wrapped jump at each boundary, in (-0.5, 0.5]

    @property
    def n_segments(self) -> int:
        return len(self.segment_means)


def _wrap_half(x: np.ndarray) -> np.ndarray:
    """Wrap to the representative in (-0.5, 0.5]."""
    return x - np.ceil(x - 0.5)


def detect_phase_slip(config: FractionalConfig, jump_threshold: float = 0.1
                      ) -> PhaseSlipDescriptor:
    """Split the chain where neighbouring f_j jump by more than the threshold.

    Jumps are measured after wrapping f_{j+1} - f_j into (-0.5, 0.5], so a
    smooth staircase passing through 1 does not fragment.  The reported
    delta_f is the wrapped jump at each boundary; a fully regular lattice
    yields a single segment and no boundaries.
    """
    if not 0.0 < jump_threshold < 0.5:
        raise ValueError("jump_threshold must lie in (0, 0.5)")
    f = config.f
    if f.size < 2:
        return PhaseSlipDescriptor((), (float(np.mean(f)),) if f.size else (), ())
    jumps = _wrap_half(np.diff(f))
    boundaries = tuple(int(i) for i in np.flatnonzero(np.abs(jumps) > jump_threshold))
    edges = (0, *[b + 1 for b in boundaries], f.size)
    means = tuple(float(np.mean(f[a:b])) for a, b in zip(edges[:-1], edges[1:]))
    delta_f = tuple(float(jumps[b]) for b in boundaries)
    return PhaseSlipDescriptor(boundaries, means, delta_f)


@dataclass(frozen=True)
class SweepRecord:
    """Converged configuration and diagnostics at one pump detuning."""

    delta: float
    config: FractionalConfig
    state: ChainState
    population_norm: float           # mean |sigma|^2 / s0
    d_central: float
    d_mean: float
    slip: PhaseSlipDescriptor


@dataclass
class SweepResult:
    """Ordered sweep records plus provenance of how they were produced."""

    records: list[SweepRecord]
    params: SystemParams
    provenance: dict = field(default_factory=dict)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([rec.delta for rec in self.records])

    def record_at(self, delta: float) -> SweepRecord:
        """Record with detuning closest to the requested value."""
        return self.records[int(np.argmin(np.abs(self.deltas - delta)))]

    def to_positions_csv(self, path, provenance: str = ""):
        header = ["delta", "j", "f_j"]
        rows = (
            [rec.delta, j + 1, rec.config.f[j]]
            for rec in self.records
            for j in range(rec.config.n)
        )
        return csvio.write_csv(path, header, rows, provenance)

    def to_summary_csv(self, path, provenance: str = ""):
        header = ["delta", "d_central", "d_mean", "d_eff", "pop_norm",
                  "n_segments", "delta_f"]

        def summary_rows():
            for rec in self.records:
                d_eff = effective_lattice_constant(self.params, rec.delta)[2]
                main_slip = (
                    rec.slip.delta_f[int(np.argmax(np.abs(rec.slip.delta_f)))]
                    if rec.slip.delta_f else float("nan")
                )
                yield [rec.delta, rec.d_central, rec.d_mean, d_eff,
                       rec.population_norm, rec.slip.n_segments, main_slip]

        return csvio.write_csv(path, header, summary_rows(), provenance)


def default_detuning_grid(delta_start: float, delta_end: float,
                          coarse: float = 0.5, fine: float = 0.05,
                          refine_below: float = 2.0) -> np.ndarray:
    """Sweep grid with coarse steps far from resonance, fine steps within
    |delta| <= refine_below, always including both endpoints."""
    if delta_start == delta_end:
        return np.array([delta_start])
    sign = 1.0 if delta_end > delta_start else -1.0
    grid = [delta_start]
    while True:
        here = grid[-1]
        step = fine if abs(here) <= refine_below + 1e-12 else coarse
        nxt = here + sign * step
        # land exactly on the fine-grid boundary instead of stepping over it
        if abs(here) > refine_below and abs(nxt) < refine_below:
            nxt = math.copysign(refine_below, here)
        if (nxt - delta_end) * sign >= -1e-9:
            grid.append(delta_end)
            return np.array(grid)
        grid.append(nxt)


def adiabatic_sweep(params: SystemParams, delta_start: float, delta_end: float,
                    n_steps: int | None = None, *,
                    seed_state: ChainState | None = None,
                    fix_saturation: float | None = None,
                    grid=None, relax_options: dict | None = None) -> SweepResult:
    """Track the stable configuration branch from delta_start to delta_end.

    Each grid point is relaxed to steady state seeded by the previous
    converged state; the first point is seeded from the weak-scattering
    lattice (or ``seed_state``).  ``n_steps`` selects a uniform grid;
    otherwise the default coarse/fine grid is used.  ``fix_saturation``
    rescales the pump so s0 stays at the given value along the sweep: in
    the linear regime this only rescales the relaxation timescale, never
    the configurations.  If params.ext_damping is 0, a recommended value
    is substituted at every step.
    """
    if n_steps is not None:
        if n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        deltas = np.linspace(delta_start, delta_end, n_steps)
    elif grid is not None:
        deltas = np.asarray(grid, dtype=float)
    else:
        deltas = default_detuning_grid(delta_start, delta_end)
    if abs(delta_start) < params.n_atoms * params.gamma_1d:
        warnings.warn(
            f"sweep starts at |delta| = {abs(delta_start):g} < N gamma_1d = "
            f"{params.n_atoms * params.gamma_1d:g}; the weak-scattering seed "
            "may be far from the true branch",
            stacklevel=2,
        )
    relax_options = dict(relax_options or {})
    relax_options.setdefault("t_max", 1.5e5)

    records: list[SweepRecord] = []
    state = seed_state
    for delta in deltas:
        step_params = params.detuned(float(delta))
        if fix_saturation is not None:
            step_params = step_params.with_saturation(fix_saturation)
        if step_params.ext_damping == 0.0:
            step_params = replace(step_params, ext_damping=default_ext_damping(step_params))
        if state is None:
            state = initial_state(step_params, weak_lattice(params.n_atoms).positions)
        # anti-damping near the superradiant crossover can exceed the default
        # gamma_e and sustain a limit cycle, and an off-branch transient can
        # even drive atoms toward a crossing; retry with escalated damping,
        # which cannot bias the equilibrium (the stationary points are
        # gamma_e-independent)
        step_seed = state
        for attempt in range(3):
            attempt_params = replace(
                step_params, ext_damping=step_params.ext_damping * 5.0**attempt
            )
            try:
                state = relax_to_steady_state(attempt_params, state, **relax_options)
                break
            except ConvergenceTimeout as exc:
                # continue from wherever the timed-out attempt got
                state = exc.state if exc.state is not None else step_seed
                if attempt == 2:
                    raise ConvergenceTimeout(
                        f"sweep failed to converge at delta = {delta:g}: {exc}",
                        metrics={**exc.metrics, "delta": float(delta)},
                        state=exc.state,
                    ) from exc
            except OrderingViolationError:
                if attempt == 2:
                    raise
                state = step_seed
        config = fractional_positions(state.z)
        d_c, d_m = lattice_constant(state)
        records.append(SweepRecord(
            delta=float(delta),
            config=config,
            state=state.copy(),
            population_norm=excited_population(state.sigma, step_params),
            d_central=d_c,
            d_mean=d_m,
            slip=detect_phase_slip(config),
        ))
    direction = "toward_resonance" if abs(delta_end) < abs(delta_start) else "away_from_resonance"
    side = "negative" if delta_end < 0 else "positive"
    return SweepResult(
        records=records,
        params=params,
        provenance={
            "delta_start": float(delta_start),
            "delta_end": float(delta_end),
            "n_points": int(deltas.size),
            "direction": f"{direction}_{side}_side",
            "fix_saturation": fix_saturation,
            "seed_config": "weak_lattice" if seed_state is None else "caller_state",
        },
    )
