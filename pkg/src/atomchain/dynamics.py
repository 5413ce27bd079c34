"""Optical forces and time integration of the coupled motion equations.

The full flow evolves (z, p, sigma) together; the adiabatic-elimination
mode replaces sigma by its instantaneous steady state at every stage,
which is accurate whenever omega_r << Gamma and is vastly cheaper for
relaxation runs.  An external momentum damping -gamma_e * p is available
to absorb the energy pumped in by delayed-coherence anti-damping so the
chain can settle into a stationary configuration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import csvio
from .coherence import build_coupling_matrix, solve_instantaneous
from .errors import (
    ConvergenceTimeout,
    DegenerateConfigurationError,
    DivergenceError,
    OrderingViolationError,
    ParameterDomainError,
)
from .model import TWO_PI, ChainState, SystemParams, nondimensional_velocity_factor

MIN_GAP = 1e-6          # atoms closer than this (in lambda0) count as crossing
DEFAULT_TOL_P = 1e-6    # hbar k0
DEFAULT_TOL_F = 1e-8    # hbar k0 Gamma


def force(params: SystemParams, z, sigma) -> np.ndarray:
    """Guided-mode optical force on each atom, in units of hbar k0 Gamma.

    F_j = -gamma_1d * Re[ sum_j' sigma_j sigma*_j' exp(-i k0 |z_j - z_j'|)
    sign(z_j - z_j') ], with sign(0) = 0 so the self-term vanishes.
    """
    z = np.asarray(z, dtype=float)
    sigma = np.asarray(sigma, dtype=complex)
    if z.size > 1:
        gaps = np.diff(z)
        if np.any(gaps <= 0.0):
            raise DegenerateConfigurationError("atom positions must be strictly increasing")
    diff = z[:, None] - z[None, :]
    phase = np.exp(-1j * TWO_PI * np.abs(diff)) * np.sign(diff)
    return -params.gamma_1d * np.real(sigma * (phase @ np.conj(sigma)))


def default_ext_damping(params: SystemParams) -> float:
    """Recommended gamma_e: an order below the typical phonon frequency.

    0.1 * sqrt(omega_r s0 N gamma_1d) keeps the equilibria unshifted while
    still converging quickly.
    """
    scale = params.recoil * params.saturation * params.n_atoms * params.gamma_1d
    return 0.1 * math.sqrt(scale)


def suggested_timestep(params: SystemParams, mode: str = "adiabatic") -> float:
    """Step size that safely resolves the fastest motional frequency.

    The stiffest weak-lattice phonon sits near 1.5 sqrt(omega_r s0 N
    gamma_1d); the step stays a factor ~2 below the RK4 stability bound
    for twice that frequency.  Full mode must also resolve Gamma itself.
    """
    omega = 2.0 * math.sqrt(
        max(params.recoil * params.saturation * params.n_atoms * params.gamma_1d, 1e-300)
    )
    dt = 1.0 / omega
    if params.ext_damping > 0.0:
        dt = min(dt, 0.2 / params.ext_damping)
    if mode == "full":
        dt = min(dt, 0.1)
    return dt


@dataclass
class Trajectory:
    """Sampled history of an integration run."""

    times: np.ndarray
    states: list[ChainState]
    max_momentum: np.ndarray
    max_force: np.ndarray

    @property
    def final(self) -> ChainState:
        return self.states[-1]

    def to_csv(self, path, provenance: str = ""):
        """Write columns t, z_1..z_N, p_1..p_N, re_sigma_1.., im_sigma_1.."""
        n = self.states[0].n
        header = (
            ["t"]
            + [f"z_{j + 1}" for j in range(n)]
            + [f"p_{j + 1}" for j in range(n)]
            + [f"re_sigma_{j + 1}" for j in range(n)]
            + [f"im_sigma_{j + 1}" for j in range(n)]
        )
        rows = (
            [t, *s.z, *s.p, *np.real(s.sigma), *np.imag(s.sigma)]
            for t, s in zip(self.times, self.states)
        )
        csvio.write_csv(path, header, rows, provenance)


def _rhs_full(params, vf, z, p, sigma):
    m = build_coupling_matrix(params, z)
    dsigma = m @ sigma + 1j * params.rabi
    dp = force(params, z, sigma) - params.ext_damping * p
    return vf * p, dp, dsigma


def _rhs_adiabatic(params, vf, z, p):
    sigma = solve_instantaneous(params, z)
    dp = force(params, z, sigma) - params.ext_damping * p
    return vf * p, dp, sigma


def _ordered(z):
    return z.size < 2 or np.all(np.diff(z) > MIN_GAP)


def integrate(params: SystemParams, state: ChainState, dt: float, t_max: float,
              mode: str = "adiabatic", record_every: int | None = None) -> Trajectory:
    """Integrate the equations of motion with classical RK4 at fixed step.

    ``mode`` selects the full (z, p, sigma) flow or adiabatic elimination
    of the coherences.  Steps that would bring two atoms within MIN_GAP
    are rejected and retried with a halved step, up to 10 times; NaNs
    raise DivergenceError.
    """
    if mode not in ("full", "adiabatic"):
        raise ValueError(f"unknown integration mode {mode!r}")
    if mode == "full" and dt > 0.1:
        raise ParameterDomainError("full mode needs dt <= 0.1/Gamma to resolve Gamma")
    state = state.copy()
    state.validate()
    vf = nondimensional_velocity_factor(params)
    n_steps = max(1, int(round(t_max / dt)))
    if record_every is None:
        record_every = max(1, n_steps // 200)

    z, p = state.z.copy(), state.p.copy()
    sigma = state.sigma.copy()
    if mode == "adiabatic":
        sigma = solve_instantaneous(params, z)

    times = [0.0]
    states = [ChainState(z.copy(), p.copy(), sigma.copy())]
    max_p = [float(np.max(np.abs(p))) if p.size else 0.0]
    fnow = force(params, z, sigma)
    max_f = [float(np.max(np.abs(fnow)))]

    t = 0.0
    step = 0
    while step < n_steps:
        h = dt
        for attempt in range(11):
            try:
                if mode == "full":
                    k1 = _rhs_full(params, vf, z, p, sigma)
                    k2 = _rhs_full(params, vf, z + 0.5 * h * k1[0], p + 0.5 * h * k1[1],
                                   sigma + 0.5 * h * k1[2])
                    k3 = _rhs_full(params, vf, z + 0.5 * h * k2[0], p + 0.5 * h * k2[1],
                                   sigma + 0.5 * h * k2[2])
                    k4 = _rhs_full(params, vf, z + h * k3[0], p + h * k3[1],
                                   sigma + h * k3[2])
                    z_new = z + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
                    p_new = p + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
                    s_new = sigma + (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
                else:
                    d1 = _rhs_adiabatic(params, vf, z, p)
                    d2 = _rhs_adiabatic(params, vf, z + 0.5 * h * d1[0], p + 0.5 * h * d1[1])
                    d3 = _rhs_adiabatic(params, vf, z + 0.5 * h * d2[0], p + 0.5 * h * d2[1])
                    d4 = _rhs_adiabatic(params, vf, z + h * d3[0], p + h * d3[1])
                    z_new = z + (h / 6.0) * (d1[0] + 2 * d2[0] + 2 * d3[0] + d4[0])
                    p_new = p + (h / 6.0) * (d1[1] + 2 * d2[1] + 2 * d3[1] + d4[1])
                    s_new = None
            except DegenerateConfigurationError:
                h *= 0.5
                continue
            if not (np.all(np.isfinite(z_new)) and np.all(np.isfinite(p_new))):
                raise DivergenceError(f"non-finite state at t = {t:.3g}")
            if _ordered(z_new):
                break
            h *= 0.5
        else:
            raise OrderingViolationError(
                f"atoms about to cross at t = {t:.3g} despite 10 step halvings"
            )

        z, p = z_new, p_new
        if mode == "full":
            if not np.all(np.isfinite(s_new)):
                raise DivergenceError(f"non-finite coherences at t = {t:.3g}")
            sigma = s_new
        else:
            sigma = solve_instantaneous(params, z)
        t += h
        # a halved step still counts as one nominal step for bookkeeping
        step += 1
        if step % record_every == 0 or step == n_steps:
            fnow = force(params, z, sigma)
            times.append(t)
            states.append(ChainState(z.copy(), p.copy(), sigma.copy()))
            max_p.append(float(np.max(np.abs(p))))
            max_f.append(float(np.max(np.abs(fnow))))

    return Trajectory(np.asarray(times), states, np.asarray(max_p), np.asarray(max_f))


def _newton_polish(params, z, tol_f, max_iter=12):
    """Drive the residual force to zero with damped-Newton steps.

    Uses the analytic stiffness matrix; the minimum-norm least-squares
    solve leaves the (neutral) center of mass untouched.  Returns the
    polished positions or None if polishing left the trust region.
    """
    from .phonons import stiffness_matrix  # deferred to avoid an import cycle

    z = z.copy()
    for _ in range(max_iter):
        sigma = solve_instantaneous(params, z)
        f = force(params, z, sigma)
        if np.max(np.abs(f)) <= tol_f:
            return z
        k = stiffness_matrix(params, z, check_equilibrium=False)
        dz = np.linalg.lstsq(k, f, rcond=None)[0]
        min_gap = np.min(np.diff(z)) if z.size > 1 else np.inf
        if np.max(np.abs(dz)) > 0.25 * min_gap:
            return None
        z_new = z + dz
        if not _ordered(z_new):
            return None
        z = z_new
    sigma = solve_instantaneous(params, z)
    if np.max(np.abs(force(params, z, sigma))) <= tol_f:
        return z
    return None


def relax_to_steady_state(params: SystemParams, state: ChainState,
                          tol_p: float = DEFAULT_TOL_P, tol_f: float = DEFAULT_TOL_F,
                          t_max: float = 2e6, dt: float | None = None,
                          mode: str = "adiabatic", polish: bool = True) -> ChainState:
    """Damped integration until the chain is stationary.

    Requires params.ext_damping > 0.  Integrates in chunks until both
    max |p_j| < tol_p and max |F_j| < tol_f; once the residual force is
    small an optional Newton polish removes the slow exponential tail
    (it cannot change which equilibrium is reached, only reach it faster).
    Raises ConvergenceTimeout with the last metrics if t_max is exhausted.
    """
    if params.ext_damping <= 0.0:
        raise ParameterDomainError("relaxation requires ext_damping > 0")
    state = state.copy()
    state.validate()
    user_dt = dt
    vf = nondimensional_velocity_factor(params)

    def stable_dt(st, sig):
        """Step bounded by the measured stiffness, not the weak-limit scale.

        Coherences can exceed sqrt(s0) severalfold near resonance, which
        stiffens the motion beyond the weak-lattice estimate; an infinity
        norm of the actual K bounds the top phonon frequency.
        """
        if user_dt is not None:
            return user_dt
        dt_est = suggested_timestep(params, mode)
        if vf <= 0.0:
            return dt_est
        from .phonons import stiffness_matrix  # deferred: import cycle

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            k = stiffness_matrix(params, st.z, check_equilibrium=False)
        omega_max = math.sqrt(max(vf * float(np.linalg.norm(k, np.inf)), 1e-300))
        return min(dt_est, 1.2 / omega_max)

    def metrics_of(st):
        sig = st.sigma if mode == "full" else solve_instantaneous(params, st.z)
        f = force(params, st.z, sig)
        mp = float(np.max(np.abs(st.p))) if st.p.size else 0.0
        return sig, mp, float(np.max(np.abs(f)))

    sigma_now, max_p, max_f = metrics_of(state)
    dt = stable_dt(state, sigma_now)
    t = 0.0
    halvings = 0
    chunks_done = 0
    while True:
        force_scale = max(
            params.gamma_1d * float(np.mean(np.abs(sigma_now) ** 2)), 1e-300
        )
        polish_gate = max(1e3 * tol_f, 3e-2 * force_scale)
        if max_p < tol_p and max_f < tol_f:
            if mode == "adiabatic":
                state.sigma = solve_instantaneous(params, state.z)
            state.validate()
            return state
        if polish and max_f < polish_gate:
            # residual-oscillation amplitude ~ vf*p*dt-scale must sit well
            # inside the Newton trust region before polishing is attempted
            min_gap = float(np.min(np.diff(state.z))) if state.n > 1 else 1.0
            if vf * max_p * dt < 0.1 * min_gap:
                z_polished = _newton_polish(params, state.z, tol_f)
                if z_polished is not None:
                    out = ChainState(
                        z_polished, np.zeros_like(z_polished),
                        solve_instantaneous(params, z_polished),
                    )
                    out.validate()
                    return out
        if t >= t_max:
            raise ConvergenceTimeout(
                f"no steady state after t = {t:.3g}/Gamma "
                f"(max|p| = {max_p:.3e}, max|F| = {max_f:.3e})",
                metrics={"t": t, "max_momentum": max_p, "max_force": max_f,
                         "tol_p": tol_p, "tol_f": tol_f},
                state=state,
            )
        try:
            traj = integrate(params, state, dt, min(400 * dt, t_max - t), mode=mode,
                             record_every=10**9)
        except (DivergenceError, OrderingViolationError):
            if halvings >= 10:
                raise
            halvings += 1
            dt *= 0.5
            continue
        state = traj.final
        t += traj.times[-1]
        sigma_now, max_p, max_f = metrics_of(state)
        chunks_done += 1
        if user_dt is None and chunks_done % 8 == 0 and halvings == 0:
            dt = stable_dt(state, sigma_now)


def initial_state(params: SystemParams, z) -> ChainState:
    """Chain at rest at the given positions with steady-state coherences."""
    z = np.asarray(z, dtype=float)
    return ChainState(z, np.zeros_like(z), solve_instantaneous(params, z))
