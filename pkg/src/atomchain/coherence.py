"""Guided-mode coupling matrix and steady-state atomic coherences.

The coherence dynamics are linear, sigma_dot = M(z) sigma + i*Omega*1, with
a dense complex-symmetric coupling matrix M.  Because the recoil frequency
is tiny compared to Gamma, the coherences track the (slow) motion almost
instantaneously, so most of the package works with the fixed point
sigma_inst = -i M^-1 Omega*1 instead of integrating sigma explicitly.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .errors import DegenerateConfigurationError, IllConditionedError, NumericalError
from .model import TWO_PI, SystemParams

CONDITION_LIMIT = 1e12


def _check_ordered(z: np.ndarray):
    if z.size > 1:
        gaps = np.diff(z)
        if np.any(gaps == 0.0):
            raise DegenerateConfigurationError("atom positions coincide")
        if np.any(gaps < 0.0):
            raise DegenerateConfigurationError("atom positions must be strictly increasing")


def build_coupling_matrix(params: SystemParams, z, delta: float | None = None) -> np.ndarray:
    """Dense coupling matrix M of the linear coherence equations.

    M_jj = i*delta - 1/2 and M_jk = -(gamma_1d/2) exp(i k0 |z_j - z_k|)
    for j != k.  ``delta`` defaults to the pump detuning; probe
    calculations pass the probe detuning instead.
    """
    z = np.asarray(z, dtype=float)
    _check_ordered(z)
    if delta is None:
        delta = params.pump_detuning
    sep = np.abs(z[:, None] - z[None, :])
    m = -(0.5 * params.gamma_1d) * np.exp(1j * TWO_PI * sep)
    np.fill_diagonal(m, 1j * delta - 0.5)
    return m


class FactoredCoupling:
    """LU factorization of a coupling matrix with a condition-number guard."""

    def __init__(self, m: np.ndarray):
        self.m = m
        self.lu, self.piv = lu_factor(m, check_finite=False)
        anorm = np.linalg.norm(m, 1)
        rcond, info = lapack.zgecon(self.lu, anorm)
        if info != 0:
            raise NumericalError(f"zgecon failed with info={info}")
        self.condition = np.inf if rcond == 0.0 else 1.0 / rcond
        if self.condition > CONDITION_LIMIT:
            raise IllConditionedError(
                f"coupling matrix is numerically singular "
                f"(condition estimate {self.condition:.3e})",
                condition=self.condition,
            )

    def solve(self, rhs: np.ndarray, refine: int = 1) -> np.ndarray:
        """Solve M x = rhs with a round of iterative refinement."""
        x = lu_solve((self.lu, self.piv), rhs, check_finite=False)
        for _ in range(refine):
            r = rhs - self.m @ x
            x = x + lu_solve((self.lu, self.piv), r, check_finite=False)
        return x


def factor_coupling(params: SystemParams, z, delta: float | None = None) -> FactoredCoupling:
    return FactoredCoupling(build_coupling_matrix(params, z, delta))


def solve_instantaneous(params: SystemParams, z, delta: float | None = None) -> np.ndarray:
    """Steady-state coherences sigma_inst = -i M^-1 Omega*1 at fixed positions."""
    fac = factor_coupling(params, z, delta)
    rhs = np.full(fac.m.shape[0], -1j * params.rabi, dtype=complex)
    sigma = fac.solve(rhs)
    scale = np.linalg.norm(rhs)
    if scale > 0.0:
        residual = np.linalg.norm(fac.m @ sigma - rhs)
        if residual > 1e-10 * scale:
            sigma = fac.solve(rhs, refine=2)
            residual = np.linalg.norm(fac.m @ sigma - rhs)
            if residual > 1e-10 * scale:
                raise NumericalError(
                    f"coherence solve residual {residual:.3e} exceeds tolerance "
                    f"(condition {fac.condition:.3e})"
                )
    return sigma


def solve_driven(params: SystemParams, z, drive: np.ndarray,
                 delta: float | None = None) -> np.ndarray:
    """Steady-state coherences under an arbitrary per-atom drive vector.

    Solves M sigma = -i * drive; used for probe fields with
    position-dependent phases.
    """
    fac = factor_coupling(params, z, delta)
    return fac.solve(-1j * np.asarray(drive, dtype=complex))


def excited_population(sigma, params: SystemParams) -> float:
    """Mean excited population normalized to the independent-atom value s0."""
    sigma = np.asarray(sigma, dtype=complex)
    return float(np.mean(np.abs(sigma) ** 2) / params.saturation)


def collective_emission_rates(sigma, z, params: SystemParams) -> tuple[float, float]:
    """Semiclassical emission rates into the right/left guided modes.

    Gamma_pm = (gamma_1d / 2) |sum_j sigma_j exp(-/+ i k0 z_j)|^2, so a
    single atom emits (gamma_1d/2)|sigma|^2 into each direction, while
    phased arrays can be super- or subradiant.
    """
    sigma = np.asarray(sigma, dtype=complex)
    z = np.asarray(z, dtype=float)
    plus = np.sum(sigma * np.exp(-1j * TWO_PI * z))
    minus = np.sum(sigma * np.exp(1j * TWO_PI * z))
    half = 0.5 * params.gamma_1d
    return float(half * np.abs(plus) ** 2), float(half * np.abs(minus) ** 2)
