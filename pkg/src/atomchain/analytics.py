"""Closed-form results in the weak-scattering limit and simple spectral models.

These expressions serve as analytic oracles for the numerical machinery:
the minimizing lattice and its energy, the dispersive (effective index)
prediction for the lattice constant, the exact phonon spectrum of the weak
lattice, the anti-damping scaling, and the two-mirror cavity model of the
fragmented chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import TWO_PI, FractionalConfig, SystemParams


def potential_energy(z) -> float:
    """Pairwise interaction energy (1/2) sum_{j,j'} sin(k0 |z_j - z_j'|).

    Valid as the mechanical potential only in the weak-scattering regime
    where all coherences are equal; returned in units of hbar*Gamma_1D*s0.
    Self-terms vanish (sin 0 = 0).
    """
    z = np.asarray(z, dtype=float)
    sep = np.abs(z[:, None] - z[None, :])
    return float(0.5 * np.sum(np.sin(TWO_PI * sep)))


@dataclass(frozen=True)
class WeakScatteringSolution:
    """Minimizer of the weak-scattering potential for N atoms."""

    n_atoms: int
    lattice_constant: float          # d = 1 - 1/(2N), in lambda0
    config: FractionalConfig         # f_j = 1 - (j-1)/(2N)
    positions: np.ndarray            # z_j = (j-1) d, a convenient representative
    energy: float                    # exact pair sum, units hbar*Gamma_1D*s0
    energy_asymptote: float          # -N^2/pi, the large-N value


def weak_lattice(n_atoms: int) -> WeakScatteringSolution:
    """Energy-minimizing lattice in the weak-scattering limit.

    The lattice constant is d = lambda0 (1 - 1/2N) and the fractional
    positions step down as f_j = 1 - (j-1)/2N.  The exact finite-N energy
    is computed by the pair sum; the large-N asymptote -N^2/pi is attached
    separately so the two are never conflated.
    """
    if n_atoms < 2:
        raise ValueError("the weak lattice needs at least 2 atoms")
    n = int(n_atoms)
    d = 1.0 - 0.5 / n
    z = np.arange(n) * d
    return WeakScatteringSolution(
        n_atoms=n,
        lattice_constant=d,
        config=FractionalConfig(1.0 - np.arange(n) / (2.0 * n)),
        positions=z,
        energy=potential_energy(z),
        energy_asymptote=-(n**2) / math.pi,
    )


def effective_lattice_constant(params: SystemParams, delta: float | None = None
                               ) -> tuple[float, float, float]:
    """Dispersive prediction (theta_t, lambda_eff, d_eff) for the lattice constant.

    A single atom imparts the transmission phase
    theta_t = -arctan(2 Gamma_1D delta / (Gamma^2 - Gamma Gamma_1D + 4 delta^2)),
    equivalent to an effective wavelength lambda_eff = lambda0 (1 - theta_t/2pi)
    in the medium; the chain then settles at d_eff = lambda_eff (1 - 1/2N).
    """
    if delta is None:
        delta = params.pump_detuning
    g1 = params.gamma_1d
    theta_t = -math.atan2(2.0 * g1 * delta, 1.0 - g1 + 4.0 * delta**2)
    lam_eff = 1.0 - theta_t / TWO_PI
    d_eff = lam_eff * (1.0 - 0.5 / params.n_atoms)
    return theta_t, lam_eff, d_eff


def weak_phonon_spectrum(params: SystemParams, n_atoms: int | None = None) -> np.ndarray:
    """Exact phonon frequencies of the weak-scattering lattice.

    Returns the N frequencies (index j = 0..N-1, wave number 2*pi*j/N)

        omega_j = sqrt(2 omega_r s0 Gamma_1D
                       (cot(pi/2N) - sin(pi/N) / (cos(2 pi j/N) - cos(pi/N))))

    in units of Gamma.  j = 0 is the free center-of-mass mode and is
    returned as exactly zero.
    """
    n = int(n_atoms if n_atoms is not None else params.n_atoms)
    if n < 2:
        raise ValueError("need at least 2 atoms for a phonon spectrum")
    scale = 2.0 * params.recoil * params.saturation * params.gamma_1d
    j = np.arange(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        bracket = 1.0 / math.tan(math.pi / (2 * n)) - np.sin(math.pi / n) / (
            np.cos(TWO_PI * j / n) - math.cos(math.pi / n)
        )
    omega = np.sqrt(scale * np.clip(bracket, 0.0, None))
    omega[0] = 0.0
    return omega


def weak_stiffness_matrix(params: SystemParams, n_atoms: int | None = None) -> np.ndarray:
    """Closed-form stiffness matrix of the weak lattice (circulant).

    With equal coherences the force is the gradient of the pair potential;
    at the minimizing lattice the curvature matrix has off-diagonal entries
    K_jk = 2 pi Gamma_1D s0 sin(2 pi d |j-k|) = -2 pi Gamma_1D s0 sin(pi |j-k| / N)
    and zero row sums.  Units: force (hbar k0 Gamma) per displacement (lambda0).
    """
    n = int(n_atoms if n_atoms is not None else params.n_atoms)
    amp = TWO_PI * params.gamma_1d * params.saturation
    m = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    k = -amp * np.sin(math.pi * m / n)
    np.fill_diagonal(k, 0.0)
    np.fill_diagonal(k, -k.sum(axis=1))
    return k


def weak_max_antidamping(params: SystemParams, n_atoms: int | None = None,
                         delta: float | None = None) -> float:
    """Order-of-magnitude estimate of the largest anti-damping rate.

    In the weak-scattering regime the motional modes acquire growth rates
    bounded by roughly N^2 Gamma_1D^2 s0 omega_r / delta^2; the prefactor
    is not pinned down, so treat this as a scaling estimate only.
    """
    n = int(n_atoms if n_atoms is not None else params.n_atoms)
    if delta is None:
        delta = params.pump_detuning
    s0 = params.saturation_at(delta)
    return n**2 * params.gamma_1d**2 * s0 * params.recoil / delta**2


def cavity_model(params: SystemParams, n_atoms: int | None = None) -> tuple[float, float]:
    """Peak reflectance and FWHM of the fragmented (two super-atom) chain.

    The two halves act as high-reflectivity mirrors of a collective cavity:
    R_peak = 1 - 4 Gamma' / (N Gamma_1D), clipped to [0, 1], and
    FWHM = N Gamma_1D / sqrt(2), both meaningful for N Gamma_1D >> Gamma'.
    """
    n = int(n_atoms if n_atoms is not None else params.n_atoms)
    r_peak = 1.0 - 4.0 * params.gamma_prime / (n * params.gamma_1d)
    fwhm = n * params.gamma_1d / math.sqrt(2.0)
    return min(max(r_peak, 0.0), 1.0), fwhm
