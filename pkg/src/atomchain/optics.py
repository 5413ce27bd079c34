"""Probe reflection/transmission of a fixed chain, Bloch dispersion and gap.

Two independent routes compute the same linear scattering problem: a
2x2 transfer-matrix product over single-atom scatterers, and a "spin
model" route that solves the driven coherence equations at the probe
detuning and reads the scattered field off the atomic array.  They must
agree to high precision, which makes each the oracle for the other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import csvio
from .coherence import build_coupling_matrix, FactoredCoupling
from .errors import IllConditionedError, ParameterDomainError
from .model import TWO_PI, SystemParams

OVERFLOW_GUARD = 1e150


def single_atom_rt(params: SystemParams, delta_p):
    """Single-atom probe coefficients r = -gamma_1d/(1 - 2 i delta_p), t = 1 + r."""
    delta_p = np.asarray(delta_p, dtype=float)
    r = -params.gamma_1d / (1.0 - 2j * delta_p)
    return r, 1.0 + r


@dataclass
class OpticalSpectrum:
    """Probe response of one configuration over a detuning grid."""

    delta_p: np.ndarray
    r: np.ndarray
    t: np.ndarray
    flagged: np.ndarray | None = None   # points skipped as numerically singular

    @property
    def reflectance(self) -> np.ndarray:
        return np.abs(self.r) ** 2

    @property
    def transmittance(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    def to_csv(self, path, provenance: str = ""):
        header = ["delta_p", "re_r", "im_r", "re_t", "im_t", "R", "T"]
        rows = (
            [dp, r.real, r.imag, t.real, t.imag, abs(r) ** 2, abs(t) ** 2]
            for dp, r, t in zip(self.delta_p, self.r, self.t)
        )
        return csvio.write_csv(path, header, rows, provenance)


def default_probe_grid() -> np.ndarray:
    """601 points over [-60, 60] plus a 201-point refinement of [-2, 2]."""
    coarse = np.linspace(-60.0, 60.0, 601)
    fine = np.linspace(-2.0, 2.0, 201)
    return np.unique(np.concatenate([coarse, fine]))


def chain_spectrum_transfer(params: SystemParams, z, delta_p_grid) -> OpticalSpectrum:
    """Chain spectrum from composing single-atom transfer matrices.

    Free propagation between neighbours carries the phase exp(i k0 dz);
    using k0 rather than the probe wavevector matches the near-resonance
    approximation of the coherence equations, so the two spectrum routes
    stay exactly comparable.  Matrix products are rescaled if entries
    exceed 1e150, with the scale restored in the transmission amplitude.
    """
    z = np.asarray(z, dtype=float)
    grid = np.atleast_1d(np.asarray(delta_p_grid, dtype=float))
    if z.size > 1 and not np.all(np.diff(z) > 0.0):
        raise ParameterDomainError("positions must be strictly increasing")
    r1, t1 = single_atom_rt(params, grid)
    # t1 = 0 only for a lossless atom exactly on resonance; the first atom
    # is then a perfect mirror and the matrix route degenerates
    opaque = np.abs(t1) < 1e-14
    t1_safe = np.where(opaque, 1.0, t1)
    atom = np.empty((grid.size, 2, 2), dtype=complex)
    atom[:, 0, 0] = (t1_safe**2 - r1**2) / t1_safe
    atom[:, 0, 1] = r1 / t1_safe
    atom[:, 1, 0] = -r1 / t1_safe
    atom[:, 1, 1] = 1.0 / t1_safe
    total = atom.copy()
    log_scale = np.zeros(grid.size)
    for gap in np.diff(z):
        phase = np.exp(1j * TWO_PI * gap)
        total[:, 0, :] *= phase
        total[:, 1, :] /= phase
        total = atom @ total
        peak = np.max(np.abs(total), axis=(1, 2))
        big = peak > OVERFLOW_GUARD
        if np.any(big):
            total[big] /= peak[big, None, None]
            log_scale[big] += np.log(peak[big])
    d = total[:, 1, 1]
    # reference the amplitudes to the free field (the spin-model convention):
    # r at the z = 0 plane, t relative to free propagation across the chain
    r_out = -total[:, 1, 0] / d * np.exp(2j * TWO_PI * z[0])
    # det(total) = exp(-2*log_scale) after rescaling, so t = e^-ls / d
    t_out = np.exp(-log_scale) / d * np.exp(-1j * TWO_PI * (z[-1] - z[0]))
    r_out[opaque] = r1[opaque] * np.exp(2j * TWO_PI * z[0])
    t_out[opaque] = 0.0
    return OpticalSpectrum(grid, r_out, t_out)


def chain_spectrum_spinmodel(params: SystemParams, z, delta_p_grid) -> OpticalSpectrum:
    """Chain spectrum from the driven steady state of the coherence equations.

    Solves M(delta_p) sigma = -i Omega_p e^{i k0 z_j} and reconstructs
    r = (i gamma_1d / 2 Omega_p) sum_j sigma_j e^{i k0 z_j},
    t = 1 + (i gamma_1d / 2 Omega_p) sum_j sigma_j e^{-i k0 z_j}.
    Probe points where the coupling matrix is numerically singular are
    flagged rather than fabricated.
    """
    z = np.asarray(z, dtype=float)
    grid = np.asarray(delta_p_grid, dtype=float)
    omega_p = 1.0
    phase = np.exp(1j * TWO_PI * z)
    drive = omega_p * phase
    pref = 0.5j * params.gamma_1d / omega_p
    r_out = np.full(grid.size, np.nan, dtype=complex)
    t_out = np.full(grid.size, np.nan, dtype=complex)
    flagged = np.zeros(grid.size, dtype=bool)
    for i, dp in enumerate(grid):
        try:
            fac = FactoredCoupling(build_coupling_matrix(params, z, delta=dp))
            sigma = fac.solve(-1j * drive, refine=2)
        except IllConditionedError as exc:
            warnings.warn(
                f"probe point delta_p = {dp:g} skipped: {exc}", stacklevel=2
            )
            flagged[i] = True
            continue
        r_out[i] = pref * np.sum(sigma * phase)
        t_out[i] = 1.0 + pref * np.sum(sigma / phase)
    return OpticalSpectrum(grid, r_out, t_out, flagged if flagged.any() else None)


@dataclass(frozen=True)
class BlochResult:
    """Bloch wavevector of the infinite lattice at one probe detuning."""

    q: complex          # per lambda0; q*d is the phase across one cell
    qd: complex
    zeta: complex
    in_gap: bool


def bloch_dispersion(params: SystemParams, d: float, delta_p: float) -> BlochResult:
    """Solve cos(qd) = cos(k0 d) - zeta sin(k0 d) on the evanescent branch.

    zeta = (gamma_1d/gamma') (i - 2 delta_p/gamma') / (1 + (2 delta_p/gamma')^2).
    The principal arccos branch with Im(q) >= 0 is returned (decaying
    solution).  Undefined for gamma' = 0.
    """
    gp = params.gamma_prime
    if gp <= 0.0:
        raise ParameterDomainError("Bloch dispersion model requires gamma' > 0")
    x = 2.0 * delta_p / gp
    zeta = (params.gamma_1d / gp) * (1j - x) / (1.0 + x**2)
    rhs = math.cos(TWO_PI * d) - zeta * math.sin(TWO_PI * d)
    qd = np.lib.scimath.arccos(rhs)
    if qd.imag < 0.0:
        qd = -qd
    edges = band_gap_edges(params, d)
    in_gap = bool(edges is not None and edges[0] <= delta_p <= edges[1])
    return BlochResult(q=complex(qd / d), qd=complex(qd), zeta=complex(zeta), in_gap=in_gap)


def band_gap_edges(params: SystemParams, d: float) -> tuple[float, float] | None:
    """Probe-detuning window of the optical band gap for lattice constant d.

    With epsilon = 2 pi (1 - d/lambda0) > 0 the gap spans
    -gamma_1d/epsilon <~ delta_p <~ -epsilon gamma'^2 / (4 gamma_1d).
    Returns None when epsilon <= 0 (no gap); the edges are soft, the
    derivation assuming gamma_1d/gamma' >> epsilon.
    """
    eps = TWO_PI * (1.0 - d)
    if eps <= 0.0:
        return None
    gp = params.gamma_prime
    if gp > 0.0 and params.gamma_1d / gp < 5.0 * eps:
        warnings.warn(
            f"band-gap formula marginal: gamma_1d/gamma' = "
            f"{params.gamma_1d / gp:.3g} is not >> epsilon = {eps:.3g}",
            stacklevel=2,
        )
    return -params.gamma_1d / eps, -eps * gp**2 / (4.0 * params.gamma_1d)


def spectrum_peak_stats(spectrum: OpticalSpectrum) -> tuple[float, float, float]:
    """(delta_p at max R, max R, FWHM) of a reflectance spectrum.

    The FWHM is measured by linear interpolation of the outermost
    half-maximum crossings around the peak; NaN if a crossing falls
    outside the grid.
    """
    good = ~np.isnan(spectrum.r)
    dp = spectrum.delta_p[good]
    refl = np.abs(spectrum.r[good]) ** 2
    i_max = int(np.argmax(refl))
    r_max = float(refl[i_max])
    half = 0.5 * r_max

    left = np.nan
    for i in range(i_max, 0, -1):
        if refl[i - 1] <= half <= refl[i]:
            frac = (half - refl[i - 1]) / (refl[i] - refl[i - 1])
            left = dp[i - 1] + frac * (dp[i] - dp[i - 1])
            break
    right = np.nan
    for i in range(i_max, refl.size - 1):
        if refl[i + 1] <= half <= refl[i]:
            frac = (refl[i] - half) / (refl[i] - refl[i + 1])
            right = dp[i] + frac * (dp[i + 1] - dp[i])
            break
    return float(dp[i_max]), r_max, float(right - left)
