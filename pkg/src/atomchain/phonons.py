"""Linearization of the motion about an equilibrium: stiffness, delay damping,
and complex normal modes.

About a stationary configuration the momenta obey, to first order,
p_dot = -K (z - z_eq) - L p.  K comes from differentiating the force with
the coherences pinned to their instantaneous steady state; L captures the
first-order lag of the coherences behind the motion, which is what damps
or anti-damps the phonons.
"""

from __future__ import annotations

import math
import tempfile
import warnings
from dataclasses import dataclass

import numpy as np

from . import csvio
from .coherence import factor_coupling
from .dynamics import force
from .errors import NumericalError
from .model import TWO_PI, SystemParams, nondimensional_velocity_factor


def _force_pieces(params: SystemParams, z: np.ndarray):
    """Shared ingredients of the linearization at positions z.

    Returns (sigma, X, A, dSigma, fac) where
      X[j,k]      = d F_j / d z_k at fixed coherences,
      A[j,l]      = d F_j / d sigma_l (Wirtinger; the sigma* half is A*),
      dSigma[:,k] = d sigma_inst / d z_k,
      fac         = LU factorization of the coupling matrix.
    """
    g1 = params.gamma_1d
    fac = factor_coupling(params, z)
    rhs = np.full(z.size, -1j * params.rabi, dtype=complex)
    sigma = fac.solve(rhs)

    diff = z[:, None] - z[None, :]
    sgn = np.sign(diff)
    eneg = np.exp(-1j * TWO_PI * np.abs(diff))
    psi = eneg * sgn                        # force phase matrix, zero diagonal

    # explicit position dependence of the force at frozen sigma
    x = -TWO_PI * g1 * np.real(1j * np.outer(sigma, np.conj(sigma)) * eneg)
    np.fill_diagonal(x, 0.0)
    np.fill_diagonal(x, -x.sum(axis=1))     # rows sum to zero by translation invariance

    # force sensitivity to the coherences
    a = -(0.5 * g1) * (np.diag(psi @ np.conj(sigma)) + np.conj(sigma)[:, None] * np.conj(psi))

    # coherence sensitivity to positions: dM/dz_k is nonzero only in row/col k
    s = (-1j * math.pi * g1) * np.exp(1j * TWO_PI * np.abs(diff)) * sgn
    v = np.diag(s @ sigma) - s * sigma[None, :]
    dsigma = -fac.solve(v)
    return sigma, x, a, dsigma, fac


def stiffness_matrix(params: SystemParams, z_eq, tol_force: float = 1e-8,
                     check_equilibrium: bool = True) -> np.ndarray:
    """Restoring matrix K_jk = -dF_j/dz_k with sigma = sigma_inst(z).

    Computed analytically through d(M^-1) = -M^-1 (dM) M^-1; warns when
    the supplied configuration is not actually an equilibrium.
    """
    z = np.asarray(z_eq, dtype=float)
    sigma, x, a, dsigma, _ = _force_pieces(params, z)
    if check_equilibrium:
        residual = float(np.max(np.abs(force(params, z, sigma))))
        if residual > tol_force:
            warnings.warn(
                f"stiffness evaluated away from equilibrium "
                f"(max residual force {residual:.3e})",
                stacklevel=2,
            )
    return -(x + 2.0 * np.real(a @ dsigma))


def damping_matrix(params: SystemParams, z_eq) -> np.ndarray:
    """Delay-induced damping matrix L in p_dot = -K dz - L p.

    The first-order coherence lag for unit momentum on atom k is
    sigma_d = (omega_r/pi) M^-1 d(sigma_inst)/dz_k; feeding it back into
    the force gives column k of -L.  Vanishes linearly with omega_r.
    """
    z = np.asarray(z_eq, dtype=float)
    _, _, a, dsigma, fac = _force_pieces(params, z)
    sigma_d = nondimensional_velocity_factor(params) * fac.solve(dsigma)
    return -2.0 * np.real(a @ sigma_d)


@dataclass
class PhononModes:
    """Complex normal-mode frequencies and mode shapes about an equilibrium.

    omega[j] = omega_ph + i*gamma_ph in units of Gamma; gamma_ph > 0 means
    the mode grows (anti-damping), gamma_ph < 0 means it decays.  vectors
    holds one N-component (position-space) mode shape per column.
    """

    omega: np.ndarray
    vectors: np.ndarray
    zero_mask: np.ndarray
    antidamped_mask: np.ndarray
    damped_mask: np.ndarray

    @property
    def n(self) -> int:
        return self.omega.size

    @property
    def max_antidamping(self) -> float:
        return float(np.max(self.omega.imag))

    def to_csv(self, path, params: SystemParams, delta: float | None = None,
               provenance: str = ""):
        """Columns j, re_omega, im_omega plus the same pair normalized by
        sqrt(omega_r s0 N gamma_1d)."""
        if delta is None:
            delta = params.pump_detuning
        s0 = params.saturation_at(delta)
        norm = math.sqrt(max(params.recoil * s0 * params.n_atoms * params.gamma_1d, 1e-300))
        header = ["j", "re_omega", "im_omega", "re_omega_norm", "im_omega_norm"]
        rows = (
            [j, w.real, w.imag, w.real / norm, w.imag / norm]
            for j, w in enumerate(self.omega)
        )
        return csvio.write_csv(path, header, rows, provenance)


def _select_representatives(lam: np.ndarray, vecs: np.ndarray, n: int):
    """Pick the N physically distinct modes from the 2N first-order eigenvalues.

    Complex eigenvalues come in conjugate pairs: keep the Im < 0 member,
    which maps to omega = i*lam with Re omega >= 0.  Real eigenvalues come
    from overdamped (or neutral) pairs: pair them off and keep the faster
    root of each pair.
    """
    scale = max(1.0, float(np.max(np.abs(lam))))
    tol = 1e-9 * scale
    idx_complex = np.flatnonzero(lam.imag < -tol)
    idx_real = np.flatnonzero(np.abs(lam.imag) <= tol)
    chosen = list(idx_complex)
    n_missing = n - len(chosen)
    if n_missing > 0:
        order = idx_real[np.argsort(lam.real[idx_real])]
        # pair slowest-with-fastest; keep the larger-|Re| root of each pair,
        # preferring the growing one on ties (unstable modes matter more)
        picked = []
        lo, hi = 0, order.size - 1
        while lo < hi and len(picked) < n_missing:
            a, b = order[lo], order[hi]
            picked.append(max((a, b), key=lambda i: (abs(lam.real[i]), lam.real[i])))
            lo += 1
            hi -= 1
        if lo == hi and len(picked) < n_missing:
            picked.append(order[lo])
        chosen.extend(picked[:n_missing])
    chosen = np.asarray(chosen[:n], dtype=int)
    return lam[chosen], vecs[:, chosen]


def normal_modes(k: np.ndarray, el: np.ndarray | None, params: SystemParams) -> PhononModes:
    """Complex phonon modes from the quadratic problem m x'' = -K x - L x'.

    Solved through the 2N x 2N companion form
    d/dt [dz; p] = [[0, (omega_r/pi) I], [-K, -L]] [dz; p]; eigenvalues
    lam map to complex frequencies omega = i*lam, reported with
    Re omega >= 0 and sorted by |omega|.
    """
    k = np.asarray(k, dtype=float)
    n = k.shape[0]
    if el is None:
        el = np.zeros_like(k)
    el = np.asarray(el, dtype=float)
    if k.shape != (n, n) or el.shape != (n, n):
        raise ValueError("K and L must be square matrices of the same size")
    vf = nondimensional_velocity_factor(params)
    comp = np.block([
        [np.zeros((n, n)), vf * np.eye(n)],
        [-k, -el],
    ])
    try:
        lam, vecs = np.linalg.eig(comp)
    except np.linalg.LinAlgError as exc:
        dump = tempfile.NamedTemporaryFile(
            prefix="atomchain_modes_", suffix=".npz", delete=False
        )
        np.savez(dump, K=k, L=el)
        raise NumericalError(
            f"eigen-solver failed ({exc}); matrices dumped to {dump.name}"
        ) from exc

    lam_sel, vec_sel = _select_representatives(lam, vecs[:n, :], n)
    omega = 1j * lam_sel
    # enforce the Re >= 0 representative of each +/- pair
    flip = omega.real < 0.0
    omega = np.where(flip, -omega.conj(), omega)
    order = np.argsort(np.abs(omega), kind="stable")
    omega = omega[order]
    vec_sel = vec_sel[:, order]
    # normalize mode shapes to unit norm with a deterministic phase
    norms = np.linalg.norm(vec_sel, axis=0)
    norms[norms == 0.0] = 1.0
    vec_sel = vec_sel / norms
    anchor = np.argmax(np.abs(vec_sel), axis=0)
    phases = vec_sel[anchor, np.arange(vec_sel.shape[1])]
    phases = np.where(np.abs(phases) == 0.0, 1.0, phases / np.abs(phases))
    vec_sel = vec_sel / phases

    wscale = float(np.max(np.abs(omega))) if omega.size else 0.0
    ztol = 1e-8 * max(wscale, 1e-300)
    zero_mask = np.abs(omega) <= ztol
    anti = omega.imag > ztol
    damp = omega.imag < -ztol
    return PhononModes(omega, vec_sel, zero_mask, anti & ~zero_mask, damp & ~zero_mask)
