"""Phonon spectrum of the weak-scattering lattice, two ways.

The closed-form mode frequencies of the circulant stiffness matrix are
compared with the numerical linearization of the full force; the tiny
imaginary parts produced by the delayed coherence response (anti-damping)
are shown alongside.
"""

import dataclasses
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from atomchain import SystemParams, initial_state, relax_to_steady_state, weak_lattice, weak_phonon_spectrum
from atomchain.dynamics import default_ext_damping
from atomchain.phonons import damping_matrix, normal_modes, stiffness_matrix

N = 40
params = SystemParams(N, 0.25, 0.05, -30.0, 1e-3).with_saturation(0.01)
damped = dataclasses.replace(params, ext_damping=default_ext_damping(params))
eq = relax_to_steady_state(damped, initial_state(damped, weak_lattice(N).positions))

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    k = stiffness_matrix(params, eq.z)
el = damping_matrix(params, eq.z)
modes = normal_modes(k, el, params)

norm = np.sqrt(params.recoil * params.saturation * N * params.gamma_1d)
closed = np.sort(weak_phonon_spectrum(params, N)) / norm

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
ax1.plot(np.sort(modes.omega.real) / norm, "o", ms=4, label="numerical linearization")
ax1.plot(closed, "+", ms=8, label="closed form (weak limit)")
ax1.set_xlabel("mode index")
ax1.set_ylabel("$\\omega_{ph} / \\sqrt{\\omega_r s_0 N \\Gamma_{1D}}$")
ax1.legend(fontsize=8)

ax2.plot(modes.omega.real / norm, modes.omega.imag / (params.saturation * params.recoil),
         "o", ms=4)
ax2.axhline(0.0, color="k", lw=0.8)
ax2.set_xlabel("$\\omega_{ph} / \\sqrt{\\omega_r s_0 N \\Gamma_{1D}}$")
ax2.set_ylabel("$\\gamma_{ph} / (s_0 \\omega_r)$")
ax2.set_title("delay-induced (anti-)damping")

for a in (ax1, ax2):
    a.grid(alpha=0.3)
print(f"max anti-damping rate: {modes.max_antidamping:.3e} Gamma "
      f"({modes.max_antidamping / (params.saturation * params.recoil):.3f} s0*wr)")
fig.tight_layout()
fig.savefig("demos/output/05_phonon_modes.png", dpi=150)
print("wrote demos/output/05_phonon_modes.png")
