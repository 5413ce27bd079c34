import dataclasses
import math
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from atomchain import (
    SystemParams,
    damping_matrix,
    force,
    normal_modes,
    stiffness_matrix,
    weak_lattice,
    weak_phonon_spectrum,
    weak_stiffness_matrix,
)
from atomchain.coherence import build_coupling_matrix, solve_instantaneous
from atomchain.dynamics import default_ext_damping, initial_state, relax_to_steady_state
from atomchain.model import nondimensional_velocity_factor
from atomchain.phonons import _force_pieces


def params(n, delta, gamma_1d=0.25, s0=0.01):
    return SystemParams(n, gamma_1d, 0.05, delta, 1e-3).with_saturation(s0)


def fd_stiffness(p, z, h=1e-6):
    n = z.size
    k = np.zeros((n, n))
    for col in range(n):
        zp = z.copy()
        zp[col] += h
        zm = z.copy()
        zm[col] -= h
        fp = force(p, zp, solve_instantaneous(p, zp))
        fm = force(p, zm, solve_instantaneous(p, zm))
        k[:, col] = -(fp - fm) / (2.0 * h)
    return k


def relaxed_weak_chain(n, delta, s0=0.01, gamma_1d=0.25):
    p = params(n, delta, gamma_1d=gamma_1d, s0=s0)
    pd = dataclasses.replace(p, ext_damping=default_ext_damping(p))
    return p, relax_to_steady_state(pd, initial_state(pd, weak_lattice(n).positions))


class TestStiffnessMatrix:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        p = params(8, -3.0)
        z = np.cumsum(rng.uniform(0.4, 0.9, 8))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ka = stiffness_matrix(p, z)
        kf = fd_stiffness(p, z)
        assert np.linalg.norm(ka - kf) / np.linalg.norm(kf) < 1e-5

    def test_richardson_step_consistency(self):
        # halving the FD step keeps agreement, so 1e-6 is not a fluke
        p = params(5, -2.0)
        z = np.cumsum(np.array([0.0, 0.7, 0.8, 0.75, 0.66])) + 0.3
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ka = stiffness_matrix(p, z)
        k1 = fd_stiffness(p, z, h=1e-6)
        k2 = fd_stiffness(p, z, h=2e-6)
        assert np.linalg.norm(ka - k1) / np.linalg.norm(k1) < 1e-5
        assert np.linalg.norm(ka - k2) / np.linalg.norm(k2) < 1e-5

    def test_rows_sum_to_zero(self):
        # translation invariance of the force
        p, st = relaxed_weak_chain(7, -25.0)
        k = stiffness_matrix(p, st.z)
        assert np.max(np.abs(k.sum(axis=1))) < 1e-8 * np.max(np.abs(k))

    def test_zero_mode_with_uniform_vector(self):
        p, st = relaxed_weak_chain(6, -20.0)
        k = stiffness_matrix(p, st.z)
        lam, vec = np.linalg.eig(k)
        i = int(np.argmin(np.abs(lam)))
        assert np.abs(lam[i]) < 1e-8 * np.max(np.abs(lam))
        v = np.abs(vec[:, i])
        assert np.max(v) - np.min(v) < 1e-6

    def test_weak_limit_circulant_within_tolerance(self):
        p, st = relaxed_weak_chain(10, -200.0)
        k = stiffness_matrix(p, st.z)
        kw = weak_stiffness_matrix(p, 10)
        assert np.linalg.norm(k - kw) / np.linalg.norm(kw) < 0.01

    def test_symmetric_at_weak_equilibrium(self):
        # the force derives from a potential only in the weak limit
        p, st = relaxed_weak_chain(6, -100.0)
        k = stiffness_matrix(p, st.z)
        assert np.linalg.norm(k - k.T) / np.linalg.norm(k) < 1e-2

    def test_pair_weak_limit_value(self):
        p, st = relaxed_weak_chain(2, -500.0)
        k = stiffness_matrix(p, st.z)
        kappa = 2.0 * math.pi * p.gamma_1d * p.saturation
        assert k == pytest.approx(kappa * np.array([[1, -1], [-1, 1]]), rel=2e-3)

    def test_warns_away_from_equilibrium(self):
        p = params(4, -5.0)
        z = np.array([0.0, 0.8, 1.55, 2.5])
        with pytest.warns(UserWarning, match="equilibrium"):
            stiffness_matrix(p, z)


class TestDampingMatrix:
    def test_vanishes_linearly_with_recoil(self):
        p = params(6, -8.0)
        z = weak_lattice(6).positions
        l1 = damping_matrix(p, z)
        l2 = damping_matrix(dataclasses.replace(p, recoil=5e-4), z)
        assert np.linalg.norm(l2) == pytest.approx(0.5 * np.linalg.norm(l1), rel=1e-9)

    def test_row_sums_small(self):
        # center-of-mass momentum is not damped by internal forces
        p, st = relaxed_weak_chain(8, -30.0)
        el = damping_matrix(p, st.z)
        assert np.max(np.abs(el.sum(axis=1))) < 1e-6 * np.max(np.abs(el))

    def test_coherence_lag_against_time_integration(self):
        # independent oracle: drag the atoms at constant velocity and watch
        # the true coherences lag behind the instantaneous solution by
        # sigma_d = M^-1 (v . grad) sigma_inst
        n = 5
        p = params(n, -2.0, gamma_1d=0.4, s0=0.02)
        rng = np.random.default_rng(11)
        z0 = np.cumsum(rng.uniform(0.6, 0.9, n))
        mom = rng.normal(size=n)
        vf = nondimensional_velocity_factor(p)

        def rhs(t, y):
            return build_coupling_matrix(p, z0 + vf * mom * t) @ y + 1j * p.rabi

        sig0 = solve_instantaneous(p, z0)
        sol = solve_ivp(rhs, (0.0, 30.0), sig0, rtol=1e-12, atol=1e-14)
        z_t = z0 + vf * mom * 30.0
        _, _, _, dsig, fac = _force_pieces(p, z_t)
        lag_measured = sol.y[:, -1] - solve_instantaneous(p, z_t)
        sigma_d = vf * fac.solve(dsig @ mom)
        assert np.max(np.abs(lag_measured - sigma_d)) < 0.01 * np.max(np.abs(sigma_d))

    def test_antidamping_scaling_with_n(self):
        # weak limit: gamma_max ~ N^2 gamma_1d^2 s0 omega_r / delta^2
        rates = {}
        for n in (10, 20, 40):
            p, st = relaxed_weak_chain(n, -20.0)
            k = stiffness_matrix(p, st.z)
            el = damping_matrix(p, st.z)
            rates[n] = normal_modes(k, el, p).max_antidamping
        norm = [rates[n] / n**2 for n in (10, 20, 40)]
        assert max(norm) / min(norm) < 2.0


class TestNormalModes:
    @pytest.mark.parametrize("n", [2, 3, 10])
    def test_weak_lattice_matches_closed_form(self, n):
        p, st = relaxed_weak_chain(n, -1e6)
        k = stiffness_matrix(p, st.z)
        modes = normal_modes(k, None, p)
        got = np.sort(modes.omega.real)
        expect = np.sort(weak_phonon_spectrum(p, n))
        nz = expect > 0
        assert got[nz] == pytest.approx(expect[nz], rel=1e-6)
        assert abs(got[0]) < 1e-8

    def test_pure_decay_with_uniform_damping(self):
        p = params(3, -3.0)
        modes = normal_modes(np.zeros((3, 3)), 0.37 * np.eye(3), p)
        assert modes.omega == pytest.approx(np.full(3, -0.37j))
        assert np.all(modes.damped_mask)

    def test_conjugate_representatives_have_nonnegative_frequency(self):
        p, st = relaxed_weak_chain(5, -15.0)
        k = stiffness_matrix(p, st.z)
        el = damping_matrix(p, st.z)
        modes = normal_modes(k, el, p)
        assert np.all(modes.omega.real >= 0.0)
        assert modes.n == 5

    def test_single_zero_mode(self):
        p, st = relaxed_weak_chain(6, -30.0)
        k = stiffness_matrix(p, st.z)
        modes = normal_modes(k, None, p)
        assert int(np.sum(modes.zero_mask)) == 1

    def test_antidamping_small_in_weak_limit(self):
        p, st = relaxed_weak_chain(12, -40.0)
        k = stiffness_matrix(p, st.z)
        el = damping_matrix(p, st.z)
        modes = normal_modes(k, el, p)
        assert modes.max_antidamping < 0.05 * p.saturation * p.recoil

    def test_csv_export_schema(self, tmp_path):
        p, st = relaxed_weak_chain(4, -12.0)
        k = stiffness_matrix(p, st.z)
        modes = normal_modes(k, damping_matrix(p, st.z), p)
        path = tmp_path / "modes.csv"
        modes.to_csv(path, p, provenance="provenance: test")
        lines = path.read_text().splitlines()
        assert lines[1] == "j,re_omega,im_omega,re_omega_norm,im_omega_norm"
        assert len(lines) == 2 + 4
