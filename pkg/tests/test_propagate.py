"""Lab-frame propagation: correctness against dense oracles and invariants."""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg

from freezegate.dressed import effective_model, solve_omega_d_on
from freezegate.errors import StepTooCoarse
from freezegate.params import BASELINE, ProtocolParams
from freezegate.pauli import build_lab_hamiltonian, product_state, unitarity_defect
from freezegate.propagate import (
    PropagatorConfig,
    export_trajectory,
    interval_propagator,
    propagate,
    single_period_propagator,
    total_propagator,
)

CFG = PropagatorConfig(steps_per_period=256)


class TestConfig:
    def test_rejects_bad_method(self):
        with pytest.raises(ValueError):
            PropagatorConfig(method="rk4")

    def test_rejects_zero_steps(self):
        with pytest.raises(ValueError):
            PropagatorConfig(steps_per_period=0)


class TestExactCases:
    def test_t0_identity(self):
        np.testing.assert_allclose(
            total_propagator(BASELINE, 1.004, 0.0, CFG), np.eye(8), atol=1e-15
        )

    def test_decoupled_phase(self):
        # Static decoupled system: |000> acquires phase e^{+i 3 omega t / 2}
        # ... each -(omega/2) sigma^z contributes energy -omega/2 on |0>.
        p = ProtocolParams(omega_2=1.0, j_m1=0.0, j_12=0.0, drive_amp=0.0)
        t = 7.3
        u = total_propagator(p, 1.0, t, CFG)
        psi = u @ product_state((0, 0, 0))
        expected = np.exp(1j * 1.5 * t)
        assert psi[0] == pytest.approx(expected, abs=1e-10)
        np.testing.assert_allclose(psi[1:], 0.0, atol=1e-14)

    @pytest.mark.parametrize("method", ["midpoint", "magnus4"])
    def test_static_hamiltonian_matches_expm(self, method):
        # Without the drive the Hamiltonian is time independent and every
        # step exponential is exact.
        p = BASELINE.with_(drive_amp=0.0)
        t = 25.0
        h = build_lab_hamiltonian(p, 1.004, 0.0)
        u = interval_propagator(p, 1.004, 0.0, t, 64, method)
        np.testing.assert_allclose(u, scipy.linalg.expm(-1j * h * t), atol=1e-12)

    def test_semigroup_composition(self):
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        u_full = interval_propagator(BASELINE, omega_d, 0.0, tau, 256)
        u_a = interval_propagator(BASELINE, omega_d, 0.0, tau / 2, 128)
        u_b = interval_propagator(BASELINE, omega_d, tau / 2, tau, 128)
        np.testing.assert_allclose(u_b @ u_a, u_full, atol=1e-12)

    def test_stroboscopic_powers(self):
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        u_tau = single_period_propagator(BASELINE, omega_d, CFG)
        for n in (1, 7, 100):
            u_n = total_propagator(BASELINE, omega_d, n * tau, CFG)
            np.testing.assert_allclose(
                u_n, np.linalg.matrix_power(u_tau, n), atol=1e-9
            )


class TestAgainstODESolver:
    def test_gate_evolution_matches_dop853(self):
        p = BASELINE
        root = solve_omega_d_on(p)
        omega_d = root.omega_d
        model = effective_model(p, omega_d)
        t_final = min(model.t_gate, 2000.0)  # keep the ODE solve affordable

        psi0 = product_state((0, 1, 0))
        final = propagate(p, omega_d, t_final, PropagatorConfig(steps_per_period=512, method="magnus4"), psi0)

        def rhs(t, y):
            psi = y[:8] + 1j * y[8:]
            dpsi = -1j * (build_lab_hamiltonian(p, omega_d, t) @ psi)
            return np.concatenate([dpsi.real, dpsi.imag])

        sol = scipy.integrate.solve_ivp(
            rhs,
            (0.0, t_final),
            np.concatenate([psi0.real, psi0.imag]),
            method="DOP853",
            rtol=1e-10,
            atol=1e-12,
        )
        ref = sol.y[:8, -1] + 1j * sol.y[8:, -1]
        assert np.linalg.norm(final - ref) < 1e-7


class TestConvergence:
    def orders(self, method, base_steps=32):
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        errs = []
        ref = interval_propagator(BASELINE, omega_d, 0.0, tau, 4096, "magnus4")
        for n in (base_steps, 2 * base_steps, 4 * base_steps):
            u = interval_propagator(BASELINE, omega_d, 0.0, tau, n, method)
            errs.append(np.linalg.norm(u - ref, 2))
        return [math.log2(errs[i] / errs[i + 1]) for i in range(2)]

    def test_midpoint_is_second_order(self):
        for o in self.orders("midpoint"):
            assert 1.8 < o < 2.3

    def test_magnus4_is_fourth_order(self):
        for o in self.orders("magnus4", base_steps=8):
            assert 3.5 < o < 4.6

    def test_magnus4_beats_midpoint(self):
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        ref = interval_propagator(BASELINE, omega_d, 0.0, tau, 4096, "magnus4")
        e_mid = np.linalg.norm(interval_propagator(BASELINE, omega_d, 0.0, tau, 64, "midpoint") - ref, 2)
        e_mag = np.linalg.norm(interval_propagator(BASELINE, omega_d, 0.0, tau, 64, "magnus4") - ref, 2)
        assert e_mag < e_mid / 50

    def test_step_too_coarse_raises(self):
        cfg = PropagatorConfig(
            steps_per_period=4, convergence_check=True, convergence_tol=1e-12
        )
        with pytest.raises(StepTooCoarse) as exc:
            single_period_propagator(BASELINE, 1.004, cfg)
        assert exc.value.change > 1e-12


class TestUnitarity:
    @pytest.mark.parametrize("method", ["midpoint", "magnus4"])
    def test_long_evolution_stays_unitary(self, method):
        cfg = PropagatorConfig(steps_per_period=128, method=method)
        u = total_propagator(BASELINE, 1.004, 5000.0, cfg)
        assert unitarity_defect(u) < 1e-10


class TestTrajectory:
    def test_decoupled_populations_constant(self):
        p = ProtocolParams(omega_2=1.0, j_m1=0.0, j_12=0.0, drive_amp=0.0)
        table = export_trajectory(p, 1.0, product_state((0, 1, 0)), 50.0, 11, CFG)
        assert table.columns[0] == "t"
        pop_cols = [i for i, c in enumerate(table.columns) if c.startswith("pop_")]
        pops = table.data[:, pop_cols]
        idx = table.columns.index("pop_010")
        np.testing.assert_allclose(table.data[:, idx], 1.0, atol=1e-12)
        np.testing.assert_allclose(pops.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(table.data[:, table.columns.index("sz_1")], -1.0, atol=1e-12)

    def test_on_point_exchange(self):
        # At resonance the Q1 excitation swaps into Q2 with half period
        # t_gate; at t = 2 t_gate it has returned.
        p = BASELINE
        root = solve_omega_d_on(p)
        model = effective_model(p, root.omega_d)
        table = export_trajectory(
            p, root.omega_d, product_state((0, 1, 0)), 2 * model.t_gate, 5, CFG
        )
        sz1 = table.data[:, table.columns.index("sz_1")]
        sz2 = table.data[:, table.columns.index("sz_2")]
        # start: Q1 excited, Q2 ground
        assert sz1[0] == pytest.approx(-1.0, abs=1e-10)
        assert sz2[0] == pytest.approx(1.0, abs=1e-10)
        # midpoint (t = t_gate): the excitation has mostly moved to Q2.  The
        # closed-form resonance sits slightly off the exact one at this
        # unoptimized point, so the transfer is a detuned Rabi oscillation:
        # incomplete at the half period but returning fully at the full one.
        assert sz1[2] > 0.5
        assert sz2[2] < -0.5
        # excitation is conserved between the two targets
        np.testing.assert_allclose(sz1 + sz2, 0.0, atol=0.02)
        # full period: back on Q1
        assert sz1[4] < -0.99

    def test_off_regime_frozen(self):
        from freezegate.dressed import dress_modulator

        # Modulator prepared in its dressed ground state, Q1 excited.
        gm = dress_modulator(
            BASELINE.drive_amp, BASELINE.omega_m - BASELINE.omega_d_off
        ).ground_state
        psi0 = np.kron(gm, np.kron([0.0, 1.0], [1.0, 0.0])).astype(complex)
        table = export_trajectory(
            BASELINE, BASELINE.omega_d_off, psi0, 20000.0, 21, CFG
        )
        sz2 = table.data[:, table.columns.index("sz_2")]
        # Q2 stays near its ground state (sz = +1): the off-resonant exchange
        # leaks population only at the (j12_eff / detuning)^2 level, a few
        # parts in 1e3 here.
        assert sz2[0] == pytest.approx(1.0, abs=1e-12)
        assert np.max(1.0 - sz2) < 1e-2
        mod = table.data[:, table.columns.index("mod_ground_pop")]
        assert np.min(mod) > 0.99

    def test_rejects_unnormalized_state(self):
        bad = np.ones(8, dtype=complex)
        with pytest.raises(ValueError):
            export_trajectory(BASELINE, 1.004, bad, 1.0, 3, CFG)
        with pytest.raises(ValueError):
            propagate(BASELINE, 1.004, 1.0, CFG, bad)
