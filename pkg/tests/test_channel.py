"""Channel extraction, compensation gates, and iSWAP fidelity metrics."""

import numpy as np
import pytest

from freezegate.channel import (
    avg_fidelity_choi,
    channel_from_kraus,
    choi_distance_bound,
    compensation_gates,
    extract_channel,
    fidelity_report,
    haar_average_fidelity,
    iswap_unitary,
    maximally_entangled,
    modulator_return,
    off_leakage,
    unitary_channel,
)
from freezegate.dressed import effective_model, off_ratio, solve_omega_d_on
from freezegate.params import BASELINE, ProtocolParams
from freezegate.propagate import PropagatorConfig

CFG = PropagatorConfig(steps_per_period=256)


class TestTargets:
    def test_iswap_matrix(self):
        u = iswap_unitary()
        expected = np.array(
            [
                [1, 0, 0, 0],
                [0, 0, 1j, 0],
                [0, 1j, 0, 0],
                [0, 0, 0, 1],
            ],
            dtype=complex,
        )
        np.testing.assert_allclose(u, expected, atol=1e-15)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-15)

    def test_maximally_entangled_norm(self):
        phi = maximally_entangled()
        assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-15)


class TestChoiMachinery:
    def test_unitary_channel_is_trace_4(self):
        ch = unitary_channel(iswap_unitary())
        assert np.trace(ch.choi).real == pytest.approx(4.0, abs=1e-12)
        assert ch.trace_defect < 1e-12
        assert ch.min_choi_eigenvalue > -1e-12

    def test_exact_iswap_scores_unity(self):
        ch = unitary_channel(iswap_unitary())
        assert avg_fidelity_choi(ch, iswap_unitary()) == pytest.approx(1.0, abs=1e-12)

    def test_identity_vs_iswap(self):
        # F_e = |Tr(U)/d|^2 / ... : Tr(iSWAP) = 2, so F_e = |2/4|^2 = 1/4
        # and F_avg = (4*(1/4)+1)/5 = 0.4.
        ch = unitary_channel(np.eye(4))
        assert avg_fidelity_choi(ch, iswap_unitary()) == pytest.approx(0.4, abs=1e-12)

    def test_sign_convention_distinguishable(self):
        ch = unitary_channel(iswap_unitary(1.0))
        f_plus = avg_fidelity_choi(ch, iswap_unitary(1.0))
        f_minus = avg_fidelity_choi(ch, iswap_unitary(-1.0))
        assert f_plus == pytest.approx(1.0, abs=1e-12)
        assert f_minus < 0.9

    def test_depolarizing_kraus(self):
        # Full depolarizing channel via the 16 normalized Pauli products:
        # F_e = 1/16 against any unitary, so F_avg = (4/16 + 1)/5 = 0.25.
        paulis_1q = [
            np.eye(2),
            np.array([[0, 1], [1, 0]]),
            np.array([[0, -1j], [1j, 0]]),
            np.array([[1, 0], [0, -1]]),
        ]
        kraus = [
            0.25 * np.kron(a, b) for a in paulis_1q for b in paulis_1q
        ]
        ch = channel_from_kraus(kraus)
        assert ch.trace_defect < 1e-12
        assert avg_fidelity_choi(ch, iswap_unitary()) == pytest.approx(0.25, abs=1e-12)

    def test_choi_distance(self):
        a = unitary_channel(np.eye(4))
        assert choi_distance_bound(a, a) == pytest.approx(0.0, abs=1e-12)
        b = unitary_channel(iswap_unitary())
        d = choi_distance_bound(a, b)
        assert 0.0 < d <= 2.0 + 1e-12


class TestCompensation:
    def test_zero_duration_identity(self):
        pre, post, _ = compensation_gates(BASELINE, 1.004, 0.0)
        np.testing.assert_allclose(pre @ pre.conj().T, np.eye(4), atol=1e-13)
        np.testing.assert_allclose(post @ pre, np.eye(4), atol=1e-13)

    def test_gates_are_unitary(self):
        pre, post, _ = compensation_gates(BASELINE, 1.004, 1234.5)
        for g in (pre, post):
            np.testing.assert_allclose(g @ g.conj().T, np.eye(4), atol=1e-12)

    def test_all_couplings_zero_gives_identity_channel(self):
        # No couplings: the compensation exactly undoes all local dynamics.
        p = ProtocolParams(j_m1=0.0, j_12=0.0)
        ch = extract_channel(p, "off", 5000.0, CFG)
        np.testing.assert_allclose(
            ch.choi, unitary_channel(np.eye(4)).choi, atol=1e-10
        )

    def test_frozen_modulator_self_test(self):
        # j_12 = 0 over a full gate time: the compensated channel should be
        # the identity up to the freezing error of the modulator.
        p = BASELINE.with_(j_12=0.0)
        duration = effective_model(
            BASELINE, solve_omega_d_on(BASELINE).omega_d
        ).t_gate
        ch = extract_channel(p.with_(omega_d_on=solve_omega_d_on(BASELINE).omega_d), "on", duration, CFG)
        f = avg_fidelity_choi(ch, np.eye(4))
        assert f > 1.0 - 1e-3


class TestExtractedChannel:
    def test_choi_positive_and_tp(self):
        ch = extract_channel(BASELINE, "off", 3000.0, CFG)
        assert ch.trace_defect < 1e-9
        assert ch.hermiticity_defect < 1e-12
        assert ch.min_choi_eigenvalue > -1e-10
        assert np.trace(ch.choi).real == pytest.approx(4.0, abs=1e-9)

    def test_zero_duration_choi(self):
        # Identity channel: Choi = 4 |Phi><Phi| with the normalized |Phi|.
        ch = extract_channel(BASELINE, "off", 0.0, CFG)
        phi = maximally_entangled()
        np.testing.assert_allclose(ch.choi, 4 * np.outer(phi, phi.conj()), atol=1e-10)
        assert avg_fidelity_choi(ch, np.eye(4)) == pytest.approx(1.0, abs=1e-12)


class TestHaarEstimator:
    def test_consistent_with_choi_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            # random unitary channel via QR
            z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            q, r = np.linalg.qr(z)
            q = q * (np.diag(r) / np.abs(np.diag(r)))
            ch = unitary_channel(q)
            exact = avg_fidelity_choi(ch, iswap_unitary())
            est = haar_average_fidelity(ch, iswap_unitary(), samples=2000, seed=1)
            assert abs(est.mean - exact) < 3 * est.stderr + 1e-4

    def test_rejects_bad_samples(self):
        with pytest.raises(ValueError):
            haar_average_fidelity(unitary_channel(np.eye(4)), np.eye(4), 0, 0)


class TestOffLeakage:
    def test_zero_without_coupling(self):
        p = BASELINE.with_(j_12=0.0)
        assert off_leakage(p, duration=2000.0, cfg=CFG) < 1e-10

    def test_small_at_defaults(self):
        # Transfer is suppressed by the dressed detuning and by the residual
        # modulator hybridization; both mechanisms sit at the 1e-3 scale
        # here, far below a resonant swap.
        m = effective_model(BASELINE, BASELINE.omega_d_off)
        two_level = m.j12_eff**2 / (m.j12_eff**2 + (m.delta_12_prime / 2) ** 2)
        leak = off_leakage(BASELINE, cfg=CFG)
        assert two_level / 4 < leak < 1e-2

    def test_small_at_optimized_point(self):
        from freezegate.params import OPTIMIZED

        leak = off_leakage(OPTIMIZED, cfg=CFG)
        assert leak < 1e-2


class TestModulatorReturn:
    def test_high_in_both_regimes(self):
        duration = 3000.0
        for regime in ("on", "off"):
            r = modulator_return(BASELINE, regime, duration, CFG)
            bound = 1.0 - 10 * (BASELINE.j_m1 / BASELINE.drive_amp) ** 2
            assert bound < r <= 1.0 + 1e-12


class TestFidelityReport:
    def test_baseline_report(self):
        rep = fidelity_report(BASELINE, CFG)
        assert rep.method == "choi-formula"
        assert rep.infidelity == pytest.approx(1.0 - rep.avg_fidelity, abs=1e-15)
        assert 0.0 <= rep.avg_fidelity <= 1.0
        assert rep.off_ratio == pytest.approx(off_ratio(BASELINE), rel=1e-12)
        assert rep.t_gate > 0
        assert 0.9 < rep.modulator_return <= 1.0
        d = rep.to_dict()
        assert set(d) == {
            "avg_fidelity",
            "infidelity",
            "off_ratio",
            "t_gate",
            "omega_d_on",
            "modulator_return",
            "method",
        }

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            fidelity_report(BASELINE, CFG, method="teleportation")
