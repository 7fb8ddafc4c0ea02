"""Quasienergy spectra, branch continuation, and avoided-crossing gaps."""

import math

import numpy as np
import pytest
import scipy.linalg

from freezegate.dressed import effective_model, solve_omega_d_on
from freezegate.errors import BranchNotFound
from freezegate.floquet import (
    avoided_crossing_gap,
    dressed_product_basis,
    effective_hamiltonian,
    floquet_spectrum,
    principal_quasienergies,
)
from freezegate.params import BASELINE
from freezegate.propagate import PropagatorConfig, single_period_propagator

CFG = PropagatorConfig(steps_per_period=256)


class TestPrincipalQuasienergies:
    def test_identity(self):
        eps, q = principal_quasienergies(np.eye(8, dtype=complex), 2 * math.pi)
        np.testing.assert_allclose(eps, 0.0, atol=1e-14)
        np.testing.assert_allclose(q.conj().T @ q, np.eye(8), atol=1e-13)

    def test_static_diagonal(self):
        # U = exp(-i H tau) for diagonal H with entries inside the principal
        # zone reproduces the entries exactly.
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        h = np.diag(np.linspace(-0.4, 0.45, 8) * omega_d)
        u = scipy.linalg.expm(-1j * h * tau)
        eps, _ = principal_quasienergies(u, tau)
        np.testing.assert_allclose(np.sort(eps), np.sort(np.diag(h)), atol=1e-12)

    def test_principal_branch_bounds(self):
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        u = single_period_propagator(BASELINE, omega_d, CFG)
        eps, _ = principal_quasienergies(u, tau)
        assert np.all(eps > -omega_d / 2 - 1e-12)
        assert np.all(eps <= omega_d / 2 + 1e-12)

    def test_folding(self):
        # An energy outside the zone folds back in by omega_d.
        omega_d = 1.0
        tau = 2 * math.pi
        h = np.diag([0.7] + [0.0] * 7)
        u = scipy.linalg.expm(-1j * h * tau)
        eps, _ = principal_quasienergies(u, tau)
        assert np.min(eps) == pytest.approx(-0.3, abs=1e-12)
        assert np.sum(np.abs(eps) < 1e-12) == 7


class TestEffectiveHamiltonian:
    def test_hermitian_and_consistent(self):
        omega_d = 1.004
        tau = 2 * math.pi / omega_d
        u = single_period_propagator(BASELINE, omega_d, CFG)
        heff = effective_hamiltonian(u, tau)
        assert np.max(np.abs(heff - heff.conj().T)) < 1e-10
        np.testing.assert_allclose(scipy.linalg.expm(-1j * heff * tau), u, atol=1e-10)


class TestDressedBasis:
    def test_orthonormal_and_labeled(self):
        labels, cols = dressed_product_basis(BASELINE, 1.004)
        assert len(labels) == 8
        assert "gm g1 e2" in labels and "em e1 g2" in labels
        np.testing.assert_allclose(cols.conj().T @ cols, np.eye(8), atol=1e-12)


class TestSpectra:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            floquet_spectrum(BASELINE, 1.004, "omega_2", np.array([1.0, 1.0, 1.002]), CFG)
        with pytest.raises(ValueError):
            floquet_spectrum(BASELINE, 1.004, "omega_d_off", np.linspace(1.0, 1.01, 5), CFG)

    def test_decoupled_static_lines(self):
        # Without couplings or drive the quasienergies are the folded
        # single-particle sums; sweep omega_2 and compare pointwise.
        p = BASELINE.with_(j_m1=0.0, j_12=0.0, drive_amp=0.0)
        omega_d = 1.004
        grid = np.linspace(1.0005, 1.0035, 7)
        spec = floquet_spectrum(p, omega_d, "omega_2", grid, CFG)
        for i, w2 in enumerate(grid):
            energies = [
                -0.5 * (a * p.omega_m + b * p.omega_1 + c * w2)
                for a in (1, -1)
                for b in (1, -1)
                for c in (1, -1)
            ]
            folded = [
                (e + omega_d / 2) % omega_d - omega_d / 2 for e in energies
            ]
            # map the open edge back, matching the principal convention
            folded = [e + omega_d if e <= -omega_d / 2 else e for e in folded]
            np.testing.assert_allclose(
                np.sort(spec.quasienergies[i]), np.sort(folded), atol=1e-9
            )

    def test_branch_lookup(self):
        grid = np.linspace(1.0012, 1.0022, 5)
        spec = floquet_spectrum(BASELINE, BASELINE.omega_d_off, "omega_2", grid, CFG)
        assert 0 <= spec.branch("gm e1 g2") < 8
        with pytest.raises(BranchNotFound):
            spec.branch("xx yy zz")

    def test_off_regime_no_crossing(self):
        # Scanning omega_2 through the bare resonance at the off drive
        # frequency: the single-excitation branches stay separated.
        grid = np.linspace(1.0012, 1.0022, 21)
        spec = floquet_spectrum(BASELINE, BASELINE.omega_d_off, "omega_2", grid, CFG)
        gap = avoided_crossing_gap(spec, "gm e1 g2", "gm g1 e2")
        m = effective_model(BASELINE, BASELINE.omega_d_off)
        assert gap > 2 * m.j12_eff  # never collapses to the coupling scale


class TestOnGap:
    def solve_gap(self, p, n=41, halfwidth=4e-4):
        root = solve_omega_d_on(p)
        model = effective_model(p, root.omega_d)
        grid = np.linspace(p.omega_2 - halfwidth, p.omega_2 + halfwidth, n)
        spec = floquet_spectrum(p, root.omega_d, "omega_2", grid, CFG)
        gap = avoided_crossing_gap(spec, "gm e1 g2", "gm g1 e2")
        return gap, model

    def test_gap_matches_effective_coupling(self):
        gap, model = self.solve_gap(BASELINE)
        assert gap == pytest.approx(2 * model.j12_eff, rel=0.05)

    def test_gap_scales_linearly_with_j12(self):
        gap1, model1 = self.solve_gap(BASELINE)
        gap2, model2 = self.solve_gap(BASELINE.with_(j_12=2e-4))
        assert gap2 == pytest.approx(2 * gap1, rel=0.05)
        assert model2.j12_eff == pytest.approx(2 * model1.j12_eff, rel=1e-10)

    def test_gap_across_coupling_decade(self):
        for j12 in (3e-5, 1e-4, 3e-4):
            gap, model = self.solve_gap(BASELINE.with_(j_12=j12))
            assert gap == pytest.approx(2 * model.j12_eff, rel=0.08)

    def test_gap_closes_without_coupling(self):
        gap, _ = self.solve_gap(BASELINE.with_(j_12=0.0))
        # residual gap from higher-order terms only
        assert gap < 0.1 * 2 * effective_model(
            BASELINE, solve_omega_d_on(BASELINE).omega_d
        ).j12_eff
