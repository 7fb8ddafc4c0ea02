"""Floquet quasienergy spectra, branch tracking, and avoided-crossing gaps.

Quasienergies come from the eigenphases of the single-period propagator
U(tau) mapped to the principal branch (-omega_d/2, omega_d/2].  Branches
are continued across the sweep by maximal eigenvector overlap and labeled
by their dominant dressed product state |a_m b_1 c_2>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace

import numpy as np
import scipy.linalg

from .dressed import dress_modulator, effective_model
from .errors import BranchNotFound, BranchTrackingAmbiguous
from .params import ProtocolParams
from .pauli import kron3
from .propagate import PropagatorConfig, single_period_propagator

#: Branch-continuation overlaps below this are flagged as crossing windows.
CONTINUITY_FLOOR = 0.5
#: Below this the continuation is considered unresolvable.
AMBIGUITY_FLOOR = 0.2

SWEEPABLE = ("omega_1", "omega_2", "j_m1", "j_12", "drive_amp")


def principal_quasienergies(u: np.ndarray, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Quasienergies in (-omega_d/2, omega_d/2] and the Floquet modes at t=0.

    Uses a complex Schur decomposition, which is exact for the normal
    matrix U and keeps the eigenvector basis orthonormal even through
    near-degeneracies.
    """
    t, q = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))  # in (-pi, pi]
    eps = -phases / tau
    # np.angle maps the branch cut to +pi, i.e. eps = -pi/tau; fold that
    # single edge case onto +omega_d/2.
    edge = math.pi / tau
    eps = np.where(eps <= -edge * (1 - 1e-15), eps + 2 * edge, eps)
    return eps, q


def effective_hamiltonian(u: np.ndarray, tau: float) -> np.ndarray:
    """H_eff = (i/tau) log U(tau) on the principal eigenphase branch."""
    eps, q = principal_quasienergies(u, tau)
    return (q * eps[None, :]) @ q.conj().T


def dressed_product_basis(
    p: ProtocolParams, omega_d: float
) -> tuple[list[str], np.ndarray]:
    """Dressed single-qubit product states and their labels.

    Returns (labels, columns) where column k is the 8-vector for label k,
    e.g. "gm g1 e2".  Modulator states come from the driven-modulator
    Hamiltonian, Q1 states from its freezing-renormalized local
    Hamiltonian, Q2 states from its detuning term (energy ordered).
    """
    model = effective_model(p, omega_d)
    mod = model.modulator
    # Excited modulator state: orthogonal complement of the ground state.
    gm = mod.ground_state
    em = np.array([-np.conj(gm[1]), np.conj(gm[0])], dtype=complex)
    m_states = {"gm": gm, "em": em}
    q1_states = {"g1": model.q1_ground, "e1": model.q1_excited}
    q2_states = {"g2": model.q2_ground, "e2": model.q2_excited}

    labels = []
    cols = np.empty((8, 8), dtype=complex)
    k = 0
    for ml, mv in m_states.items():
        for q1l, q1v in q1_states.items():
            for q2l, q2v in q2_states.items():
                labels.append(f"{ml} {q1l} {q2l}")
                cols[:, k] = kron3(mv.reshape(2, 1), q1v.reshape(2, 1), q2v.reshape(2, 1)).ravel()
                k += 1
    return labels, cols


@dataclass(frozen=True)
class FloquetSpectrum:
    sweep_name: str
    sweep_values: np.ndarray
    omega_d: float
    #: (n_points, 8) quasienergies, column = tracked branch.
    quasienergies: np.ndarray
    #: Branch labels assigned at the first sweep point.
    labels: list[str]
    #: (n_points, 8) dominant product-state label per point and branch.
    labels_by_point: np.ndarray
    #: (n_points, 8) overlap with the frozen-modulator subspace.
    modulator_weight: np.ndarray
    #: Sweep indices where some continuation overlap dropped below 0.5.
    flagged_points: list[int]

    def branch(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise BranchNotFound(
                f"branch {label!r} not present; have {self.labels}"
            ) from None


def floquet_spectrum(
    p: ProtocolParams,
    omega_d: float,
    sweep_name: str,
    grid: np.ndarray,
    cfg: PropagatorConfig,
) -> FloquetSpectrum:
    """Quasienergy branches of U(tau) along a monotone parameter sweep."""
    if sweep_name not in SWEEPABLE:
        raise ValueError(f"sweep parameter must be one of {SWEEPABLE}")
    grid = np.asarray(grid, dtype=float)
    d = np.diff(grid)
    if len(grid) < 2 or not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("sweep grid must be strictly monotone with >= 2 points")

    tau = 2 * math.pi / omega_d
    n = len(grid)
    quasi = np.empty((n, 8))
    weights = np.empty((n, 8))
    point_labels = np.empty((n, 8), dtype=object)
    flagged: list[int] = []
    prev_vecs = None
    labels0: list[str] = []

    for i, value in enumerate(grid):
        pi = dc_replace(p, **{sweep_name: float(value)})
        u = single_period_propagator(pi, omega_d, cfg)
        eps, vecs = principal_quasienergies(u, tau)

        if prev_vecs is None:
            order = np.argsort(eps)
        else:
            order = _continue_branches(prev_vecs, vecs, i, flagged)
        eps = eps[order]
        vecs = vecs[:, order]

        dressed_labels, dressed_cols = dressed_product_basis(pi, omega_d)
        ov = np.abs(dressed_cols.conj().T @ vecs) ** 2  # (dressed, branch)
        dominant = np.argmax(ov, axis=0)
        gm_mask = np.array([l.startswith("gm") for l in dressed_labels])
        weights[i] = ov[gm_mask].sum(axis=0)
        for b in range(8):
            point_labels[i, b] = dressed_labels[dominant[b]]
        if i == 0:
            labels0 = [dressed_labels[dominant[b]] for b in range(8)]

        quasi[i] = eps
        prev_vecs = vecs

    return FloquetSpectrum(
        sweep_name=sweep_name,
        sweep_values=grid,
        omega_d=omega_d,
        quasienergies=quasi,
        labels=labels0,
        labels_by_point=point_labels,
        modulator_weight=weights,
        flagged_points=flagged,
    )


def _continue_branches(
    prev: np.ndarray, cur: np.ndarray, index: int, flagged: list[int]
) -> np.ndarray:
    """Greedy maximal-overlap assignment of current to previous branches."""
    ov = np.abs(prev.conj().T @ cur) ** 2  # (prev branch, cur column)
    order = np.full(8, -1, dtype=int)
    taken = np.zeros(8, dtype=bool)
    # Assign pairs in globally decreasing overlap order; a conflict means
    # the winning column was already claimed by a stronger overlap.
    flat = np.argsort(ov, axis=None)[::-1]
    assigned = 0
    worst = 1.0
    for f in flat:
        b, c = divmod(int(f), 8)
        if order[b] >= 0 or taken[c]:
            continue
        order[b] = c
        taken[c] = True
        worst = min(worst, float(ov[b, c]))
        assigned += 1
        if assigned == 8:
            break
    if worst < AMBIGUITY_FLOOR:
        raise BranchTrackingAmbiguous(
            f"branch continuation overlap {worst:.3f} at sweep index {index} "
            "is too small to resolve",
            grid_index=index,
        )
    if worst < CONTINUITY_FLOOR:
        flagged.append(index)
    return order


def _circular_separation(a: np.ndarray, b: np.ndarray, omega_d: float) -> np.ndarray:
    """Distance between quasienergies on the principal-branch circle."""
    d = np.abs(a - b)
    return np.minimum(d, omega_d - d)


def avoided_crossing_gap(spec: FloquetSpectrum, branch_a: str, branch_b: str) -> float:
    """Minimum separation of two branches over the sweep, parabola-refined."""
    ia, ib = spec.branch(branch_a), spec.branch(branch_b)
    sep = _circular_separation(
        spec.quasienergies[:, ia], spec.quasienergies[:, ib], spec.omega_d
    )
    k = int(np.argmin(sep))
    if 0 < k < len(sep) - 1:
        y0, y1, y2 = sep[k - 1], sep[k], sep[k + 1]
        denom = y0 - 2 * y1 + y2
        if denom > 0:
            # Parabolic vertex through three uniform samples.
            delta = 0.5 * (y0 - y2) / denom
            if -1 <= delta <= 1:
                return float(y1 - 0.25 * (y0 - y2) * delta)
    return float(sep[k])


def branch_separation_at(
    spec: FloquetSpectrum, branch_a: str, branch_b: str, value: float
) -> float:
    """Separation of two branches at the sweep value closest to `value`."""
    ia, ib = spec.branch(branch_a), spec.branch(branch_b)
    k = int(np.argmin(np.abs(spec.sweep_values - value)))
    return float(
        _circular_separation(
            spec.quasienergies[k, ia], spec.quasienergies[k, ib], spec.omega_d
        )
    )
