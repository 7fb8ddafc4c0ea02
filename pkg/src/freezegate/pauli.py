"""Pauli operators, tensor embedding, and Hamiltonian builders.

Tensor ordering is (M, Q1, Q2), modulator most significant.  All matrices
are dense complex arrays; the largest object anywhere in the library is
16x16 (a Choi matrix), so sparsity is never worth it.
"""

from __future__ import annotations

import numpy as np

from .params import ProtocolParams

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

QUBITS = ("m", "1", "2")


def kron3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.kron(a, np.kron(b, c))


def embed(op: np.ndarray, qubit: str) -> np.ndarray:
    """Embed a single-qubit operator into the 8-dim (M, Q1, Q2) space."""
    if qubit == "m":
        return kron3(op, I2, I2)
    if qubit == "1":
        return kron3(I2, op, I2)
    if qubit == "2":
        return kron3(I2, I2, op)
    raise ValueError(f"unknown qubit label {qubit!r}")


def product_state(bits: tuple[int, int, int]) -> np.ndarray:
    """Computational product state |b_m b_1 b_2> as an 8-vector."""
    idx = (bits[0] << 2) | (bits[1] << 1) | bits[2]
    v = np.zeros(8, dtype=complex)
    v[idx] = 1.0
    return v


def lab_static(p: ProtocolParams) -> np.ndarray:
    """Drive-independent part of the lab-frame Hamiltonian."""
    h = -(p.omega_m / 2) * embed(SZ, "m")
    h += -(p.omega_1 / 2) * embed(SZ, "1")
    h += -(p.omega_2 / 2) * embed(SZ, "2")
    h += p.j_m1 * embed(SX, "m") @ embed(SX, "1")
    h += p.j_12 * embed(SX, "1") @ embed(SX, "2")
    return h


def lab_drive_operator() -> np.ndarray:
    """Operator multiplying drive_amp*cos(omega_d t): sigma_x on the modulator."""
    return embed(SX, "m")


def build_lab_hamiltonian(p: ProtocolParams, omega_d: float, t: float) -> np.ndarray:
    """Full lab-frame Hamiltonian at time t with a cosine transverse drive on M."""
    return lab_static(p) + p.drive_amp * np.cos(omega_d * t) * lab_drive_operator()


def build_rotating_hamiltonian(p: ProtocolParams, omega_d: float) -> np.ndarray:
    """Time-independent Hamiltonian in the frame rotating at omega_d (RWA).

    Detunings are delta_i = omega_i - omega_d; exchange terms take the
    (xx + yy)/2 flip-flop form after dropping the fast-rotating pieces.
    """
    dm, d1, d2 = p.detunings(omega_d)
    h = (p.drive_amp / 2) * embed(SX, "m") - (dm / 2) * embed(SZ, "m")
    h += -(d1 / 2) * embed(SZ, "1") - (d2 / 2) * embed(SZ, "2")
    h += (p.j_m1 / 2) * (
        embed(SX, "m") @ embed(SX, "1") + embed(SY, "m") @ embed(SY, "1")
    )
    h += (p.j_12 / 2) * (
        embed(SX, "1") @ embed(SX, "2") + embed(SY, "1") @ embed(SY, "2")
    )
    return h


def frame_map(omega_d: float, t: float) -> np.ndarray:
    """Rotating-frame map W(t) = exp(-i (omega_d t / 2) sum_k sigma_k^z).

    States transform as |psi'> = W(t)|psi_lab>; with this sign the
    transformed single-qubit generators are -(delta_i/2) sigma_i^z.
    W is diagonal, so it is built directly from the z-parity of each
    basis state.
    """
    phases = np.empty(8, dtype=complex)
    for idx in range(8):
        bits = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1)
        s = sum(1 if b == 0 else -1 for b in bits)
        phases[idx] = np.exp(-1j * omega_d * t * s / 2)
    return np.diag(phases)


def frame_map_q12(omega_d: float, t: float) -> np.ndarray:
    """Restriction of the frame map to the Q1Q2 factor (4x4 diagonal)."""
    phases = np.empty(4, dtype=complex)
    for idx in range(4):
        bits = ((idx >> 1) & 1, idx & 1)
        s = sum(1 if b == 0 else -1 for b in bits)
        phases[idx] = np.exp(-1j * omega_d * t * s / 2)
    return np.diag(phases)


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T)))


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
