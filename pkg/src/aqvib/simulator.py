"""Noiseless statevector simulation.

Endianness contract: qubit k is bit k (the 2^k place) of the amplitude
index, so basis state |b_0 b_1 ... b_{n-1}> with qubit 0 written first
sits at index sum_k b_k 2^k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qubitmap import PauliSum, parity_array, masks_of, _pop

GATE_KINDS = ("X", "H", "S", "SDG", "RY", "RZ", "CNOT", "PROT")


@dataclass(frozen=True)
class StateVector:
    amps: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude length must be 2^n_qubits")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class Gate:
    """One gate: kind, target qubits, optional angle, Pauli masks for PROT."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("gate qubits must be distinct")


def gate_x(q):
    return Gate("X", (q,))


def gate_h(q):
    return Gate("H", (q,))


def gate_s(q):
    return Gate("S", (q,))


def gate_sdg(q):
    return Gate("SDG", (q,))


def gate_ry(q, angle):
    return Gate("RY", (q,), angle=float(angle))


def gate_rz(q, angle):
    return Gate("RZ", (q,), angle=float(angle))


def gate_cnot(control, target):
    return Gate("CNOT", (control, target))


def gate_pauli_rotation(label_or_masks, angle):
    """exp(-i angle/2 P) for a Pauli string P given as label or (x, z) masks."""
    if isinstance(label_or_masks, str):
        x, z = masks_of(label_or_masks)
    else:
        x, z = label_or_masks
    support = tuple(k for k in range(max((x | z).bit_length(), 1)) if (x | z) >> k & 1)
    return Gate("PROT", support, angle=float(angle), x=x, z=z)


def init_basis_state(bits) -> StateVector:
    """Computational basis state from a bitstring ('010') or bit sequence."""
    if isinstance(bits, str):
        bit_list = [int(b) for b in bits]
    else:
        bit_list = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bit_list):
        raise ValueError("bits must be 0 or 1")
    n = len(bit_list)
    amps = np.zeros(1 << n, dtype=complex)
    amps[sum(b << k for k, b in enumerate(bit_list))] = 1.0
    return StateVector(amps, n)


def _single_qubit_matrix(kind: str, angle: float | None) -> np.ndarray:
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if kind == "S":
        return np.diag([1, 1j]).astype(complex)
    if kind == "SDG":
        return np.diag([1, -1j]).astype(complex)
    if kind == "RY":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
    raise ValueError(kind)


def apply_pauli(amps: np.ndarray, x: int, z: int) -> np.ndarray:
    """P|psi> for the Hermitian string with masks (x, z)."""
    idx = np.arange(amps.size)
    pref = 1j ** _pop(x & z)
    vals = pref * (1.0 - 2.0 * parity_array(idx & z)) * amps
    out = np.empty_like(amps)
    out[idx ^ x] = vals
    return out


def apply_gate(s: StateVector, g: Gate) -> StateVector:
    n = s.n_qubits
    if any(q >= n or q < 0 for q in g.qubits):
        raise IndexError(f"gate qubits {g.qubits} out of range for {n} qubits")
    amps = s.amps

    if g.kind in ("X", "H", "S", "SDG", "RY", "RZ"):
        (q,) = g.qubits
        u = _single_qubit_matrix(g.kind, g.angle)
        work = amps.reshape(1 << (n - q - 1), 2, 1 << q)
        out = np.einsum("ab,ibj->iaj", u, work).reshape(-1)
        return StateVector(out, n)

    if g.kind == "CNOT":
        control, target = g.qubits
        idx = np.arange(amps.size)
        sel = ((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)
        src = idx[sel]
        out = amps.copy()
        out[src], out[src | (1 << target)] = amps[src | (1 << target)], amps[src]
        return StateVector(out, n)

    if g.kind == "PROT":
        if (g.x | g.z) >> n:
            raise IndexError("Pauli rotation masks exceed qubit count")
        half = g.angle / 2
        out = np.cos(half) * amps - 1j * np.sin(half) * apply_pauli(amps, g.x, g.z)
        return StateVector(out, n)

    raise ValueError(g.kind)


def run_circuit(s: StateVector, gates) -> StateVector:
    for g in gates:
        s = apply_gate(s, g)
    return s


def expectation(s: StateVector, p: PauliSum) -> float:
    """<s|P|s> summed over terms; the imaginary residue must be negligible."""
    if p.n_qubits != s.n_qubits:
        raise ValueError(f"qubit counts differ: state {s.n_qubits}, operator {p.n_qubits}")
    total = 0.0 + 0.0j
    for x, z, c in p.items():
        total += c * np.vdot(s.amps, apply_pauli(s.amps, x, z))
    if abs(total.imag) > 1e-10:
        raise ValueError(f"imaginary expectation residue {total.imag:.3e}")
    return float(total.real)


def fidelity(s1: StateVector, s2: StateVector) -> float:
    if s1.n_qubits != s2.n_qubits:
        raise ValueError("qubit counts differ")
    return float(abs(np.vdot(s1.amps, s2.amps)) ** 2)
