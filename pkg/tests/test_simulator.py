"""Statevector simulator vs explicit dense matrix oracles."""

import numpy as np
import pytest
import scipy.linalg

from aqvib.qubitmap import PauliSum
from aqvib.simulator import (
    Gate, StateVector, apply_gate, expectation, fidelity, gate_cnot, gate_h,
    gate_pauli_rotation, gate_ry, gate_rz, gate_s, gate_sdg, gate_x,
    init_basis_state, run_circuit,
)
from test_qubitmap import kron_label

_1Q = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
}


def random_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(amps / np.linalg.norm(amps), n)


def embed_1q(u, q, n):
    out = np.eye(1, dtype=complex)
    for k in range(n):
        out = np.kron(u if k == q else np.eye(2, dtype=complex), out)
    return out


def cnot_dense(control, target, n):
    dim = 1 << n
    u = np.zeros((dim, dim))
    for idx in range(dim):
        j = idx ^ (1 << target) if idx >> control & 1 else idx
        u[j, idx] = 1.0
    return u


def test_endianness_qubit0_is_lsb():
    s = init_basis_state("10")
    assert s.amps[1] == 1.0 and np.count_nonzero(s.amps) == 1
    s = init_basis_state("001")
    assert s.amps[4] == 1.0
    s = init_basis_state([1, 1, 0, 1])
    assert s.amps[1 + 2 + 8] == 1.0
    with pytest.raises(ValueError, match="0 or 1"):
        init_basis_state("102")


def test_elementary_gates_on_basis_states():
    one = apply_gate(init_basis_state("0"), gate_ry(0, np.pi))
    assert abs(one.amps[1] - 1.0) < 1e-15 and abs(one.amps[0]) < 1e-15

    flipped = apply_gate(init_basis_state("00"), gate_x(1))
    assert flipped.amps[2] == 1.0

    plus = apply_gate(init_basis_state("0"), gate_h(0))
    assert np.allclose(plus.amps, [1 / np.sqrt(2), 1 / np.sqrt(2)])

    s_on_one = apply_gate(init_basis_state("1"), gate_s(0))
    assert s_on_one.amps[1] == 1j
    back = apply_gate(s_on_one, gate_sdg(0))
    assert back.amps[1] == 1.0


def test_cnot_truth_table():
    # control qubit 0 set: target flips
    out = apply_gate(init_basis_state("10"), gate_cnot(0, 1))
    assert out.amps[3] == 1.0
    # control clear: no-op
    out = apply_gate(init_basis_state("01"), gate_cnot(0, 1))
    assert out.amps[2] == 1.0
    # reversed roles
    out = apply_gate(init_basis_state("01"), gate_cnot(1, 0))
    assert out.amps[3] == 1.0


def test_pauli_z_rotation_equals_rz():
    rng = np.random.default_rng(1)
    for theta in (-2.0, 0.3, np.pi):
        s = random_state(rng, 3)
        via_prot = apply_gate(s, gate_pauli_rotation("ZII", theta))
        via_rz = apply_gate(s, gate_rz(0, theta))
        assert np.max(np.abs(via_prot.amps - via_rz.amps)) < 1e-12


def test_single_qubit_gates_vs_kron_oracle():
    rng = np.random.default_rng(2)
    n = 3
    for kind, u in _1Q.items():
        for q in range(n):
            s = random_state(rng, n)
            out = apply_gate(s, Gate(kind, (q,)))
            expect = embed_1q(u, q, n) @ s.amps
            assert np.max(np.abs(out.amps - expect)) < 1e-13


def test_rotation_gates_vs_kron_oracle():
    rng = np.random.default_rng(3)
    n = 3
    for _ in range(10):
        q = int(rng.integers(n))
        theta = float(rng.uniform(-np.pi, np.pi))
        ry = np.array([[np.cos(theta / 2), -np.sin(theta / 2)],
                       [np.sin(theta / 2), np.cos(theta / 2)]], dtype=complex)
        rz = np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])
        s = random_state(rng, n)
        assert np.max(np.abs(apply_gate(s, gate_ry(q, theta)).amps
                             - embed_1q(ry, q, n) @ s.amps)) < 1e-13
        assert np.max(np.abs(apply_gate(s, gate_rz(q, theta)).amps
                             - embed_1q(rz, q, n) @ s.amps)) < 1e-13


def test_cnot_vs_dense_oracle():
    rng = np.random.default_rng(4)
    n = 3
    for control in range(n):
        for target in range(n):
            if control == target:
                continue
            s = random_state(rng, n)
            out = apply_gate(s, gate_cnot(control, target))
            assert np.max(np.abs(out.amps - cnot_dense(control, target, n) @ s.amps)) < 1e-13


def test_pauli_rotation_vs_expm_oracle():
    rng = np.random.default_rng(5)
    n = 3
    for label in ("XYZ", "ZZI", "IXY", "YYY", "XIX"):
        theta = float(rng.uniform(-np.pi, np.pi))
        u = scipy.linalg.expm(-0.5j * theta * kron_label(label))
        s = random_state(rng, n)
        out = apply_gate(s, gate_pauli_rotation(label, theta))
        assert np.max(np.abs(out.amps - u @ s.amps)) < 1e-12


def test_long_random_circuit_preserves_norm():
    rng = np.random.default_rng(6)
    n = 4
    gates = []
    for _ in range(10_000):
        pick = rng.integers(4)
        if pick == 0:
            gates.append(gate_ry(int(rng.integers(n)), float(rng.normal())))
        elif pick == 1:
            gates.append(gate_rz(int(rng.integers(n)), float(rng.normal())))
        elif pick == 2:
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(gate_cnot(int(c), int(t)))
        else:
            x, z = int(rng.integers(1, 1 << n)), int(rng.integers(1 << n))
            gates.append(gate_pauli_rotation((x, z), float(rng.normal())))
    out = run_circuit(random_state(rng, n), gates)
    assert abs(out.norm() - 1.0) < 1e-9


def test_apply_gate_is_linear():
    rng = np.random.default_rng(7)
    n = 3
    s1, s2 = random_state(rng, n), random_state(rng, n)
    a, b = 0.3 - 1.1j, -0.8 + 0.2j
    for g in (gate_h(1), gate_cnot(2, 0), gate_pauli_rotation("XYI", 0.7)):
        mixed = StateVector(a * s1.amps + b * s2.amps, n)
        lhs = apply_gate(mixed, g).amps
        rhs = a * apply_gate(s1, g).amps + b * apply_gate(s2, g).amps
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_gate_and_state_validation():
    with pytest.raises(ValueError, match="unknown gate"):
        Gate("T", (0,))
    with pytest.raises(ValueError, match="distinct"):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValueError, match="2\\^n_qubits"):
        StateVector(np.zeros(3), 2)
    with pytest.raises(IndexError, match="out of range"):
        apply_gate(init_basis_state("0"), gate_x(1))
    with pytest.raises(IndexError, match="out of range"):
        apply_gate(init_basis_state("0"), gate_pauli_rotation("IZ", 0.1))
    with pytest.raises(IndexError, match="exceed"):
        apply_gate(init_basis_state("0"), Gate("PROT", (0,), angle=0.1, x=0, z=2))


def test_expectation_simple_and_vs_dense():
    z0 = PauliSum.from_labels({"Z": 1.0})
    assert expectation(init_basis_state("0"), z0) == 1.0
    assert expectation(init_basis_state("1"), z0) == -1.0
    plus = apply_gate(init_basis_state("0"), gate_h(0))
    assert abs(expectation(plus, PauliSum.from_labels({"X": 1.0})) - 1.0) < 1e-14

    rng = np.random.default_rng(8)
    labels = {"XYI": 0.3, "ZZZ": -1.2, "IIX": 0.9, "III": 0.25, "YZX": -0.4}
    p = PauliSum.from_labels(labels)
    dense = p.to_dense()
    evals = np.linalg.eigvalsh(dense)
    for _ in range(20):
        s = random_state(rng, 3)
        e = expectation(s, p)
        assert abs(e - np.vdot(s.amps, dense @ s.amps).real) < 1e-12
        assert evals[0] - 1e-12 <= e <= evals[-1] + 1e-12


def test_expectation_qubit_mismatch():
    with pytest.raises(ValueError, match="differ"):
        expectation(init_basis_state("00"), PauliSum.from_labels({"Z": 1.0}))


def test_fidelity_properties():
    rng = np.random.default_rng(9)
    s = random_state(rng, 3)
    assert abs(fidelity(s, s) - 1.0) < 1e-12
    assert fidelity(init_basis_state("00"), init_basis_state("11")) == 0.0
    phased = StateVector(np.exp(0.7j) * s.amps, 3)
    assert abs(fidelity(s, phased) - 1.0) < 1e-12
    with pytest.raises(ValueError, match="differ"):
        fidelity(init_basis_state("0"), init_basis_state("00"))
