"""Acceptance gate: twelve numbered checks a release must pass.

Each check pins one headline behavior — ansatz parameter counts, tapered
qubit counts, benchmark statistics, bond orders, pair-energy identities,
mapping/tapering soundness, solver cross-checks, VQE quality, ansatz
expressibility, the frequency pipeline, and gradient correctness — with
its tolerance stated inline.  Everything here runs from repository
fixtures and closed-form constructions; nothing needs network access or
external engines.
"""

import csv
import io
from math import comb
from pathlib import Path

import numpy as np
import pytest

from aqvib.activespace import iepa1_pair_energies
from aqvib.ansatz import build_realamplitudes, build_uccsd, uccsd_parameter_count
from aqvib.config import RunConfig
from aqvib.fermion import FermionHamiltonian, build_fermion_hamiltonian, ci_oracle, mp2_oracle
from aqvib.pipeline import benchmark_stats, run_scan
from aqvib.qubitmap import jordan_wigner, parity_map, taper_two_qubits
from aqvib.solver import (OptimizerProtocol, exact_ground_state, prepare_point,
                          vqe_energy, vqe_gradient, vqe_restart_survey)
from aqvib.spectro import (PotentialEnergyCurve, equilibrium_bond_length,
                           fit_quadratic, load_atoms_text, load_matrix_text,
                           mayer_bond_order)

from conftest import as_active, random_integrals, sector_indices
from test_ansatz import full_space_spec
from test_solver import random_pauli_sum

FIXTURES = Path(__file__).parent / "fixtures"


# --- 1: coupled-cluster ansatz parameter counts ----------------------------
# [n_electrons, n_orbitals] -> number of independent excitation amplitudes.
# Budget: milliseconds.

@pytest.mark.parametrize("n_occ, n_vir, label, expected", [
    (2, 2, "[4,4]", 26),
    (4, 2, "[8,6]", 92),
    (3, 3, "[6,6]", 117),
])
def test_criterion_01_uccsd_parameter_counts(n_occ, n_vir, label, expected):
    spec = full_space_spec(n_occ, n_vir)
    assert spec.label == label
    assert uccsd_parameter_count(n_occ, n_vir) == expected
    assert build_uccsd(spec, mapping="parity").n_params == expected


# --- 2: hardware-efficient ansatz parameter counts -------------------------
# n_params = n_qubits * (reps + 1).  Budget: milliseconds.

@pytest.mark.parametrize("n_qubits, reps, expected", [
    (6, 10, 66),
    (10, 25, 260),
    (10, 30, 310),
])
def test_criterion_02_realamplitudes_parameter_counts(n_qubits, reps, expected):
    assert build_realamplitudes(n_qubits, reps).n_params == expected


# --- 3: tapering removes exactly two qubits for every benchmark space ------
# Every [n,m] active space in the benchmark table must compile to 2m-2
# qubits, realizing both the 2-qubit and the 12-qubit problem sizes.
# Budget: milliseconds.

def _benchmark_active_spaces() -> set[tuple[int, int]]:
    text = (FIXTURES / "benchmark" / "calc_edqc_iepa1_pbe0.csv").read_text()
    spaces = set()
    for row in csv.DictReader(io.StringIO(text)):
        n, m = row["active_space"].strip("[]").split(",")
        spaces.add((int(n), int(m)))
    return spaces


def test_criterion_03_qubit_counts_are_2m_minus_2():
    spaces = _benchmark_active_spaces()
    assert (2, 2) in spaces and (10, 7) in spaces
    qubit_counts = set()
    for n_elec, m in sorted(spaces):
        modes = 2 * m
        t = np.diag(np.concatenate([np.arange(1.0, m + 1)] * 2))
        h = FermionHamiltonian(modes, 0.0, t, np.zeros((modes,) * 4))
        tapered, _ = taper_two_qubits(parity_map(h), n_elec // 2, n_elec)
        assert tapered.n_qubits == 2 * m - 2
        qubit_counts.add(tapered.n_qubits)
    assert {2, 12} <= qubit_counts


# --- 4: benchmark statistics tables ----------------------------------------
# The shipped result tables must reproduce the published summary statistics.
# Budget: milliseconds.

def test_criterion_04_benchmark_statistics(benchmark_dir):
    expt = (benchmark_dir / "expt.csv").read_text()
    ours = benchmark_stats(
        (benchmark_dir / "calc_edqc_iepa1_pbe0.csv").read_text(), expt).stats
    assert ours.rmsd == pytest.approx(41.44, abs=0.02)
    assert ours.msd == pytest.approx(-9.75, abs=0.02)
    assert ours.mad == pytest.approx(28.53, abs=0.02)
    classic = benchmark_stats(
        (benchmark_dir / "calc_ccsdt_hf.csv").read_text(), expt).stats
    assert classic.rmsd == pytest.approx(41.73, abs=0.02)


# --- 5: Mayer bond orders ---------------------------------------------------
# Single bond for H2, triple-ish bond for CO.  Budget: milliseconds.

@pytest.mark.parametrize("stem, expected", [("h2", 1.00), ("co", 2.60)])
def test_criterion_05_mayer_bond_orders(mayer_dir, stem, expected):
    D = load_matrix_text(mayer_dir / f"{stem}_D.txt")
    S = load_matrix_text(mayer_dir / f"{stem}_S.txt")
    atoms = load_atoms_text(mayer_dir / f"{stem}_atoms.txt")
    assert mayer_bond_order(D, S, atoms) == pytest.approx(expected, abs=0.005)


# --- 6: pair-energy total equals the independent MP2 oracle -----------------
# Summing first-order pair energies over occupied spin-orbital pairs must
# equal the closed-shell MP2 correlation energy computed by a separate
# spatial-orbital code path.  Budget: < 1 s.

def test_criterion_06_pair_energy_total_is_mp2(h2_ints):
    cases = [h2_ints]
    sizes = [(3, 2), (4, 2), (4, 4), (5, 4), (6, 4)]
    for seed in range(20):
        m, n_elec = sizes[seed % len(sizes)]
        cases.append(random_integrals(600 + seed, m, n_elec))
    for ints in cases:
        table = iepa1_pair_energies(ints)
        assert table.total == pytest.approx(mp2_oracle(ints), abs=1e-10)


# --- 7: encoding soundness ---------------------------------------------------
# Both fermion-to-qubit encodings give the same spectrum, and replacing the
# two symmetry qubits by eigenvalues reproduces the ground energy of the
# untapered operator restricted to the physical particle-number sector.
# Budget: < 10 s.

@pytest.mark.parametrize("seed, m, n_elec", [(700, 2, 2), (701, 3, 2), (702, 3, 4)])
def test_criterion_07_mapping_and_tapering_soundness(seed, m, n_elec):
    h = build_fermion_hamiltonian(as_active(random_integrals(seed, m, n_elec)))
    jw_dense = jordan_wigner(h).to_dense()
    parity_dense = parity_map(h).to_dense()
    jw_spec = np.linalg.eigvalsh(jw_dense)
    assert np.max(np.abs(jw_spec - np.linalg.eigvalsh(parity_dense))) < 1e-10

    na = nb = n_elec // 2
    idx = sector_indices(2 * m, na, nb)
    sector_ground = np.linalg.eigvalsh(jw_dense[np.ix_(idx, idx)])[0]
    tapered, _ = taper_two_qubits(parity_map(h), na, n_elec)
    assert exact_ground_state(tapered).energy == pytest.approx(
        sector_ground, abs=1e-10)


# --- 8: qubit-side exact diagonalization vs determinant CI ------------------
# On every shipped geometry with at most 12 spin orbitals the tapered qubit
# ground energy must equal the Slater-determinant CI oracle.  Budget: < 30 s.

def test_criterion_08_qubit_ed_equals_determinant_ci(h2_scan, h4_ints,
                                                     h4_eq_ints, h6_ints):
    all_ints = [ints for _, ints in h2_scan.points]
    all_ints += [h4_ints, h4_eq_ints, h6_ints]
    for ints in all_ints:
        assert 2 * ints.n_orbitals <= 12
        h = build_fermion_hamiltonian(as_active(ints))
        na = nb = ints.n_electrons // 2
        e_ci = ci_oracle(h, na, nb)[0]
        tapered, _ = taper_two_qubits(parity_map(h), na, ints.n_electrons)
        assert exact_ground_state(tapered).energy == pytest.approx(e_ci, abs=1e-10)


# --- 9: VQE quality on the H2 scan ------------------------------------------
# The coupled-cluster ansatz must sit on top of exact diagonalization at
# every geometry, and the frequency built from the VQE curve must agree
# with the ED-backed frequency to 0.1 cm^-1.  Budget: < 1 min.

def test_criterion_09_vqe_tracks_ed_across_the_scan(h2_scan):
    ed = run_scan(h2_scan, RunConfig(policy="iepa1", topk=2, solver="ed"))
    vqe = run_scan(h2_scan, RunConfig(policy="iepa1", topk=2, solver="vqe",
                                      optimizer={"restarts": 2}))
    assert ed.ok and vqe.ok
    for se, sv in zip(ed.statuses, vqe.statuses):
        assert abs(sv.solution.energy - se.solution.energy) <= 1e-8
    assert abs(vqe.freq_cm1 - ed.freq_cm1) <= 0.1


# --- 10: expressibility grows with entangling depth --------------------------
# On a fixed 6-qubit problem, the best-of-restarts overlap between the
# hardware-efficient ansatz and the exact ground state is nondecreasing in
# the repetition count and essentially one at reps = 10.  Budget: < 10 min
# (typically ~3 min).

def test_criterion_10_realamplitudes_expressibility_trend(h4_eq_ints):
    cfg = RunConfig(policy="mb", target=4, mapping="parity",
                    solver="vqe", ansatz="realamp")
    ctx = prepare_point(h4_eq_ints, cfg)
    assert ctx.pauli.n_qubits == 6
    proto = OptimizerProtocol(seed=1234)
    best = []
    for reps in (1, 2, 4, 8, 10):
        circuit = build_realamplitudes(ctx.pauli.n_qubits, reps)
        survey = vqe_restart_survey(ctx.pauli, circuit, ctx.init_bits, proto)
        best.append(max(overlap for _, overlap in survey))
    assert all(b >= a - 1e-9 for a, b in zip(best, best[1:]))
    assert best[-1] >= 0.9999


# --- 11: frequency pipeline on analytic curves -------------------------------
# An exact parabola is recovered to machine precision; a Morse curve with
# its minimum on the grid is recovered to 0.5% in curvature and 1e-3 A in
# equilibrium distance.  Budget: < 1 s.

def _curve(fn, start=0.70, n=16):
    rs = np.round(start + 0.01 * np.arange(n), 10)
    return PotentialEnergyCurve(tuple((float(r), float(fn(r)), "") for r in rs))


def test_criterion_11_parabola_exact_and_morse_accurate():
    k, r0, e0 = 0.8, 0.7432, -1.1
    fit = fit_quadratic(_curve(lambda r: e0 + 0.5 * k * (r - r0) ** 2))
    assert fit.c2 == pytest.approx(k / 2, rel=1e-12)
    assert equilibrium_bond_length(fit) == pytest.approx(r0, rel=1e-12)

    D, a, rm = 0.17, 1.9, 0.74   # minimum exactly on the 0.01 A grid
    fit = fit_quadratic(_curve(lambda r: D * (1 - np.exp(-a * (r - rm))) ** 2 - 1.1))
    assert abs(fit.c2 - D * a * a) / (D * a * a) < 0.005
    assert abs(equilibrium_bond_length(fit) - rm) < 1e-3


# --- 12: analytic gradients match finite differences --------------------------
# Fifty random (operator, circuit, theta) draws on up to 6 qubits.
# Budget: < 1 min.

def test_criterion_12_gradients_match_finite_differences():
    rng = np.random.default_rng(1200)
    h = 1e-5
    for case in range(50):
        n = int(rng.integers(2, 7))
        p = random_pauli_sum(1300 + case, n, n_terms=8)
        circuit = build_realamplitudes(n, int(rng.integers(1, 3)))
        init = "0" * n
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        g = vqe_gradient(p, circuit, init, theta)
        fd = np.zeros_like(g)
        for k in range(theta.size):
            up, dn = theta.copy(), theta.copy()
            up[k] += h
            dn[k] -= h
            fd[k] = (vqe_energy(p, circuit, init, up)
                     - vqe_energy(p, circuit, init, dn)) / (2 * h)
        denom = max(1.0, float(np.max(np.abs(fd))))
        assert np.max(np.abs(g - fd)) / denom < 1e-6
