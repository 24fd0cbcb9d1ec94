"""Shared fixtures and independent numerical oracles.

The dense ladder-operator Hamiltonian built here deliberately avoids the
package's Pauli algebra and Slater-Condon code: annihilation operators are
written directly as sign-tracking permutation matrices over occupation
bitstrings, so it can arbitrate disagreements between the fermionic and
qubit-side code paths.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from aqvib.activespace import ActiveIntegrals
from aqvib.chemdata import MolecularIntegrals, parse_fcidump, read_scan_manifest
from aqvib.fermion import FermionHamiltonian

FIXTURES = Path(__file__).parent / "fixtures"

_CHEM_PERMS = [
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
]


def random_integrals(seed: int, m: int, n_electrons: int,
                     scale: float = 0.2) -> MolecularIntegrals:
    """Random valid MolecularIntegrals with well-separated orbital energies.

    Occupied energies sit in [-2, -1] and virtuals in [0.5, 1.5], so every
    pair-energy denominator is at least ~3 Ha away from zero.
    """
    rng = np.random.default_rng(seed)
    h = rng.normal(0.0, scale, (m, m))
    h = (h + h.T) / 2.0
    raw = rng.normal(0.0, scale, (m, m, m, m))
    v = sum(raw.transpose(p) for p in _CHEM_PERMS) / 8.0
    n_occ = n_electrons // 2
    eps = np.concatenate([
        np.linspace(-2.0, -1.0, n_occ),
        np.linspace(0.5, 1.5, m - n_occ),
    ])
    eps += rng.uniform(-0.01, 0.01, m)
    return MolecularIntegrals(m, n_electrons, h, v, eps,
                              e_const=float(rng.normal(0.0, 1.0)),
                              label=f"random-{seed}")


def as_active(ints: MolecularIntegrals) -> ActiveIntegrals:
    """Wrap full-space integrals as ActiveIntegrals with nothing frozen."""
    return ActiveIntegrals(
        n_orbitals=ints.n_orbitals,
        n_electrons=ints.n_electrons,
        h_eff=ints.h_one.copy(),
        v_chem=ints.v_chem.copy(),
        orbital_energies=np.array(ints.orbital_energies),
        e_core=ints.e_const,
        active=tuple(range(ints.n_orbitals)),
        label=ints.label,
    )


# ---------------------------------------------------------------------------
# Dense ladder-operator oracle
# ---------------------------------------------------------------------------

def annihilation_dense(n_modes: int, j: int) -> np.ndarray:
    """a_j over occupation bitstrings (bit k of the index = mode k).

    a_j |idx> = (-1)^(number of occupied modes below j) |idx ^ 2^j| when
    bit j is set, else 0.
    """
    dim = 1 << n_modes
    mat = np.zeros((dim, dim))
    below = (1 << j) - 1
    for idx in range(dim):
        if idx >> j & 1:
            sign = -1.0 if bin(idx & below).count("1") % 2 else 1.0
            mat[idx ^ (1 << j), idx] = sign
    return mat


def ladder_hamiltonian_dense(h: FermionHamiltonian) -> np.ndarray:
    """H as a dense Fock-space matrix assembled from explicit ladder matrices."""
    n = h.n_modes
    dim = 1 << n
    a = [annihilation_dense(n, j) for j in range(n)]
    adag = [m.T for m in a]
    mat = h.constant * np.eye(dim)
    for p, q in np.argwhere(np.abs(h.one_body) > 1e-14):
        mat += h.one_body[p, q] * adag[p] @ a[q]
    for p, q, r, s in np.argwhere(np.abs(h.two_body) > 1e-14):
        mat += 0.5 * h.two_body[p, q, r, s] * adag[p] @ adag[q] @ a[r] @ a[s]
    return mat


def sector_indices(n_modes: int, n_alpha: int, n_beta: int) -> np.ndarray:
    """Fock-space indices with the given per-spin particle numbers."""
    m = n_modes // 2
    lo_mask = (1 << m) - 1
    idx = np.arange(1 << n_modes)
    pop_a = np.array([bin(i & lo_mask).count("1") for i in idx])
    pop_b = np.array([bin(i >> m).count("1") for i in idx])
    return idx[(pop_a == n_alpha) & (pop_b == n_beta)]


# ---------------------------------------------------------------------------
# File fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def h2_scan():
    return read_scan_manifest(FIXTURES / "h2_scan" / "manifest.json")


@pytest.fixture(scope="session")
def h2_meta():
    import json
    return json.loads((FIXTURES / "h2_scan" / "meta.json").read_text())


@pytest.fixture(scope="session")
def h2_ints(h2_scan):
    for r, ints in h2_scan.points:
        if abs(r - 0.74) < 1e-9:
            return ints
    raise AssertionError("scan fixture lacks the 0.74 A point")


@pytest.fixture(scope="session")
def h4_ints():
    text = (FIXTURES / "h4" / "h4_r1.50.fcidump").read_text()
    return parse_fcidump(text, label="H4 d=1.50", bond_length=1.50)


@pytest.fixture(scope="session")
def h4_eq_ints():
    text = (FIXTURES / "h4_eq" / "h4_r0.90.fcidump").read_text()
    return parse_fcidump(text, label="H4 d=0.90", bond_length=0.90)


@pytest.fixture(scope="session")
def h6_ints():
    text = (FIXTURES / "h6" / "h6_r1.10.fcidump").read_text()
    return parse_fcidump(text, label="H6 d=1.10", bond_length=1.10)


@pytest.fixture(scope="session")
def mayer_dir():
    return FIXTURES / "mayer"


@pytest.fixture(scope="session")
def benchmark_dir():
    return FIXTURES / "benchmark"
