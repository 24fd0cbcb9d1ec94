"""FCIDUMP parsing/writing, integral conventions, scans, and masses."""

import itertools

import numpy as np
import pytest

from aqvib import chemdata
from aqvib.chemdata import (
    AtomicMassTable, FcidumpError, GeometryScan, MolecularIntegrals,
    parse_fcidump, phys_integral, reduced_mass, scan_mass_table, write_fcidump,
)
from conftest import random_integrals

MINIMAL = """\
&FCI NORB=2,NELEC=2,MS2=0,
 ORBSYM=1,1,
 ISYM=1,
&END
 0.7137 1 1 1 1
 0.6746 1 1 2 2
 0.6636 2 2 2 2
 0.1813 2 1 2 1
-1.2528 1 1 0 0
-0.4759 2 2 0 0
-0.5782 1 0 0 0
 0.6703 2 0 0 0
 0.7151 0 0 0 0
"""


def test_parse_minimal_header_and_fields():
    ints = parse_fcidump(MINIMAL)
    assert ints.n_orbitals == 2
    assert ints.n_electrons == 2
    assert ints.n_occupied == 1
    assert ints.e_const == 0.7151
    assert ints.h_one[0, 0] == -1.2528
    assert ints.h_one[1, 1] == -0.4759
    assert ints.orbital_energies[0] == -0.5782
    assert ints.occupied_orbitals() == [0]


def test_parse_fills_all_eight_images():
    ints = parse_fcidump(MINIMAL)
    # (11|22) entry must be readable through every permutation image.
    val = 0.6746
    for perm in itertools.permutations([(0, 0), (1, 1)]):
        (i, j), (k, l) = perm
        assert ints.v_chem[i, j, k, l] == val
    # (21|21): images swap within each pair and across pairs.
    assert ints.v_chem[1, 0, 1, 0] == 0.1813
    assert ints.v_chem[0, 1, 1, 0] == 0.1813
    assert ints.v_chem[1, 0, 0, 1] == 0.1813
    assert ints.v_chem[0, 1, 0, 1] == 0.1813


def test_single_entry_touches_only_its_images():
    text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 0.7137 1 1 1 1\n 0.0 0 0 0 0\n"
    ints = parse_fcidump(text)
    assert ints.v_chem[0, 0, 0, 0] == 0.7137
    touched = np.abs(ints.v_chem) > 0
    assert touched.sum() == 1


@pytest.mark.parametrize("seed,m,nelec", [(1, 2, 2), (2, 3, 2), (3, 4, 4), (4, 5, 6)])
def test_roundtrip_write_parse(seed, m, nelec):
    ints = random_integrals(seed, m, nelec)
    back = parse_fcidump(write_fcidump(ints))
    assert back.n_orbitals == ints.n_orbitals
    assert back.n_electrons == ints.n_electrons
    assert np.max(np.abs(back.h_one - ints.h_one)) < 1e-12
    assert np.max(np.abs(back.v_chem - ints.v_chem)) < 1e-12
    assert np.max(np.abs(back.orbital_energies - ints.orbital_energies)) < 1e-12
    assert abs(back.e_const - ints.e_const) < 1e-12


def test_write_zero_tensors_is_just_header_and_constant():
    m = 3
    ints = MolecularIntegrals(m, 2, np.zeros((m, m)), np.zeros((m, m, m, m)),
                              np.array([-1.0, 0.5, 1.0]), e_const=1.25)
    text = write_fcidump(ints)
    body = [ln for ln in text.splitlines() if ln and not ln.startswith((" O", " I", "&"))]
    # orbital energies are nonzero here; constant line ends the file
    assert text.strip().endswith("0    0    0    0")
    two_electron = [ln for ln in body if ln.split()[3] != "0"]
    assert two_electron == []


def test_write_emits_one_representative_per_class():
    ints = random_integrals(11, 3, 2)
    lines = [ln.split() for ln in write_fcidump(ints).splitlines()]
    keys = [tuple(int(t) for t in ln[1:]) for ln in lines
            if len(ln) == 5 and ln[0][0] not in "&OI" and ln[1:] != ["0"] * 4]
    two_e = [k for k in keys if all(k)]
    canon = set()
    for i, j, k, l in two_e:
        images = {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                  (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}
        rep = max(images)
        assert rep not in canon, f"duplicate symmetry class for {(i, j, k, l)}"
        canon.add(rep)


@pytest.mark.parametrize("bad,match", [
    ("NORB=2,NELEC=2\n&END\n", "FCI"),
    ("&FCI NELEC=2,MS2=0,\n&END\n", "NORB"),
    ("&FCI NORB=2,NELEC=2,MS2=1,\n&END\n", "MS2"),
    ("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0 3 1 1 1\n", "outside"),
    ("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0 1 1\n", "expected"),
    ("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0 1 0 1 0\n", "pattern"),
])
def test_parse_rejects_malformed_input(bad, match):
    with pytest.raises(FcidumpError, match=match):
        parse_fcidump(bad)


def test_integrals_validation():
    m = 2
    v = np.zeros((m, m, m, m))
    eps = np.zeros(m)
    h_bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="symmetric"):
        MolecularIntegrals(m, 2, h_bad, v, eps, 0.0)
    v_bad = np.zeros((m, m, m, m))
    v_bad[0, 1, 0, 0] = 1.0  # violates (ij|kl) = (ji|kl)
    with pytest.raises(ValueError, match="8-fold"):
        MolecularIntegrals(m, 2, np.zeros((m, m)), v_bad, eps, 0.0)
    with pytest.raises(ValueError, match="even"):
        MolecularIntegrals(m, 3, np.zeros((m, m)), v, eps, 0.0)
    with pytest.raises(ValueError, match="outside"):
        MolecularIntegrals(m, 6, np.zeros((m, m)), v, eps, 0.0)


def test_occupied_orbitals_follow_energies_not_index_order():
    m = 3
    eps = np.array([0.5, -1.0, -2.0])  # interleaved, KS-style
    ints = MolecularIntegrals(m, 4, np.zeros((m, m)), np.zeros((m, m, m, m)),
                              eps, 0.0)
    assert ints.occupied_orbitals() == [1, 2]


def test_phys_integral_conventions():
    ints = random_integrals(7, 4, 4)
    m = ints.n_orbitals
    rng = np.random.default_rng(0)
    for _ in range(50):
        p, q, r, s = rng.integers(0, m, 4)
        val = phys_integral(ints, p, q, r, s)
        assert val == ints.v_chem[p, s, q, r]
        # symmetrization is exact only to summation order
        assert abs(val - phys_integral(ints, q, p, s, r)) < 1e-12  # electron swap
        assert abs(val - phys_integral(ints, s, r, q, p)) < 1e-12  # real orbitals
    assert phys_integral(ints, 1, 1, 1, 1) == ints.v_chem[1, 1, 1, 1]
    with pytest.raises(IndexError):
        phys_integral(ints, 0, 0, 0, m)


def test_phys_integral_against_fixture_file(h2_ints):
    # h_0110 in the physicists-like convention reads the (01|10) chemists' slot.
    assert phys_integral(h2_ints, 0, 1, 1, 0) == h2_ints.v_chem[0, 0, 1, 1]


def test_reduced_mass():
    table = AtomicMassTable({"X": 2.0, "Y": 6.0})
    assert reduced_mass("X", "X", table) == 1.0
    assert reduced_mass("X", "Y", table) == 1.5
    assert abs(reduced_mass("H", "H") - 0.50391) < 1e-5
    mh = chemdata.DEFAULT_MASS_TABLE.mass("H")
    mf = chemdata.DEFAULT_MASS_TABLE.mass("F")
    assert reduced_mass("H", "F") == mh * mf / (mh + mf)
    with pytest.raises(KeyError, match="Xx"):
        reduced_mass("Xx", "H")
    with pytest.raises(ValueError, match="positive"):
        AtomicMassTable({"X": -1.0})


def test_scan_manifest(h2_scan):
    assert h2_scan.elements == ("H", "H")
    assert h2_scan.expt_freq_cm1 == 4401.21
    rs = h2_scan.bond_lengths
    assert len(rs) >= 5
    assert all(b > a for a, b in zip(rs, rs[1:]))
    r, ints = h2_scan.points[0]
    assert ints.bond_length == r
    assert ints.n_electrons == 2


def test_scan_requires_increasing_bond_lengths(h2_ints):
    with pytest.raises(ValueError, match="increasing"):
        GeometryScan(elements=("H", "H"),
                     points=((0.8, h2_ints), (0.7, h2_ints)))


def test_scan_mass_table_merges_overrides(h2_ints):
    scan = GeometryScan(elements=("H", "H"), points=((0.74, h2_ints),),
                        masses={"H": 2.0141})
    table = scan_mass_table(scan)
    assert table.mass("H") == 2.0141
    assert table.mass("O") == chemdata.DEFAULT_MASS_TABLE.mass("O")
    plain = GeometryScan(elements=("H", "H"), points=((0.74, h2_ints),))
    assert scan_mass_table(plain) is chemdata.DEFAULT_MASS_TABLE
