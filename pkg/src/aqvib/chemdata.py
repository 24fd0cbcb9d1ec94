"""Molecular integral data: FCIDUMP parsing/writing, geometry scans, masses.

All integral tensors are stored over spatial molecular orbitals in chemists'
notation (ij|kl).  The physicists-like convention
h_pqrs = ∫ psi*_p(1) psi*_q(2) r12^-1 psi_r(2) psi_s(1) is exposed only
through :func:`phys_integral` so there is exactly one conversion point.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import ISOTOPE_MASS_AMU

SYM_TOL = 1e-12   # tensor symmetry validation
ZERO_TOL = 1e-12  # magnitudes below this are written as exact zeros


class FcidumpError(ValueError):
    """Raised for malformed FCIDUMP content."""


@dataclass(frozen=True)
class MolecularIntegrals:
    """Spatial-MO integrals, orbital energies and core constant for one geometry.

    h_one and v_chem are in Hartree; v_chem uses chemists' indexing (ij|kl).
    """

    n_orbitals: int
    n_electrons: int
    h_one: np.ndarray
    v_chem: np.ndarray
    orbital_energies: np.ndarray
    e_const: float
    label: str = ""
    bond_length: float | None = None

    def __post_init__(self):
        m = self.n_orbitals
        h = np.asarray(self.h_one, dtype=float).reshape(m, m)
        v = np.asarray(self.v_chem, dtype=float).reshape(m, m, m, m)
        eps = np.asarray(self.orbital_energies, dtype=float).reshape(m)
        if not (0 < self.n_electrons <= 2 * m):
            raise ValueError(f"n_electrons={self.n_electrons} outside (0, {2*m}]")
        if self.n_electrons % 2 != 0:
            raise ValueError("closed-shell data required: n_electrons must be even")
        if not np.all(np.isfinite(eps)):
            raise ValueError("orbital energies must be finite")
        if np.max(np.abs(h - h.T)) > SYM_TOL:
            raise ValueError("h_one is not symmetric")
        for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
            if np.max(np.abs(v - v.transpose(perm))) > SYM_TOL:
                raise ValueError(f"v_chem violates 8-fold symmetry (permutation {perm})")
        for arr in (h, v, eps):
            arr.setflags(write=False)
        object.__setattr__(self, "h_one", h)
        object.__setattr__(self, "v_chem", v)
        object.__setattr__(self, "orbital_energies", eps)

    @property
    def n_occupied(self) -> int:
        return self.n_electrons // 2

    def occupied_orbitals(self) -> list[int]:
        """Indices of the N_e/2 lowest-energy MOs (ties broken by lower index)."""
        order = sorted(range(self.n_orbitals), key=lambda k: (self.orbital_energies[k], k))
        return sorted(order[: self.n_occupied])


def phys_integral(ints: MolecularIntegrals, p: int, q: int, r: int, s: int) -> float:
    """h_pqrs = ∫ p*(1) q*(2) r(2) s(1) / r12, read from the chemists' tensor as (ps|qr)."""
    m = ints.n_orbitals
    for idx in (p, q, r, s):
        if not 0 <= idx < m:
            raise IndexError(f"orbital index {idx} outside [0, {m})")
    return float(ints.v_chem[p, s, q, r])


# ---------------------------------------------------------------------------
# FCIDUMP
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"([A-Z0-9]+)\s*=\s*([^,\s/]+)", re.IGNORECASE)


def parse_fcidump(text: str, label: str = "", bond_length: float | None = None) -> MolecularIntegrals:
    """Parse FCIDUMP text into MolecularIntegrals.

    Body lines are `value i j k l` with 1-based indices:
    `i j k l` all nonzero -> (ij|kl); `i j 0 0` -> h_one[i,j];
    `i 0 0 0` -> orbital energy; `0 0 0 0` -> e_const.
    """
    lines = text.splitlines()
    it = iter(enumerate(lines, start=1))

    header_parts: list[str] = []
    header_done = False
    body_start = 0
    for lineno, line in it:
        stripped = line.strip()
        if not stripped:
            continue
        if not header_parts and not stripped.upper().startswith("&FCI"):
            raise FcidumpError(f"line {lineno}: expected '&FCI' header, got {stripped[:30]!r}")
        header_parts.append(stripped)
        if stripped.upper().endswith(("&END", "/")):
            header_done = True
            body_start = lineno
            break
    if not header_parts or not header_done:
        raise FcidumpError("missing or unterminated FCIDUMP header")

    fields = {k.upper(): v for k, v in _HEADER_RE.findall(" ".join(header_parts))}
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
    except (KeyError, ValueError) as exc:
        raise FcidumpError(f"header must define integer NORB and NELEC: {exc}") from exc
    ms2 = int(fields.get("MS2", "0"))
    if ms2 != 0:
        raise FcidumpError(f"MS2={ms2}: only closed-shell (MS2=0) data is supported")
    if norb <= 0:
        raise FcidumpError(f"NORB={norb} must be positive")

    h = np.zeros((norb, norb))
    v = np.zeros((norb, norb, norb, norb))
    eps = np.zeros(norb)
    e_const = 0.0

    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value i j k l', got {line.strip()!r}")
        try:
            val = float(parts[0])
            i, j, k, l = (int(x) for x in parts[1:])
        except ValueError as exc:
            raise FcidumpError(f"line {lineno}: {exc}") from exc
        for idx in (i, j, k, l):
            if not 0 <= idx <= norb:
                raise FcidumpError(f"line {lineno}: index {idx} outside [0, {norb}]")
        if i and j and k and l:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for x, y, z, w in _chem_images(a, b, c, d):
                v[x, y, z, w] = val
        elif i and j and not (k or l):
            h[i - 1, j - 1] = val
            h[j - 1, i - 1] = val
        elif i and not (j or k or l):
            eps[i - 1] = val
        elif not any((i, j, k, l)):
            e_const = val
        else:
            raise FcidumpError(f"line {lineno}: unsupported index pattern {i} {j} {k} {l}")

    return MolecularIntegrals(norb, nelec, h, v, eps, e_const,
                              label=label, bond_length=bond_length)


def _chem_images(i, j, k, l):
    """The 8 permutations of (ij|kl) equal for real orbitals."""
    return {
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    }


def _canonical(i, j, k, l):
    return max(_chem_images(i, j, k, l))


def write_fcidump(ints: MolecularIntegrals) -> str:
    """Emit FCIDUMP text: one representative per symmetry class, zeros omitted."""
    m = ints.n_orbitals
    out = [
        f"&FCI NORB={m},NELEC={ints.n_electrons},MS2=0,",
        " ORBSYM=" + "1," * m,
        " ISYM=1,",
        "&END",
    ]

    def fmt(value, i, j, k, l):
        return f"{value: .16E} {i:4d} {j:4d} {k:4d} {l:4d}"

    seen = set()
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    key = _canonical(i, j, k, l)
                    if key in seen:
                        continue
                    seen.add(key)
                    val = ints.v_chem[key]
                    if abs(val) >= ZERO_TOL:
                        a, b, c, d = key
                        out.append(fmt(val, a + 1, b + 1, c + 1, d + 1))
    for i in range(m):
        for j in range(i + 1):
            if abs(ints.h_one[i, j]) >= ZERO_TOL:
                out.append(fmt(ints.h_one[i, j], i + 1, j + 1, 0, 0))
    for i in range(m):
        if abs(ints.orbital_energies[i]) >= ZERO_TOL:
            out.append(fmt(ints.orbital_energies[i], i + 1, 0, 0, 0))
    out.append(fmt(ints.e_const, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Geometry scans and masses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometryScan:
    """Bond-length scan of one diatomic: per-geometry integrals plus metadata."""

    elements: tuple[str, str]
    points: tuple[tuple[float, MolecularIntegrals], ...]
    expt_freq_cm1: float | None = None
    masses: dict[str, float] | None = None

    def __post_init__(self):
        rs = [r for r, _ in self.points]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("scan bond lengths must be strictly increasing")

    @property
    def bond_lengths(self) -> list[float]:
        return [r for r, _ in self.points]


@dataclass(frozen=True)
class AtomicMassTable:
    """Element symbol -> isotope mass in amu."""

    masses: dict[str, float] = field(default_factory=lambda: dict(ISOTOPE_MASS_AMU))

    def __post_init__(self):
        if any(v <= 0 for v in self.masses.values()):
            raise ValueError("all masses must be positive")

    def mass(self, element: str) -> float:
        try:
            return self.masses[element]
        except KeyError:
            raise KeyError(f"unknown element {element!r}") from None


DEFAULT_MASS_TABLE = AtomicMassTable()


def reduced_mass(a: str, b: str, table: AtomicMassTable = DEFAULT_MASS_TABLE) -> float:
    """mu = m_a * m_b / (m_a + m_b) in amu."""
    ma, mb = table.mass(a), table.mass(b)
    return ma * mb / (ma + mb)


def read_scan_manifest(path: str | Path) -> GeometryScan:
    """Load a scan manifest JSON and the FCIDUMP files it references.

    Schema: {"elements": [A, B], "expt_freq_cm1": x (optional),
             "points": [{"r": angstrom, "fcidump": relative path}, ...],
             "masses": {element: amu} (optional override)}
    """
    path = Path(path)
    doc = json.loads(path.read_text())
    elements = tuple(doc["elements"])
    if len(elements) != 2:
        raise ValueError("manifest must name exactly two elements")
    points = []
    for entry in doc["points"]:
        r = float(entry["r"])
        fc_path = path.parent / entry["fcidump"]
        ints = parse_fcidump(fc_path.read_text(), label=f"r={r:.4f}", bond_length=r)
        points.append((r, ints))
    points.sort(key=lambda p: p[0])
    masses = doc.get("masses")
    if masses is not None:
        masses = {str(k): float(v) for k, v in masses.items()}
    return GeometryScan(
        elements=elements,
        points=tuple(points),
        expt_freq_cm1=doc.get("expt_freq_cm1"),
        masses=masses,
    )


def scan_mass_table(scan: GeometryScan) -> AtomicMassTable:
    """Default masses, overridden by any per-scan entries."""
    if not scan.masses:
        return DEFAULT_MASS_TABLE
    merged = dict(ISOTOPE_MASS_AMU)
    merged.update(scan.masses)
    return AtomicMassTable(merged)
