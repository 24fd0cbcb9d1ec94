"""Potential-energy-curve post-processing.

Turns per-geometry ground-state energies into an equilibrium bond length
and a harmonic stretching frequency, evaluates Mayer bond orders from
externally supplied density/overlap matrices, and computes benchmark
error statistics (RMSD / MSD / MAD).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import AMU_KG, HARTREE_PER_ANG2_TO_SI, SPEED_OF_LIGHT_CM_S

GRID_SPACING = 0.01          # Angstrom, the sampling step the 5-point fit expects
SPACING_TOL = 1e-6           # Angstrom
ENERGY_TIE_TOL = 1e-12       # Hartree: grid minima closer than this tie -> lower r wins


@dataclass(frozen=True)
class PotentialEnergyCurve:
    """Ordered (bond length / energy / flag) samples plus run metadata."""

    samples: tuple[tuple[float, float, str], ...]
    method: str = ""
    elements: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.samples:
            raise ValueError("a potential energy curve needs at least one sample")
        rs = [s[0] for s in self.samples]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("bond lengths must be strictly increasing")
        if not all(np.isfinite(s[1]) for s in self.samples):
            raise ValueError("energies must be finite")

    def bond_lengths(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    def energies(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    def flags(self) -> tuple[str, ...]:
        return tuple(s[2] for s in self.samples)


def pec_to_csv(pec: PotentialEnergyCurve) -> str:
    lines = ["r_angstrom,energy_hartree,flag"]
    for r, e, flag in pec.samples:
        lines.append(f"{r!r},{e!r},{flag}")
    return "\n".join(lines) + "\n"


def pec_from_csv(text: str, method: str = "", elements=()) -> PotentialEnergyCurve:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0].split(",")[:2] != ["r_angstrom", "energy_hartree"]:
        raise ValueError("missing PEC CSV header 'r_angstrom,energy_hartree,flag'")
    samples = []
    for ln in rows[1:]:
        parts = ln.split(",")
        if len(parts) < 2:
            raise ValueError(f"malformed PEC CSV row: {ln!r}")
        flag = parts[2] if len(parts) > 2 else ""
        samples.append((float(parts[0]), float(parts[1]), flag))
    return PotentialEnergyCurve(tuple(samples), method=method, elements=tuple(elements))


@dataclass(frozen=True)
class QuadraticFit:
    """E(r) ~ c2*r^2 + c1*r + c0 over a 5-point window around the grid minimum."""

    c2: float
    c1: float
    c0: float
    residual: float                      # RMS of fit deviations over the window
    window: tuple[float, ...]            # the 5 bond lengths used

    @property
    def bound(self) -> bool:
        return self.c2 > 0.0


def _grid_minimum(energies: np.ndarray) -> int:
    """Index of the lowest sample; ties within 1e-12 Ha go to the lower r."""
    lo = float(energies.min())
    for k, e in enumerate(energies):
        if e <= lo + ENERGY_TIE_TOL:
            return k
    raise AssertionError("unreachable")


def fit_quadratic(pec: PotentialEnergyCurve) -> QuadraticFit:
    """Least-squares parabola through the 5 samples centered on the minimum."""
    if len(pec.samples) < 5:
        raise ValueError("need at least 5 samples to fit a quadratic window")
    r = pec.bond_lengths()
    e = pec.energies()
    k_min = _grid_minimum(e)
    if k_min < 2 or k_min > len(r) - 3:
        raise ValueError(
            f"energy minimum at sample {k_min} (r={r[k_min]:.4f} A) sits at the "
            "window edge; extend the scan"
        )
    sel = slice(k_min - 2, k_min + 3)
    rw, ew = r[sel], e[sel]
    steps = np.diff(rw)
    if np.any(np.abs(steps - GRID_SPACING) > SPACING_TOL):
        raise ValueError(
            f"irregular spacing in fit window: steps {steps} A, expected {GRID_SPACING} A"
        )

    # Center both axes before solving; raw energies carry a large common
    # offset that would otherwise eat most of the double-precision budget.
    rc, ec = rw[2], ew[2]
    a2, a1, a0 = np.polyfit(rw - rc, ew - ec, 2)
    c2 = a2
    c1 = a1 - 2.0 * a2 * rc
    c0 = a2 * rc * rc - a1 * rc + a0 + ec
    model = a2 * (rw - rc) ** 2 + a1 * (rw - rc) + a0 + ec
    residual = float(np.sqrt(np.mean((model - ew) ** 2)))
    return QuadraticFit(float(c2), float(c1), float(c0), residual,
                        tuple(float(x) for x in rw))


def equilibrium_bond_length(fit: QuadraticFit) -> float:
    """Vertex of the fitted parabola, constrained to lie inside the window."""
    if fit.c2 <= 0.0:
        raise ValueError(f"no bound minimum: c2 = {fit.c2:.3e} Ha/A^2")
    r_e = -fit.c1 / (2.0 * fit.c2)
    if not (fit.window[0] - 1e-12 <= r_e <= fit.window[-1] + 1e-12):
        raise ValueError(
            f"fit vertex {r_e:.4f} A falls outside the window "
            f"[{fit.window[0]:.4f}, {fit.window[-1]:.4f}] A"
        )
    return float(r_e)


def harmonic_frequency(fit: QuadraticFit, mu: float) -> float:
    """Harmonic wavenumber in cm^-1 from the fit curvature and reduced mass (amu)."""
    if fit.c2 <= 0.0:
        raise ValueError(f"non-positive curvature c2 = {fit.c2:.3e} Ha/A^2")
    if mu <= 0.0:
        raise ValueError("reduced mass must be positive")
    k_si = 2.0 * fit.c2 * HARTREE_PER_ANG2_TO_SI          # J / m^2
    omega = np.sqrt(k_si / (mu * AMU_KG))                 # rad / s
    return float(omega / (2.0 * np.pi * SPEED_OF_LIGHT_CM_S))


# ---------------------------------------------------------------------------
# Mayer bond order
# ---------------------------------------------------------------------------

def mayer_bond_order(D: np.ndarray, S: np.ndarray, atom_of) -> float:
    """sum_{mu in A, nu in B} (DS)_{mu nu} (DS)_{nu mu} for a diatomic.

    D is the spinless one-particle density matrix and S the basis overlap,
    both over the same atom-centered basis; atom_of assigns each basis
    function to one of exactly two atom labels.
    """
    D = np.asarray(D, dtype=float)
    S = np.asarray(S, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("density matrix must be square")
    if S.shape != D.shape:
        raise ValueError(f"overlap shape {S.shape} does not match density {D.shape}")
    if not np.allclose(S, S.T, atol=1e-10):
        raise ValueError("overlap matrix must be symmetric")
    if np.linalg.eigvalsh(S).min() <= 0:
        raise ValueError("overlap matrix must be positive definite")
    atoms = list(atom_of)
    if len(atoms) != D.shape[0]:
        raise ValueError("atom assignment length does not match basis dimension")
    labels = sorted(set(atoms), key=str)
    if len(labels) != 2:
        raise ValueError(f"need exactly two atoms, got {labels}")
    on_a = np.array([a == labels[0] for a in atoms])
    P = D @ S
    block = P[np.ix_(on_a, ~on_a)] * P[np.ix_(~on_a, on_a)].T
    return float(block.sum())


def load_matrix_text(path: str | Path) -> np.ndarray:
    m = np.loadtxt(path, dtype=float, ndmin=2)
    return m


def load_atoms_text(path: str | Path) -> list[str]:
    return Path(path).read_text().split()


# ---------------------------------------------------------------------------
# Benchmark statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorStats:
    rmsd: float
    msd: float
    mad: float
    count: int

    def __post_init__(self):
        for v in (self.rmsd, self.msd, self.mad):
            if not np.isfinite(v):
                raise ValueError("error statistics must be finite")

    def to_json(self) -> str:
        return json.dumps(
            {"rmsd": self.rmsd, "msd": self.msd, "mad": self.mad, "count": self.count},
            indent=1,
        )


def error_stats(calc, expt) -> ErrorStats:
    """RMSD / mean signed deviation / mean absolute deviation of calc - expt."""
    calc = np.asarray(calc, dtype=float)
    expt = np.asarray(expt, dtype=float)
    if calc.shape != expt.shape or calc.ndim != 1:
        raise ValueError(f"value lists must align: {calc.shape} vs {expt.shape}")
    if calc.size < 1:
        raise ValueError("need at least one value pair")
    d = calc - expt
    return ErrorStats(
        rmsd=float(np.sqrt(np.mean(d * d))),
        msd=float(np.mean(d)),
        mad=float(np.mean(np.abs(d))),
        count=int(d.size),
    )
