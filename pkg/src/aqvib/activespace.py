"""Active-space selection from first-order pair correlation energies.

Spin orbitals use block ordering throughout: alpha spin orbitals are
0..m-1 (same index as the spatial MO), beta are m..2m-1.  The occupied
spin orbitals of a closed-shell system are the N_e/2 lowest-energy MOs
in both blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .chemdata import MolecularIntegrals

DEGENERACY_TOL = 1e-10  # denominators smaller than this are an error, not a value


class DegenerateDenominatorError(ValueError):
    """An energy denominator eps_i + eps_j - eps_a - eps_b is numerically zero."""

    def __init__(self, i, j, a, b, value):
        self.quadruple = (i, j, a, b)
        super().__init__(
            f"degenerate denominator for spin-orbital quadruple (i={i}, j={j}, "
            f"a={a}, b={b}): {value:.3e} Ha"
        )


@dataclass(frozen=True)
class PairEnergyTable:
    """First-order pair energies e_ij over occupied spin-orbital pairs i<j."""

    pairs: dict[tuple[int, int], float]
    total: float
    n_spatial: int
    spin_ordering: str = "alpha block 0..m-1, beta block m..2m-1"


@dataclass(frozen=True)
class OrbitalScores:
    """Per-spatial-MO correlation scores and their percentage of the total."""

    scores: np.ndarray          # Hartree, one per MO
    percents: np.ndarray        # 100 * score / total
    occupied: np.ndarray        # bool per MO
    epsilons: np.ndarray        # orbital energies, for reporting/ordering
    total: float


@dataclass(frozen=True)
class ActiveSpaceSpec:
    """Partition of the MO list into frozen / active / discarded."""

    frozen: tuple[int, ...]
    active: tuple[int, ...]
    discarded: tuple[int, ...]
    n_active_electrons: int
    active_occupied: tuple[int, ...]

    def __post_init__(self):
        all_indices = sorted(self.frozen + self.active + self.discarded)
        if all_indices != list(range(len(all_indices))):
            raise ValueError("frozen/active/discarded must partition the MO range")
        if set(self.active_occupied) - set(self.active):
            raise ValueError("active_occupied must be a subset of active")
        if self.n_active_electrons != 2 * len(self.active_occupied):
            raise ValueError("n_active_electrons must equal 2 * |active occupied MOs|")

    @property
    def n_active_orbitals(self) -> int:
        return len(self.active)

    @property
    def label(self) -> str:
        return f"[{self.n_active_electrons},{self.n_active_orbitals}]"


@dataclass(frozen=True)
class ActiveIntegrals:
    """MolecularIntegrals restricted to the active MOs, with the frozen core folded in.

    Active MOs keep their relative order (ascending original index); `active`
    records the original index of each position.
    """

    n_orbitals: int
    n_electrons: int
    h_eff: np.ndarray
    v_chem: np.ndarray
    orbital_energies: np.ndarray
    e_core: float
    active: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        for arr in (self.h_eff, self.v_chem, self.orbital_energies):
            np.asarray(arr).setflags(write=False)

    def occupied_positions(self) -> list[int]:
        """Positions (within the active ordering) of the n/2 lowest-energy MOs."""
        n_occ = self.n_electrons // 2
        order = sorted(range(self.n_orbitals), key=lambda k: (self.orbital_energies[k], k))
        return sorted(order[:n_occ])


# ---------------------------------------------------------------------------
# Pair energies (Eq.-10-style first-order pairs)
# ---------------------------------------------------------------------------

def _spin_orbitals(ints: MolecularIntegrals):
    """(occupied, virtual) spin-orbital index lists under block ordering."""
    m = ints.n_orbitals
    occ_mo = ints.occupied_orbitals()
    occ = [k for k in occ_mo] + [m + k for k in occ_mo]
    vir = [k for k in range(2 * m) if k not in set(occ)]
    return sorted(occ), sorted(vir)


def _so_spatial_spin(p: int, m: int) -> tuple[int, int]:
    return (p, 0) if p < m else (p - m, 1)


def _bra_ket(ints: MolecularIntegrals, i: int, j: int, a: int, b: int) -> float:
    """<ij|ab> over spin orbitals: spin deltas on top of the spatial (ia|jb)."""
    m = ints.n_orbitals
    isp, ispin = _so_spatial_spin(i, m)
    jsp, jspin = _so_spatial_spin(j, m)
    asp, aspin = _so_spatial_spin(a, m)
    bsp, bspin = _so_spatial_spin(b, m)
    if ispin != aspin or jspin != bspin:
        return 0.0
    return float(ints.v_chem[isp, asp, jsp, bsp])


def _pair_terms(ints: MolecularIntegrals) -> Iterator[tuple[int, int, int, int, float]]:
    """Yield (i, j, a, b, term) for every occupied pair i<j and virtual pair a<b."""
    eps = ints.orbital_energies
    m = ints.n_orbitals
    occ, vir = _spin_orbitals(ints)
    if not vir:
        raise ValueError("pair energies need at least one virtual MO")

    def so_eps(p):
        return eps[p] if p < m else eps[p - m]

    for ii, i in enumerate(occ):
        for j in occ[ii + 1:]:
            for aa, a in enumerate(vir):
                for b in vir[aa + 1:]:
                    num = _bra_ket(ints, i, j, a, b) - _bra_ket(ints, i, j, b, a)
                    if num == 0.0:
                        continue
                    den = so_eps(i) + so_eps(j) - so_eps(a) - so_eps(b)
                    if abs(den) < DEGENERACY_TOL:
                        raise DegenerateDenominatorError(i, j, a, b, den)
                    yield i, j, a, b, num * num / den


def iepa1_pair_energies(ints: MolecularIntegrals) -> PairEnergyTable:
    """First-order pair energy e_ij for every occupied spin-orbital pair."""
    if ints.n_electrons % 2 != 0:
        raise ValueError("closed-shell input required")
    occ, _ = _spin_orbitals(ints)
    pairs = {(i, j): 0.0 for ii, i in enumerate(occ) for j in occ[ii + 1:]}
    for i, j, _a, _b, term in _pair_terms(ints):
        pairs[(i, j)] += term
    total = sum(pairs.values())
    return PairEnergyTable(pairs=pairs, total=total, n_spatial=ints.n_orbitals)


def score_orbitals(table: PairEnergyTable, ints: MolecularIntegrals) -> OrbitalScores:
    """Attribute pair energies to spatial MOs.

    Occupied MO k collects every pair touching one of its spin orbitals
    (a pair internal to k is counted once).  Virtual MO v collects the
    individual (i,j,a,b) terms in which a or b belongs to v.
    """
    if table.total == 0.0:
        raise ValueError("total pair energy is zero; percentages are undefined")
    m = ints.n_orbitals
    occ_mo = set(ints.occupied_orbitals())
    scores = np.zeros(m)

    for (i, j), e_ij in table.pairs.items():
        touched = {_so_spatial_spin(i, m)[0], _so_spatial_spin(j, m)[0]}
        for k in touched:
            scores[k] += e_ij

    for _i, _j, a, b, term in _pair_terms(ints):
        touched = {_so_spatial_spin(a, m)[0], _so_spatial_spin(b, m)[0]}
        for v in touched:
            scores[v] += term

    occupied = np.array([k in occ_mo for k in range(m)])
    percents = scores / table.total * 100.0
    return OrbitalScores(
        scores=scores,
        percents=percents,
        occupied=occupied,
        epsilons=np.array(ints.orbital_energies),
        total=table.total,
    )


def scores_to_csv(scores: OrbitalScores) -> str:
    lines = ["mo_index,occ/vir,epsilon,score_Ha,percent"]
    for k in range(len(scores.scores)):
        kind = "occ" if scores.occupied[k] else "vir"
        lines.append(
            f"{k},{kind},{scores.epsilons[k]:.12f},"
            f"{scores.scores[k]:.12f},{scores.percents[k]:.6f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Selection policies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectionPolicy:
    """How to pick active MOs from their scores.

    kind: "topk" keeps the k highest-|score| MOs; "threshold" keeps MOs with
    percent >= value; "cumulative" keeps MOs in rank order until their
    cumulative percentage reaches value.  `frozen` is always honored.
    """

    kind: str
    value: float
    frozen: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("topk", "threshold", "cumulative"):
            raise ValueError(f"unknown policy kind {self.kind!r}")


def _ranked(scores: OrbitalScores, skip: set[int]) -> list[int]:
    candidates = [k for k in range(len(scores.scores)) if k not in skip]
    return sorted(candidates, key=lambda k: (-abs(scores.scores[k]), k))


def select_active_space(scores: OrbitalScores, policy: SelectionPolicy) -> ActiveSpaceSpec:
    """Apply a selection policy; occupied MOs that do not pass become frozen."""
    m = len(scores.scores)
    frozen = set(policy.frozen)
    if any(not scores.occupied[k] for k in frozen):
        raise ValueError("explicitly frozen MOs must be occupied")
    ranked = _ranked(scores, frozen)

    if policy.kind == "topk":
        k = int(policy.value)
        selected = set(ranked[:k])
    elif policy.kind == "threshold":
        selected = {k for k in ranked if scores.percents[k] >= policy.value}
    else:  # cumulative
        selected = set()
        cum = 0.0
        for k in ranked:
            selected.add(k)
            cum += scores.percents[k]
            if cum >= policy.value:
                break

    active_occ = sorted(k for k in selected if scores.occupied[k])
    active_vir = sorted(k for k in selected if not scores.occupied[k])
    if not active_occ:
        raise ValueError("policy selected zero occupied MOs")
    if not active_vir:
        raise ValueError("policy selected zero virtual MOs")

    # Occupied MOs that did not pass the policy cannot be discarded: freeze them.
    frozen |= {k for k in range(m) if scores.occupied[k] and k not in selected}
    discarded = sorted(k for k in range(m) if not scores.occupied[k] and k not in selected)
    return ActiveSpaceSpec(
        frozen=tuple(sorted(frozen)),
        active=tuple(sorted(selected)),
        discarded=tuple(discarded),
        n_active_electrons=2 * len(active_occ),
        active_occupied=tuple(active_occ),
    )


def select_minimal_basis(ints: MolecularIntegrals, target_count: int,
                         frozen: tuple[int, ...] = ()) -> ActiveSpaceSpec:
    """Keep all non-frozen occupied MOs plus the lowest-energy virtual MOs.

    `target_count` counts occupied MOs (frozen included) plus chosen virtuals,
    mirroring a minimal-basis complete active space before core freezing.
    """
    m = ints.n_orbitals
    if target_count > m:
        raise ValueError(f"target_count={target_count} exceeds MO count {m}")
    occ = ints.occupied_orbitals()
    occ_set = set(occ)
    if set(frozen) - occ_set:
        raise ValueError("frozen MOs must be occupied")
    n_vir = target_count - len(occ)
    if n_vir <= 0:
        raise ValueError(
            f"target_count={target_count} selects zero virtual MOs "
            f"(occupied count {len(occ)})"
        )
    virtuals = [k for k in range(m) if k not in occ_set]
    virtuals.sort(key=lambda k: (ints.orbital_energies[k], k))
    chosen_vir = sorted(virtuals[:n_vir])

    active_occ = sorted(occ_set - set(frozen))
    active = sorted(active_occ + chosen_vir)
    discarded = sorted(set(range(m)) - set(active) - set(frozen))
    return ActiveSpaceSpec(
        frozen=tuple(sorted(frozen)),
        active=tuple(active),
        discarded=tuple(discarded),
        n_active_electrons=2 * len(active_occ),
        active_occupied=tuple(active_occ),
    )


# ---------------------------------------------------------------------------
# Frozen-core folding
# ---------------------------------------------------------------------------

def fold_core(ints: MolecularIntegrals, spec: ActiveSpaceSpec) -> ActiveIntegrals:
    """Fold doubly occupied frozen MOs into an effective one-body term and constant."""
    if set(spec.frozen) & set(spec.active):
        raise ValueError("frozen index inside active set")
    occ_set = set(ints.occupied_orbitals())
    if set(spec.frozen) - occ_set:
        raise ValueError("frozen MOs must be doubly occupied")

    h, v = ints.h_one, ints.v_chem
    frozen = list(spec.frozen)
    active = list(spec.active)

    e_core = ints.e_const
    for i in frozen:
        e_core += 2.0 * h[i, i]
        for j in frozen:
            e_core += 2.0 * v[i, i, j, j] - v[i, j, j, i]

    idx = np.array(active, dtype=int)
    h_eff = h[np.ix_(idx, idx)].copy()
    for i in frozen:
        coul = v[np.ix_(idx, idx, [i], [i])][:, :, 0, 0]   # (pq|ii)
        exch = v[np.ix_(idx, [i], [i], idx)][:, 0, 0, :]   # (pi|iq)
        h_eff += 2.0 * coul - exch

    act = ActiveIntegrals(
        n_orbitals=len(active),
        n_electrons=spec.n_active_electrons,
        h_eff=h_eff,
        v_chem=v[np.ix_(idx, idx, idx, idx)].copy(),
        orbital_energies=ints.orbital_energies[idx].copy(),
        e_core=float(e_core),
        active=tuple(active),
        label=ints.label,
    )
    expected_occ = [active[p] for p in act.occupied_positions()]
    if expected_occ != list(spec.active_occupied):
        raise ValueError(
            "active occupied MOs are not the lowest-energy active MOs; "
            "the single-determinant reference would be inconsistent"
        )
    return act


def reference_energy(act: ActiveIntegrals) -> float:
    """Energy of the determinant doubly occupying the lowest active MOs."""
    occ = act.occupied_positions()
    e = act.e_core
    for i in occ:
        e += 2.0 * act.h_eff[i, i]
        for j in occ:
            e += 2.0 * act.v_chem[i, i, j, j] - act.v_chem[i, j, j, i]
    return float(e)


# Core MO counts for the "valence" frozen-core preset (noble-gas cores).
_CORE_MO_COUNT = {
    "H": 0, "He": 0,
    "Li": 1, "Be": 1, "B": 1, "C": 1, "N": 1, "O": 1, "F": 1, "Ne": 1,
    "Na": 5, "Mg": 5, "Al": 5, "Si": 5, "P": 5, "S": 5, "Cl": 5, "Ar": 5,
    "K": 9, "Ca": 9, "Br": 14,
}


def preset_frozen(ints: MolecularIntegrals, elements) -> tuple[int, ...]:
    """Frozen-core MO indices for a molecule: one core MO per noble-gas shell.

    The preset freezes the k lowest-energy occupied MOs, where k is the sum
    of core-orbital counts of the constituent atoms.
    """
    try:
        k = sum(_CORE_MO_COUNT[el] for el in elements)
    except KeyError as exc:
        raise ValueError(f"no core-orbital count for element {exc.args[0]!r}") from exc
    occ = ints.occupied_orbitals()
    if k > len(occ):
        raise ValueError(f"preset freezes {k} MOs but only {len(occ)} are occupied")
    order = sorted(occ, key=lambda p: (ints.orbital_energies[p], p))
    return tuple(sorted(order[:k]))
