"""Second-quantized Hamiltonians over spin orbitals and classical test oracles.

Spin orbitals use block ordering: alpha = 0..m-1, beta = m..2m-1, matching
module activespace.  The Hamiltonian is

    H = const + sum_pq t[p,q] a+_p a_q + 1/2 sum_pqrs g[p,q,r,s] a+_p a+_q a_r a_s

with g antisymmetrized under p<->q and r<->s.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .activespace import ActiveIntegrals, DegenerateDenominatorError, DEGENERACY_TOL
from .chemdata import MolecularIntegrals

HERM_TOL = 1e-12
MAX_CI_DIM = 100_000


@dataclass(frozen=True)
class FermionHamiltonian:
    """Coefficients of a number-conserving two-body fermionic operator."""

    n_modes: int
    constant: float
    one_body: np.ndarray   # t[p,q] for a+_p a_q
    two_body: np.ndarray   # antisymmetrized g[p,q,r,s] for (1/2) a+_p a+_q a_r a_s

    def __post_init__(self):
        n = self.n_modes
        t = np.asarray(self.one_body, dtype=float)
        g = np.asarray(self.two_body, dtype=float)
        if t.shape != (n, n) or g.shape != (n, n, n, n):
            raise ValueError("coefficient tensor shapes inconsistent with n_modes")
        if np.max(np.abs(t - t.T)) > HERM_TOL:
            raise ValueError("one-body coefficients not Hermitian")
        if np.max(np.abs(g + g.transpose(1, 0, 2, 3))) > HERM_TOL:
            raise ValueError("two-body coefficients not antisymmetric in p<->q")
        if np.max(np.abs(g + g.transpose(0, 1, 3, 2))) > HERM_TOL:
            raise ValueError("two-body coefficients not antisymmetric in r<->s")
        if np.max(np.abs(g - g.transpose(3, 2, 1, 0))) > HERM_TOL:
            raise ValueError("two-body coefficients not Hermitian")
        m = n // 2
        if n % 2 == 0 and np.max(np.abs(t[:m, m:])) > HERM_TOL:
            raise ValueError("one-body coefficients couple alpha and beta blocks")
        t.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "one_body", t)
        object.__setattr__(self, "two_body", g)

    def anti_integral(self, p: int, q: int, r: int, s: int) -> float:
        """<pq||rs> in physicists' notation, read off the stored tensor."""
        return 2.0 * self.two_body[p, q, s, r]


def build_fermion_hamiltonian(act: ActiveIntegrals) -> FermionHamiltonian:
    """Expand active-space spatial integrals into spin-orbital coefficients."""
    m = act.n_orbitals
    n = 2 * m
    t = np.zeros((n, n))
    t[:m, :m] = act.h_eff
    t[m:, m:] = act.h_eff

    # Raw coefficient of a+_P a+_Q a_R a_S: electron 1 pairs (P,S), electron 2
    # pairs (Q,R), so the spatial factor is the chemists' integral (ps|qr).
    v = act.v_chem
    raw = np.zeros((n, n, n, n))
    for sp, sq in itertools.product((0, 1), repeat=2):
        op, oq = sp * m, sq * m
        os_, or_ = op, oq  # spin deltas: sigma_S = sigma_P, sigma_R = sigma_Q
        block = v.transpose(0, 2, 3, 1)  # (ps|qr) -> index order p, q, r, s
        raw[op:op + m, oq:oq + m, or_:or_ + m, os_:os_ + m] = block
    g = (raw - raw.transpose(1, 0, 2, 3) - raw.transpose(0, 1, 3, 2)
         + raw.transpose(1, 0, 3, 2)) / 4.0
    return FermionHamiltonian(n_modes=n, constant=act.e_core, one_body=t, two_body=g)


# ---------------------------------------------------------------------------
# Determinant basis and Slater-Condon CI oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeterminantBasis:
    """Occupation bitmasks with fixed (N_alpha, N_beta), lexicographic order.

    Bit k of a state is spin orbital k (alpha block first).
    """

    n_spatial: int
    n_alpha: int
    n_beta: int
    states: tuple[int, ...]
    index: dict[int, int]

    @property
    def size(self) -> int:
        return len(self.states)


def determinant_basis(n_spatial: int, n_alpha: int, n_beta: int, *,
                      forced_spatial: tuple[int, ...] = (),
                      pool_spatial: tuple[int, ...] | None = None) -> DeterminantBasis:
    """Enumerate determinants; `forced_spatial` MOs are doubly occupied in all of them."""
    m = n_spatial
    pool = tuple(k for k in range(m) if k not in forced_spatial) \
        if pool_spatial is None else pool_spatial
    forced = tuple(forced_spatial)
    if n_alpha < len(forced) or n_beta < len(forced):
        raise ValueError("forced MOs exceed the electron count")

    def combos(count):
        return [forced + c for c in itertools.combinations(pool, count - len(forced))]

    states = []
    for alpha in combos(n_alpha):
        a_mask = sum(1 << k for k in alpha)
        for beta in combos(n_beta):
            states.append(a_mask | sum(1 << (m + k) for k in beta))
    if not states:
        raise ValueError("empty determinant basis")
    return DeterminantBasis(
        n_spatial=m, n_alpha=n_alpha, n_beta=n_beta,
        states=tuple(states), index={s: i for i, s in enumerate(states)},
    )


def _between_mask(a: int, b: int) -> int:
    lo, hi = (a, b) if a < b else (b, a)
    return ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)


def _single_sign(mask: int, hole: int, part: int) -> int:
    return -1 if bin(mask & _between_mask(hole, part)).count("1") % 2 else 1


def ci_matrix(h: FermionHamiltonian, basis: DeterminantBasis, sparse: bool = False):
    """Hamiltonian matrix in a determinant basis via Slater-Condon rules."""
    if basis.size > MAX_CI_DIM:
        raise ValueError(f"determinant basis size {basis.size} exceeds {MAX_CI_DIM}")
    n = h.n_modes
    t = h.one_body
    if sparse:
        mat = scipy.sparse.lil_matrix((basis.size, basis.size))
    else:
        mat = np.zeros((basis.size, basis.size))

    for col, det in enumerate(basis.states):
        occ = [p for p in range(n) if det >> p & 1]
        unocc = [p for p in range(n) if not det >> p & 1]

        diag = h.constant + sum(t[p, p] for p in occ)
        diag += 0.5 * sum(h.anti_integral(p, q, p, q) for p in occ for q in occ)
        mat[col, col] = diag

        for hole in occ:
            for part in unocc:
                det1 = det ^ (1 << hole) ^ (1 << part)
                row = basis.index.get(det1)
                if row is None:
                    continue
                val = t[hole, part]
                val += sum(h.anti_integral(hole, q, part, q) for q in occ if q != hole)
                mat[row, col] = _single_sign(det, hole, part) * val

        for h1, h2 in itertools.combinations(occ, 2):
            for p1, p2 in itertools.combinations(unocc, 2):
                det2 = det ^ (1 << h1) ^ (1 << h2) ^ (1 << p1) ^ (1 << p2)
                row = basis.index.get(det2)
                if row is None:
                    continue
                sign = _single_sign(det, h1, p1)
                sign *= _single_sign(det ^ (1 << h1) ^ (1 << p1), h2, p2)
                mat[row, col] = sign * h.anti_integral(h1, h2, p1, p2)

    return mat


def ci_oracle(h: FermionHamiltonian, n_alpha: int, n_beta: int
              ) -> tuple[float, np.ndarray, DeterminantBasis]:
    """Lowest eigenpair of H in the fixed-(N_alpha, N_beta) determinant basis."""
    basis = determinant_basis(h.n_modes // 2, n_alpha, n_beta)
    if basis.size <= 2000:
        vals, vecs = np.linalg.eigh(ci_matrix(h, basis))
        return float(vals[0]), vecs[:, 0], basis
    sp = scipy.sparse.csr_matrix(ci_matrix(h, basis, sparse=True))
    vals, vecs = scipy.sparse.linalg.eigsh(
        sp, k=1, which="SA", v0=np.full(basis.size, 1.0 / np.sqrt(basis.size)))
    return float(vals[0]), vecs[:, 0], basis


# ---------------------------------------------------------------------------
# MP2 oracle (independent code path from activespace.iepa1_pair_energies)
# ---------------------------------------------------------------------------

def mp2_oracle(ints: MolecularIntegrals) -> float:
    """Closed-shell MP2 correlation energy from spatial-MO integrals.

    E = sum_ijab (ia|jb) [2 (ia|jb) - (ib|ja)] / (e_i + e_j - e_a - e_b),
    algebraically equal to the spin-orbital pair-energy total.
    """
    eps = ints.orbital_energies
    occ = ints.occupied_orbitals()
    vir = [k for k in range(ints.n_orbitals) if k not in set(occ)]
    v = ints.v_chem
    e = 0.0
    for i in occ:
        for j in occ:
            for a in vir:
                for b in vir:
                    iajb = v[i, a, j, b]
                    ibja = v[i, b, j, a]
                    num = iajb * (2.0 * iajb - ibja)
                    if num == 0.0:
                        continue
                    den = eps[i] + eps[j] - eps[a] - eps[b]
                    if abs(den) < DEGENERACY_TOL:
                        raise DegenerateDenominatorError(i, j, a, b, den)
                    e += num / den
    return float(e)
