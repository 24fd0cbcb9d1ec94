"""Pauli-string algebra and fermion-to-qubit encodings.

A Pauli string on n qubits is a pair of bitmasks (x, z); bit k of x/z says
whether the string acts on qubit k with an X/Z factor (both set = Y).  The
operator represented is the Hermitian product i^{|x&z|} X^x Z^z, so real
coefficients always describe Hermitian sums.  String labels are written
with qubit 0 as the first character: label "XZI" means X on qubit 0,
Z on qubit 1.

Encodings: Jordan-Wigner stores mode occupations on qubits directly;
the parity encoding stores running occupation parities, which makes the
total-alpha and total-electron parities local (qubits m-1 and 2m-1 under
block spin ordering) so those two qubits can be tapered off.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .fermion import FermionHamiltonian

PRUNE_TOL = 1e-12
IMAG_TOL = 1e-10

_PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_PAULI = {v: k for k, v in _PAULI_BITS.items()}


def _pop(v: int) -> int:
    return v.bit_count()


def pauli_mul(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, complex]:
    """Product of two Hermitian Pauli strings: returns (x3, z3, phase)."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    k = (_pop(x1 & z1) + _pop(x2 & z2) - _pop(x3 & z3) + 2 * _pop(z1 & x2)) % 4
    return x3, z3, (1, 1j, -1, -1j)[k]


def label_of(x: int, z: int, n: int) -> str:
    return "".join(_BITS_PAULI[(x >> k & 1, z >> k & 1)] for k in range(n))


def masks_of(label: str) -> tuple[int, int]:
    x = z = 0
    for k, ch in enumerate(label):
        try:
            xb, zb = _PAULI_BITS[ch]
        except KeyError:
            raise ValueError(f"invalid Pauli letter {ch!r}") from None
        x |= xb << k
        z |= zb << k
    return x, z


class PauliSum:
    """Real-weighted sum of Pauli strings on a fixed number of qubits."""

    def __init__(self, n_qubits: int, terms: dict[tuple[int, int], float] | None = None):
        self.n_qubits = n_qubits
        self._terms: dict[tuple[int, int], float] = {}
        if terms:
            for (x, z), c in terms.items():
                if x >> n_qubits or z >> n_qubits:
                    raise ValueError("Pauli mask exceeds qubit count")
                c = complex(c)
                if not np.isfinite(c.real) or not np.isfinite(c.imag):
                    raise ValueError(f"non-finite coefficient {c}")
                if abs(c.imag) > IMAG_TOL:
                    raise ValueError(f"non-real coefficient {c} for a Hermitian sum")
                if abs(c.real) >= PRUNE_TOL:
                    self._terms[(x, z)] = self._terms.get((x, z), 0.0) + c.real
            self._terms = {k: v for k, v in self._terms.items() if abs(v) >= PRUNE_TOL}

    @classmethod
    def from_labels(cls, weighted: dict[str, float]) -> "PauliSum":
        n = len(next(iter(weighted)))
        if any(len(lbl) != n for lbl in weighted):
            raise ValueError("all labels must have equal length")
        return cls(n, {masks_of(lbl): c for lbl, c in weighted.items()})

    def items(self):
        """Canonical (label-lexicographic) iteration of (x, z, coefficient)."""
        keyed = sorted(self._terms.items(), key=lambda kv: label_of(*kv[0], self.n_qubits))
        return [(x, z, c) for (x, z), c in keyed]

    def labels(self) -> dict[str, float]:
        return {label_of(x, z, self.n_qubits): c for (x, z), c in self._terms.items()}

    def coefficient(self, label: str) -> float:
        return self._terms.get(masks_of(label), 0.0)

    def __len__(self):
        return len(self._terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        merged = defaultdict(float, self._terms)
        for k, v in other._terms.items():
            merged[k] += v
        return PauliSum(self.n_qubits, dict(merged))

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self.n_qubits, {k: v * scalar for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, PauliSum) and other.n_qubits == self.n_qubits
                and other._terms == self._terms)

    def to_dense(self) -> np.ndarray:
        """Dense matrix in the computational basis (qubit 0 = least significant bit)."""
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(dim)
        for (x, z), c in self._terms.items():
            pref = 1j ** _pop(x & z)
            signs = 1.0 - 2.0 * parity_array(idx & z)
            mat[idx ^ x, idx] += c * pref * signs
        return mat

    def to_text(self) -> str:
        lines = [f"{c:+.12E} {label_of(x, z, self.n_qubits)}" for x, z, c in self.items()]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        terms: dict[tuple[int, int], float] = {}
        n = n_qubits
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                coef_s, label = line.split()
                coef = float(coef_s)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: expected 'coefficient LABEL'") from exc
            if n is None:
                n = len(label)
            elif len(label) != n:
                raise ValueError(f"line {lineno}: label length {len(label)} != {n}")
            key = masks_of(label)
            terms[key] = terms.get(key, 0.0) + coef
        if n is None:
            raise ValueError("cannot infer qubit count from empty text")
        return cls(n, terms)


def parity_array(v: np.ndarray) -> np.ndarray:
    """Bit parity of each entry of an integer array (0 or 1)."""
    v = v.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return (v & 1).astype(float)


def simplify(p: PauliSum) -> PauliSum:
    """Merge like terms, drop negligible coefficients, fix canonical order."""
    return PauliSum(p.n_qubits, dict(p._terms))


# ---------------------------------------------------------------------------
# Fermionic encodings
# ---------------------------------------------------------------------------

def _majoranas(encoding: str, n_modes: int, j: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Bitmask pairs for the two Majorana strings of mode j."""
    if encoding == "jw":
        c = (1 << j, (1 << j) - 1)
        d = (1 << j, (1 << (j + 1)) - 1)
    elif encoding == "parity":
        x = ((1 << n_modes) - 1) ^ ((1 << j) - 1)  # X on j..n-1
        c = (x, (1 << (j - 1)) if j else 0)
        d = (x, 1 << j)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    return c, d


def map_ladder_term(ops: list[tuple[int, bool]], n_modes: int, encoding: str
                    ) -> dict[tuple[int, int], complex]:
    """Pauli expansion of a product of ladder operators.

    ops is a sequence of (mode, is_creation), leftmost factor first.
    """
    acc: dict[tuple[int, int], complex] = {(0, 0): 1.0}
    for mode, dagger in ops:
        if not 0 <= mode < n_modes:
            raise ValueError(f"mode {mode} outside [0, {n_modes})")
        (cx, cz), (dx, dz) = _majoranas(encoding, n_modes, mode)
        factor = {(cx, cz): 0.5, (dx, dz): -0.5j if dagger else 0.5j}
        nxt: dict[tuple[int, int], complex] = defaultdict(complex)
        for (x1, z1), c1 in acc.items():
            for (x2, z2), c2 in factor.items():
                x3, z3, ph = pauli_mul(x1, z1, x2, z2)
                nxt[(x3, z3)] += c1 * c2 * ph
        acc = {k: v for k, v in nxt.items() if abs(v) > 1e-16}
    return acc


def _transform(h: FermionHamiltonian, encoding: str) -> PauliSum:
    n = h.n_modes
    acc: dict[tuple[int, int], complex] = defaultdict(complex)
    acc[(0, 0)] += h.constant

    def add(term: dict, weight: float):
        for key, c in term.items():
            acc[key] += weight * c

    for p, q in np.argwhere(np.abs(h.one_body) > 1e-14):
        add(map_ladder_term([(int(p), True), (int(q), False)], n, encoding),
            h.one_body[p, q])
    for p, q, r, s in np.argwhere(np.abs(h.two_body) > 1e-14):
        ops = [(int(p), True), (int(q), True), (int(r), False), (int(s), False)]
        add(map_ladder_term(ops, n, encoding), 0.5 * h.two_body[p, q, r, s])

    bad = max((abs(c.imag) for c in acc.values()), default=0.0)
    if bad > IMAG_TOL:
        raise ValueError(f"residual imaginary coefficient {bad:.3e} after {encoding} transform")
    return PauliSum(n, {k: c.real for k, c in acc.items()})


def jordan_wigner(h: FermionHamiltonian) -> PauliSum:
    """Occupation-basis encoding: a+_j -> (X - iY)/2 on j times a Z string below."""
    return _transform(h, "jw")


def parity_map(h: FermionHamiltonian) -> PauliSum:
    """Parity-basis encoding; spectrum identical to jordan_wigner."""
    return _transform(h, "parity")


# ---------------------------------------------------------------------------
# Z2 two-qubit tapering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaperingContext:
    """Which qubits were removed and the symmetry-sector eigenvalues used."""

    removed: tuple[int, int]
    eigenvalues: tuple[int, int]
    n_alpha: int
    n_electrons: int

    def __post_init__(self):
        if len(self.removed) != 2:
            raise ValueError("exactly two removed positions required")
        if any(e not in (1, -1) for e in self.eigenvalues):
            raise ValueError("sector eigenvalues must be +1 or -1")


def _drop_two_bits(v: int, lo: int, hi: int) -> int:
    """Remove bit positions lo < hi from v, compacting the remaining bits."""
    low = v & ((1 << lo) - 1)
    mid = (v >> (lo + 1)) & ((1 << (hi - lo - 1)) - 1)
    high = v >> (hi + 1)
    return low | (mid << lo) | (high << (hi - 1))


def tapering_context(n_qubits: int, n_alpha: int, n_electrons: int) -> TaperingContext:
    """Symmetry qubits and sector eigenvalues for a block-ordered parity encoding."""
    if n_qubits % 2 != 0:
        raise ValueError("parity-encoded operator must have an even qubit count")
    m = n_qubits // 2
    return TaperingContext(
        removed=(m - 1, 2 * m - 1),
        eigenvalues=(1 if n_alpha % 2 == 0 else -1, 1 if n_electrons % 2 == 0 else -1),
        n_alpha=n_alpha,
        n_electrons=n_electrons,
    )


def taper_masks(x: int, z: int, ctx: TaperingContext) -> tuple[int, int, int]:
    """Taper a single string: returns the reduced masks and the sector sign."""
    lo, hi = ctx.removed
    if x >> lo & 1 or x >> hi & 1:
        raise ValueError(
            f"string with X/Y on symmetry qubit {lo if x >> lo & 1 else hi}; "
            "input is not a block-ordered parity encoding"
        )
    sign = 1
    if z >> lo & 1:
        sign *= ctx.eigenvalues[0]
    if z >> hi & 1:
        sign *= ctx.eigenvalues[1]
    return _drop_two_bits(x, lo, hi), _drop_two_bits(z, lo, hi), sign


def taper_two_qubits(p: PauliSum, n_alpha: int, n_electrons: int
                     ) -> tuple[PauliSum, TaperingContext]:
    """Replace the alpha-parity and total-parity qubits by their eigenvalues.

    Requires a parity-encoded operator under block spin ordering: the
    symmetry qubits are m-1 and 2m-1 and every string may touch them only
    via I or Z.
    """
    ctx = tapering_context(p.n_qubits, n_alpha, n_electrons)
    out: dict[tuple[int, int], float] = defaultdict(float)
    for x, z, c in p.items():
        x2, z2, sign = taper_masks(x, z, ctx)
        out[(x2, z2)] += sign * c
    return PauliSum(p.n_qubits - 2, dict(out)), ctx
