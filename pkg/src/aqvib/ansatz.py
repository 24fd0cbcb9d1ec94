"""Parameterized circuits: UCCSD (single Trotter step) and RealAmplitudes.

Both ansatzes are applied on top of a Hartree-Fock basis state produced by
hf_bitstring.  UCCSD uses one shared parameter per spin-conserving
excitation; its parameter count is 2ov + 2*C(o,2)*C(v,2) + o^2 v^2 for o
occupied and v virtual spatial MOs per spin.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .activespace import ActiveSpaceSpec
from .qubitmap import TaperingContext, label_of, map_ladder_term, taper_masks
from .simulator import Gate


@dataclass(frozen=True)
class GateTemplate:
    """A gate whose angle is either fixed or coeff * theta[param]."""

    kind: str
    qubits: tuple[int, ...]
    param: int | None = None
    coeff: float = 1.0
    angle: float | None = None
    x: int = 0
    z: int = 0


@dataclass(frozen=True)
class Excitation:
    kind: str                    # "single" | "double"
    spins: tuple[int, ...]       # spin of each (occ, vir) leg, 0=alpha 1=beta
    occ: tuple[int, ...]         # occupied active positions
    vir: tuple[int, ...]         # virtual active positions


@dataclass(frozen=True)
class ParamCircuit:
    n_qubits: int
    n_params: int
    gates: tuple[GateTemplate, ...]
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        used = {g.param for g in self.gates if g.param is not None}
        if used != set(range(self.n_params)):
            missing = set(range(self.n_params)) - used
            raise ValueError(f"parameter slots never referenced by a gate: {sorted(missing)}")


def hf_bitstring(spec: ActiveSpaceSpec, mapping: str = "parity",
                 ctx: TaperingContext | None = None) -> str:
    """Initial-state bits for the Hartree-Fock determinant of an active space."""
    active = sorted(spec.active)
    m = len(active)
    occ_positions = {active.index(k) for k in spec.active_occupied}
    occupations = [0] * (2 * m)
    for p in occ_positions:
        occupations[p] = 1
        occupations[m + p] = 1

    if mapping == "jw":
        if ctx is not None:
            raise ValueError("tapering context is only meaningful for the parity mapping")
        bits = occupations
    elif mapping == "parity":
        bits = list(itertools.accumulate(occupations, lambda a, b: (a + b) % 2))
        if ctx is not None:
            if ctx.removed != (m - 1, 2 * m - 1):
                raise ValueError("tapering context does not match this active space size")
            if ctx.n_alpha != len(occ_positions) or ctx.n_electrons != spec.n_active_electrons:
                raise ValueError("tapering context sector does not match this active space")
            bits = [b for k, b in enumerate(bits) if k not in ctx.removed]
    else:
        raise ValueError(f"unknown mapping {mapping!r}")
    return "".join(str(b) for b in bits)


# ---------------------------------------------------------------------------
# UCCSD
# ---------------------------------------------------------------------------

def uccsd_excitations(n_occ: int, n_vir: int) -> list[Excitation]:
    """Spin-conserving singles and doubles in fixed lexicographic order."""
    occ = range(n_occ)
    vir = range(n_occ, n_occ + n_vir)
    exc: list[Excitation] = []
    for spin in (0, 1):
        for i in occ:
            for a in vir:
                exc.append(Excitation("single", (spin,), (i,), (a,)))
    for spin in (0, 1):
        for i, j in itertools.combinations(occ, 2):
            for a, b in itertools.combinations(vir, 2):
                exc.append(Excitation("double", (spin, spin), (i, j), (a, b)))
    for i in occ:
        for j in occ:
            for a in vir:
                for b in vir:
                    exc.append(Excitation("double", (0, 1), (i, j), (a, b)))
    return exc


def _excitation_ladder_ops(exc: Excitation, m: int):
    """(T, T_dagger) as ladder-operator products; mode = position + spin*m."""
    def mode(pos, spin):
        return pos + spin * m

    if exc.kind == "single":
        (spin,), (i,), (a,) = exc.spins, exc.occ, exc.vir
        t = [(mode(a, spin), True), (mode(i, spin), False)]
        tdag = [(mode(i, spin), True), (mode(a, spin), False)]
    else:
        (s1, s2), (i, j), (a, b) = exc.spins, exc.occ, exc.vir
        t = [(mode(a, s1), True), (mode(b, s2), True),
             (mode(j, s2), False), (mode(i, s1), False)]
        tdag = [(mode(i, s1), True), (mode(j, s2), True),
                (mode(b, s2), False), (mode(a, s1), False)]
    return t, tdag


def build_uccsd(spec: ActiveSpaceSpec, mapping: str = "parity",
                ctx: TaperingContext | None = None) -> ParamCircuit:
    """Single-Trotter-step UCCSD over the mapped excitation generators."""
    m = spec.n_active_orbitals
    n_occ = len(spec.active_occupied)
    n_vir = m - n_occ
    if n_occ < 1 or n_vir < 1:
        raise ValueError("UCCSD needs at least one occupied and one virtual active MO")
    if mapping not in ("jw", "parity"):
        raise ValueError(f"unknown mapping {mapping!r}")
    if ctx is not None and mapping != "parity":
        raise ValueError("tapering context is only meaningful for the parity mapping")

    n_modes = 2 * m
    n_qubits = n_modes - (2 if ctx is not None else 0)
    excitations = uccsd_excitations(n_occ, n_vir)

    gates: list[GateTemplate] = []
    for param, exc in enumerate(excitations):
        t_ops, tdag_ops = _excitation_ladder_ops(exc, m)
        op = map_ladder_term(t_ops, n_modes, mapping)
        for key, c in map_ladder_term(tdag_ops, n_modes, mapping).items():
            op[key] = op.get(key, 0.0) - c

        # T - T+ is anti-Hermitian: every surviving string carries an
        # imaginary coefficient i*w, realized as exp(-i(-2w theta)/2 P).
        weights: dict[tuple[int, int], float] = {}
        for (x, z), c in op.items():
            if abs(c.real) > 1e-12:
                raise ValueError("excitation generator has a real Pauli component")
            if abs(c.imag) < 1e-14:
                continue
            if ctx is not None:
                x, z, sign = taper_masks(x, z, ctx)
                weights[(x, z)] = weights.get((x, z), 0.0) + sign * c.imag
            else:
                weights[(x, z)] = weights.get((x, z), 0.0) + c.imag

        for (x, z) in sorted(weights, key=lambda k: label_of(*k, n_qubits)):
            w = weights[(x, z)]
            if abs(w) < 1e-14:
                continue
            support = tuple(k for k in range(n_qubits) if (x | z) >> k & 1)
            gates.append(GateTemplate("PROT", support, param=param,
                                      coeff=-2.0 * w, x=x, z=z))

    return ParamCircuit(
        n_qubits=n_qubits,
        n_params=len(excitations),
        gates=tuple(gates),
        kind="uccsd",
        metadata={"excitations": excitations, "mapping": mapping,
                  "tapered": ctx is not None,
                  "n_occ": n_occ, "n_vir": n_vir},
    )


def uccsd_parameter_count(n_occ: int, n_vir: int) -> int:
    """Closed form: 2ov + 2*C(o,2)*C(v,2) + o^2 v^2."""
    o, v = n_occ, n_vir
    pairs = (o * (o - 1) // 2) * (v * (v - 1) // 2)
    return 2 * o * v + 2 * pairs + o * o * v * v


# ---------------------------------------------------------------------------
# RealAmplitudes
# ---------------------------------------------------------------------------

def build_realamplitudes(n_qubits: int, reps: int) -> ParamCircuit:
    """reps x [RY layer; linear CNOT chain] plus a final RY layer.

    On a single qubit the entangling chain is empty and the circuit
    degenerates to stacked RY rotations.
    """
    if n_qubits < 1:
        raise ValueError("RealAmplitudes needs at least 1 qubit")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    gates: list[GateTemplate] = []
    param = 0
    for _ in range(reps):
        for q in range(n_qubits):
            gates.append(GateTemplate("RY", (q,), param=param))
            param += 1
        for q in range(n_qubits - 1):
            gates.append(GateTemplate("CNOT", (q, q + 1)))
    for q in range(n_qubits):
        gates.append(GateTemplate("RY", (q,), param=param))
        param += 1
    return ParamCircuit(
        n_qubits=n_qubits,
        n_params=param,
        gates=tuple(gates),
        kind="realamplitudes",
        metadata={"reps": reps},
    )


# ---------------------------------------------------------------------------
# Binding, depth, export
# ---------------------------------------------------------------------------

def bind(circuit: ParamCircuit, theta) -> list[Gate]:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got {theta.shape}")
    out = []
    for g in circuit.gates:
        angle = g.angle if g.param is None else g.coeff * float(theta[g.param])
        if g.kind in ("X", "H", "S", "SDG", "CNOT"):
            out.append(Gate(g.kind, g.qubits))
        else:
            out.append(Gate(g.kind, g.qubits, angle=angle, x=g.x, z=g.z))
    return out


def depth(circuit: ParamCircuit) -> int:
    """Longest dependency path; gates on disjoint qubits share a layer."""
    level: dict[int, int] = {}
    deepest = 0
    for g in circuit.gates:
        if not g.qubits:
            continue
        layer = 1 + max((level.get(q, 0) for q in g.qubits))
        for q in g.qubits:
            level[q] = layer
        deepest = max(deepest, layer)
    return deepest


def circuit_to_json(circuit: ParamCircuit) -> str:
    doc = {
        "kind": circuit.kind,
        "n_qubits": circuit.n_qubits,
        "n_params": circuit.n_params,
        "gates": [
            {
                "kind": g.kind,
                "qubits": list(g.qubits),
                **({"param": g.param, "coeff": g.coeff} if g.param is not None
                   else {"angle": g.angle}),
                **({"pauli": label_of(g.x, g.z, circuit.n_qubits)}
                   if g.kind == "PROT" else {}),
            }
            for g in circuit.gates
        ],
    }
    return json.dumps(doc, indent=1)
