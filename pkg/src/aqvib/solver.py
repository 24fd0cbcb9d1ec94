"""Ground-state solvers for qubit Hamiltonians.

Two backends: exact diagonalization of the mapped operator ("ed") and a
statevector VQE ("vqe") with analytic adjoint gradients, a two-stage
optimization protocol (several loosely converged gradient-descent restarts,
then one tight quasi-Newton refinement), and a cross-geometry warm-start
consistency pass for potential-energy curves.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.sparse.linalg import LinearOperator, eigsh

from . import activespace, ansatz, chemdata, fermion, qubitmap, simulator
from .config import RunConfig
from .spectro import PotentialEnergyCurve

DEGENERACY_GAP = 1e-9
MAX_DENSE_QUBITS = 10
MAX_ED_QUBITS = 20


class VqeDivergenceError(RuntimeError):
    """The optimizer produced a non-finite energy."""

    def __init__(self, restart_index: int):
        self.restart_index = restart_index
        super().__init__(f"non-finite energy during restart {restart_index}")


# ---------------------------------------------------------------------------
# Exact diagonalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EDResult:
    energy: float
    state: simulator.StateVector
    degenerate: bool


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k])
    return v / phase


def _apply_pauli_sum(amps: np.ndarray, terms) -> np.ndarray:
    out = np.zeros_like(amps)
    for x, z, c in terms:
        out += c * simulator.apply_pauli(amps, x, z)
    return out


def exact_ground_state(p: qubitmap.PauliSum) -> EDResult:
    """Lowest eigenpair of a Pauli-sum Hamiltonian.

    Dense diagonalization for small operators, a matrix-free Lanczos solve
    beyond that.  The returned vector is normalized with its largest
    amplitude made real and positive.
    """
    n = p.n_qubits
    if n > MAX_ED_QUBITS:
        raise ValueError(f"{n} qubits exceeds the {MAX_ED_QUBITS}-qubit solver limit")
    dim = 1 << n
    terms = p.items()

    if dim == 1:
        const = sum(c for _, _, c in terms)
        return EDResult(float(const), simulator.StateVector(np.ones(1, complex), 0), False)

    if n <= MAX_DENSE_QUBITS:
        w, v = np.linalg.eigh(p.to_dense())
        gap = float(w[1] - w[0]) if dim > 1 else np.inf
        vec = _canonical_phase(v[:, 0].astype(complex))
        return EDResult(float(w[0]), simulator.StateVector(vec, n), gap < DEGENERACY_GAP)

    op = LinearOperator(
        (dim, dim),
        matvec=lambda vec: _apply_pauli_sum(np.asarray(vec, complex).ravel(), terms),
        dtype=complex,
    )
    v0 = np.random.default_rng(7).standard_normal(dim)
    w, v = eigsh(op, k=2, which="SA", v0=v0)
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    vec = _canonical_phase(v[:, 0])
    vec = vec / np.linalg.norm(vec)
    return EDResult(float(w[0]), simulator.StateVector(vec, n),
                    float(w[1] - w[0]) < DEGENERACY_GAP)


# ---------------------------------------------------------------------------
# VQE energy and analytic gradient
# ---------------------------------------------------------------------------

def vqe_energy(p: qubitmap.PauliSum, c: ansatz.ParamCircuit, init: str, theta) -> float:
    state = simulator.run_circuit(simulator.init_basis_state(init), ansatz.bind(c, theta))
    return simulator.expectation(state, p)


def _generator_masks(g: simulator.Gate) -> tuple[int, int]:
    """Pauli generator P of a rotation gate exp(-i angle/2 P)."""
    if g.kind == "RY":
        q = g.qubits[0]
        return (1 << q, 1 << q)
    if g.kind == "RZ":
        return (0, 1 << g.qubits[0])
    if g.kind == "PROT":
        return (g.x, g.z)
    raise ValueError(f"gate kind {g.kind!r} has no rotation generator")


def _inverse_gate(g: simulator.Gate) -> simulator.Gate:
    if g.kind in ("RY", "RZ", "PROT"):
        return simulator.Gate(g.kind, g.qubits, angle=-g.angle, x=g.x, z=g.z)
    if g.kind == "S":
        return simulator.Gate("SDG", g.qubits)
    if g.kind == "SDG":
        return simulator.Gate("S", g.qubits)
    return g  # X, H, CNOT are involutions


def vqe_gradient(p: qubitmap.PauliSum, c: ansatz.ParamCircuit, init: str, theta) -> np.ndarray:
    """dE/dtheta by one reverse (adjoint) sweep over the bound gate list.

    Every rotation gate U = exp(-i a/2 P) with a = coeff * theta[k]
    contributes coeff * Im <lam|P|phi> evaluated in the frame just after
    that gate, where phi is the evolving state and lam = H|psi_final>
    pulled back through the inverse gates.
    """
    gates = ansatz.bind(c, theta)
    phi = simulator.run_circuit(simulator.init_basis_state(init), gates)
    lam = simulator.StateVector(_apply_pauli_sum(phi.amps, p.items()), p.n_qubits)

    grad = np.zeros(c.n_params)
    for template, gate in zip(reversed(c.gates), reversed(gates)):
        if template.param is not None:
            x, z = _generator_masks(gate)
            overlap = np.vdot(lam.amps, simulator.apply_pauli(phi.amps, x, z))
            grad[template.param] += template.coeff * overlap.imag
        inv = _inverse_gate(gate)
        phi = simulator.apply_gate(phi, inv)
        lam = simulator.apply_gate(lam, inv)
    return grad


# ---------------------------------------------------------------------------
# Two-stage minimization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerProtocol:
    """Loose multi-restart stage followed by one tight refinement stage."""

    restarts: int = 8
    sigma: float = 0.01                 # radians, restart perturbation scale
    stage1_maxiter: int = 200
    stage1_tol: float = 1e-6
    stage2_maxiter: int = 5000
    stage2_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.stage1_tol <= 0 or self.stage2_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.sigma < 0:
            raise ValueError("perturbation scale must be nonnegative")


@dataclass(frozen=True)
class VqeResult:
    energy: float
    params: np.ndarray
    iterations: int
    fun_evals: int
    grad_evals: int
    grad_norm: float
    fidelity: float | None
    restart_index: int

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "params": [float(t) for t in self.params],
            "iterations": self.iterations,
            "fun_evals": self.fun_evals,
            "grad_evals": self.grad_evals,
            "grad_norm": self.grad_norm,
            "fidelity": self.fidelity,
            "restart_index": self.restart_index,
        }


class _Objective:
    """Energy/gradient callables with evaluation counting and NaN detection."""

    def __init__(self, p, c, init):
        self.p, self.c, self.init = p, c, init
        self.nfev = 0
        self.njev = 0
        self.restart = 0

    def fun(self, theta):
        self.nfev += 1
        e = vqe_energy(self.p, self.c, self.init, theta)
        if not np.isfinite(e):
            raise VqeDivergenceError(self.restart)
        return e

    def jac(self, theta):
        self.njev += 1
        g = vqe_gradient(self.p, self.c, self.init, theta)
        if not np.all(np.isfinite(g)):
            raise VqeDivergenceError(self.restart)
        return g


def _stage2(obj: _Objective, x0: np.ndarray, proto: OptimizerProtocol):
    return minimize(
        obj.fun, x0, jac=obj.jac, method="L-BFGS-B",
        options={"maxiter": proto.stage2_maxiter, "ftol": proto.stage2_tol,
                 "gtol": 1e-12},
    )


def _restart_starts(proto: OptimizerProtocol, n_params: int) -> list[np.ndarray]:
    """Start 0 is exactly zero; the rest are uniform draws in [-sigma, sigma]."""
    rng = np.random.default_rng(proto.seed)
    starts = [np.zeros(n_params)]
    for _ in range(proto.restarts - 1):
        starts.append(rng.uniform(-proto.sigma, proto.sigma, size=n_params))
    return starts


def vqe_minimize(p: qubitmap.PauliSum, c: ansatz.ParamCircuit, init: str,
                 proto: OptimizerProtocol = OptimizerProtocol()) -> VqeResult:
    """Minimize the circuit energy; deterministic for a fixed protocol seed.

    Restart 0 starts exactly at theta = 0; the others start from uniform
    perturbations in [-sigma, sigma].  The best loosely converged restart
    is refined to tight tolerance.
    """
    obj = _Objective(p, c, init)

    best = None
    best_idx = 0
    iterations = 0
    for idx, x0 in enumerate(_restart_starts(proto, c.n_params)):
        obj.restart = idx
        res = minimize(
            obj.fun, x0, jac=obj.jac, method="SLSQP",
            options={"maxiter": proto.stage1_maxiter, "ftol": proto.stage1_tol},
        )
        if not np.isfinite(res.fun):
            raise VqeDivergenceError(idx)
        iterations += int(res.nit)
        if best is None or res.fun < best.fun:
            best, best_idx = res, idx

    obj.restart = best_idx
    res = _stage2(obj, best.x, proto)
    if not np.isfinite(res.fun):
        raise VqeDivergenceError(best_idx)
    iterations += int(res.nit)
    theta = np.asarray(res.x, dtype=float)
    energy = float(res.fun)
    grad_norm = float(np.linalg.norm(vqe_gradient(p, c, init, theta)))

    fid = None
    if p.n_qubits <= MAX_ED_QUBITS:
        ed = exact_ground_state(p)
        state = simulator.run_circuit(simulator.init_basis_state(init),
                                      ansatz.bind(c, theta))
        fid = simulator.fidelity(state, ed.state)

    return VqeResult(
        energy=energy, params=theta, iterations=iterations,
        fun_evals=obj.nfev, grad_evals=obj.njev, grad_norm=grad_norm,
        fidelity=fid, restart_index=best_idx,
    )


def vqe_restart_survey(p: qubitmap.PauliSum, c: ansatz.ParamCircuit, init: str,
                       proto: OptimizerProtocol = OptimizerProtocol(),
                       ) -> list[tuple[float, float]]:
    """Converge every restart to tight tolerance and score each against ED.

    Unlike :func:`vqe_minimize`, which refines only the lowest-energy
    restart, this pushes each restart through both optimization stages and
    returns one ``(energy, overlap_sq)`` pair per restart, in restart
    order.  The restart start points are identical to the ones
    :func:`vqe_minimize` would use for the same protocol.  Useful for
    studying how reliably an ansatz family reaches the true ground state
    as its depth grows.
    """
    exact = exact_ground_state(p)
    obj = _Objective(p, c, init)
    out: list[tuple[float, float]] = []
    for idx, x0 in enumerate(_restart_starts(proto, c.n_params)):
        obj.restart = idx
        res = minimize(
            obj.fun, x0, jac=obj.jac, method="SLSQP",
            options={"maxiter": proto.stage1_maxiter, "ftol": proto.stage1_tol},
        )
        if not np.isfinite(res.fun):
            raise VqeDivergenceError(idx)
        res = _stage2(obj, res.x, proto)
        if not np.isfinite(res.fun):
            raise VqeDivergenceError(idx)
        state = simulator.run_circuit(simulator.init_basis_state(init),
                                      ansatz.bind(c, res.x))
        out.append((float(res.fun), simulator.fidelity(state, exact.state)))
    return out


# ---------------------------------------------------------------------------
# Per-geometry preparation and the scan driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointContext:
    """Everything derived from one geometry's integrals under a config."""

    ints: chemdata.MolecularIntegrals
    scores: activespace.OrbitalScores | None
    spec: activespace.ActiveSpaceSpec
    act: activespace.ActiveIntegrals
    pauli: qubitmap.PauliSum
    taper: qubitmap.TaperingContext | None
    init_bits: str
    circuit: ansatz.ParamCircuit | None


def resolve_frozen(cfg: RunConfig, ints: chemdata.MolecularIntegrals,
                   elements=None) -> tuple[int, ...]:
    if cfg.frozen is None:
        return ()
    if isinstance(cfg.frozen, str):
        if cfg.frozen != "valence":
            raise ValueError(f"unknown frozen-core preset {cfg.frozen!r}")
        if elements is None:
            raise ValueError("the frozen-core preset needs the element list")
        return activespace.preset_frozen(ints, elements)
    return tuple(sorted(cfg.frozen))


def prepare_point(ints: chemdata.MolecularIntegrals, cfg: RunConfig,
                  elements=None) -> PointContext:
    """Select, fold, map, and (for VQE) build the ansatz for one geometry."""
    frozen = resolve_frozen(cfg, ints, elements)

    scores = None
    if cfg.policy == "iepa1":
        table = activespace.iepa1_pair_energies(ints)
        scores = activespace.score_orbitals(table, ints)
        if cfg.topk is not None:
            policy = activespace.SelectionPolicy("topk", cfg.topk, frozen)
        elif cfg.threshold is not None:
            policy = activespace.SelectionPolicy("threshold", cfg.threshold, frozen)
        else:
            policy = activespace.SelectionPolicy("cumulative", cfg.cumulative, frozen)
        spec = activespace.select_active_space(scores, policy)
    else:
        spec = activespace.select_minimal_basis(ints, cfg.target + len(frozen), frozen)

    act = activespace.fold_core(ints, spec)
    ferm = fermion.build_fermion_hamiltonian(act)
    if cfg.mapping == "jw":
        pauli, taper = qubitmap.jordan_wigner(ferm), None
    else:
        pauli, taper = qubitmap.taper_two_qubits(
            qubitmap.parity_map(ferm),
            n_alpha=spec.n_active_electrons // 2,
            n_electrons=spec.n_active_electrons,
        )

    init_bits = ansatz.hf_bitstring(spec, cfg.mapping, taper)
    circuit = None
    if cfg.solver == "vqe":
        if cfg.ansatz == "uccsd":
            circuit = ansatz.build_uccsd(spec, cfg.mapping, taper)
        else:
            circuit = ansatz.build_realamplitudes(pauli.n_qubits, cfg.reps)
    return PointContext(ints, scores, spec, act, pauli, taper, init_bits, circuit)


@dataclass
class PointSolution:
    r: float
    context: PointContext
    energy: float
    flag: str = ""
    vqe: VqeResult | None = None
    ed: EDResult | None = None


def _proto_for_point(cfg: RunConfig, index: int) -> OptimizerProtocol:
    proto = OptimizerProtocol(**cfg.optimizer) if cfg.optimizer else OptimizerProtocol()
    return dataclasses.replace(proto, seed=cfg.seed + index)


def _solve_point(index: int, r: float, ctx: PointContext, cfg: RunConfig) -> PointSolution:
    if cfg.solver == "ed":
        ed = exact_ground_state(ctx.pauli)
        return PointSolution(r, ctx, ed.energy, ed=ed)
    res = vqe_minimize(ctx.pauli, ctx.circuit, ctx.init_bits, _proto_for_point(cfg, index))
    return PointSolution(r, ctx, res.energy, vqe=res)


def _consistency_pass(solutions: list[PointSolution], cfg: RunConfig) -> None:
    """Warm-start each VQE point from its neighbors; keep only improvements.

    Repeats up to cfg.consist_passes times or until a full sweep accepts
    nothing.  Points still improving on the last allowed pass are flagged
    "unconverged".
    """
    n = len(solutions)
    last_improved: set[int] = set()
    converged = False
    for _ in range(cfg.consist_passes):
        improved: set[int] = set()
        for k in range(n):
            for donor in (k - 1, k + 1):
                if not 0 <= donor < n:
                    continue
                sol, src = solutions[k], solutions[donor]
                if sol.context.circuit.n_params != src.context.circuit.n_params:
                    continue  # active spaces differ between the geometries
                obj = _Objective(sol.context.pauli, sol.context.circuit,
                                 sol.context.init_bits)
                obj.restart = sol.vqe.restart_index
                proto = _proto_for_point(cfg, k)
                res = _stage2(obj, np.asarray(src.vqe.params, dtype=float), proto)
                if np.isfinite(res.fun) and res.fun < sol.energy - cfg.consist_eps:
                    refreshed = dataclasses.replace(
                        sol.vqe,
                        energy=float(res.fun),
                        params=np.asarray(res.x, dtype=float),
                        iterations=sol.vqe.iterations + int(res.nit),
                        fun_evals=sol.vqe.fun_evals + obj.nfev,
                        grad_evals=sol.vqe.grad_evals + obj.njev,
                        grad_norm=float(np.linalg.norm(vqe_gradient(
                            sol.context.pauli, sol.context.circuit,
                            sol.context.init_bits, res.x))),
                        fidelity=_state_fidelity(sol.context, res.x),
                    )
                    solutions[k] = dataclasses.replace(
                        sol, energy=float(res.fun), vqe=refreshed)
                    improved.add(k)
        last_improved = improved
        if not improved:
            converged = True
            break
    if not converged:
        for k in last_improved:
            solutions[k].flag = "unconverged"


def _state_fidelity(ctx: PointContext, theta) -> float | None:
    if ctx.pauli.n_qubits > MAX_ED_QUBITS:
        return None
    ed = exact_ground_state(ctx.pauli)
    state = simulator.run_circuit(simulator.init_basis_state(ctx.init_bits),
                                  ansatz.bind(ctx.circuit, theta))
    return simulator.fidelity(state, ed.state)


def pec_sweep(scan: chemdata.GeometryScan, cfg: RunConfig, *, details: bool = False):
    """Solve every scan geometry and return the potential energy curve.

    With details=True also returns the per-point solutions (contexts,
    optimizer results, flags) in bond-length order.
    """
    contexts = [prepare_point(ints, cfg, scan.elements) for _, ints in scan.points]

    def work(k):
        return _solve_point(k, scan.points[k][0], contexts[k], cfg)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            solutions = list(pool.map(work, range(len(contexts))))
    else:
        solutions = [work(k) for k in range(len(contexts))]

    if cfg.solver == "vqe" and len(solutions) > 1:
        _consistency_pass(solutions, cfg)

    curve = PotentialEnergyCurve(
        samples=tuple((s.r, s.energy, s.flag) for s in solutions),
        method=cfg.method_label,
        elements=scan.elements,
    )
    return (curve, solutions) if details else curve
