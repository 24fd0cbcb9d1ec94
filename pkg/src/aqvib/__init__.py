"""Qubit-efficient electronic-structure toolkit for diatomic vibrations.

Pipeline: FCIDUMP integrals -> pair-correlation active-space selection ->
frozen-core folding -> fermion-to-qubit mapping with symmetry tapering ->
exact diagonalization or statevector VQE -> harmonic frequency extraction.
"""

__version__ = "0.1.0"

from .activespace import (
    ActiveIntegrals,
    ActiveSpaceSpec,
    DegenerateDenominatorError,
    SelectionPolicy,
    fold_core,
    iepa1_pair_energies,
    reference_energy,
    score_orbitals,
    select_active_space,
    select_minimal_basis,
)
from .ansatz import (
    ParamCircuit,
    bind,
    build_realamplitudes,
    build_uccsd,
    depth,
    hf_bitstring,
)
from .chemdata import (
    FcidumpError,
    GeometryScan,
    MolecularIntegrals,
    parse_fcidump,
    phys_integral,
    read_scan_manifest,
    reduced_mass,
    write_fcidump,
)
from .config import RunConfig
from .fermion import FermionHamiltonian, build_fermion_hamiltonian, ci_oracle, mp2_oracle
from .pipeline import benchmark_stats, run_pipeline, run_scan
from .qubitmap import (
    PauliSum,
    TaperingContext,
    jordan_wigner,
    parity_map,
    simplify,
    taper_two_qubits,
)
from .simulator import (
    Gate,
    StateVector,
    apply_gate,
    expectation,
    fidelity,
    init_basis_state,
    run_circuit,
)
from .solver import (
    EDResult,
    OptimizerProtocol,
    VqeResult,
    exact_ground_state,
    pec_sweep,
    vqe_energy,
    vqe_gradient,
    vqe_minimize,
)
from .spectro import (
    ErrorStats,
    PotentialEnergyCurve,
    QuadraticFit,
    equilibrium_bond_length,
    error_stats,
    fit_quadratic,
    harmonic_frequency,
    mayer_bond_order,
)

__all__ = [name for name in dir() if not name.startswith("_")]
