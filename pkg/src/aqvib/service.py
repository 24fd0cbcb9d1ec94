"""HTTP compute service wrapping the toolkit.

Every endpoint is pure compute over inline payloads (FCIDUMP text, CSV
text, config fields); nothing here touches the filesystem, so the same
app serves both the in-process CLI transport and a network deployment.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, activespace, ansatz, pipeline, solver, spectro
from .chemdata import GeometryScan, parse_fcidump, reduced_mass, scan_mass_table
from .config import RunConfig


class ConfigModel(BaseModel):
    policy: Literal["iepa1", "mb"] = "iepa1"
    topk: int | None = None
    threshold: float | None = None
    cumulative: float | None = None
    target: int | None = None
    frozen: list[int] | str | None = None
    mapping: Literal["jw", "parity"] = "parity"
    solver: Literal["ed", "vqe"] = "ed"
    ansatz: Literal["uccsd", "realamp"] = "uccsd"
    reps: int = 1
    optimizer: dict = Field(default_factory=dict)
    consist_passes: int = 3
    consist_eps: float = 1e-6
    seed: int = 0
    workers: int = 1

    def to_run_config(self) -> RunConfig:
        return RunConfig(**self.model_dump())


class ScanPointModel(BaseModel):
    r: float
    fcidump: str


class ScanModel(BaseModel):
    elements: tuple[str, str]
    points: list[ScanPointModel]
    expt_freq_cm1: float | None = None
    masses: dict[str, float] | None = None

    def to_scan(self) -> GeometryScan:
        pts = sorted(
            ((p.r, parse_fcidump(p.fcidump, label=f"r={p.r:.4f}")) for p in self.points),
            key=lambda t: t[0],
        )
        return GeometryScan(elements=self.elements, points=tuple(pts),
                            expt_freq_cm1=self.expt_freq_cm1, masses=self.masses)


class IngestRequest(BaseModel):
    fcidump: str


class SelectRequest(BaseModel):
    fcidump: str
    config: ConfigModel = Field(default_factory=ConfigModel)
    elements: list[str] | None = None


class HamiltonianRequest(SelectRequest):
    pass


class SolveRequest(SelectRequest):
    pass


class PecRequest(BaseModel):
    scan: ScanModel
    config: ConfigModel = Field(default_factory=ConfigModel)


class FreqRequest(BaseModel):
    pec_csv: str
    mu_amu: float | None = None
    elements: tuple[str, str] | None = None
    masses: dict[str, float] | None = None


class StatsRequest(BaseModel):
    results_csv: str
    reference_csv: str


def _fail(exc: Exception):
    raise HTTPException(status_code=422,
                        detail={"error": type(exc).__name__, "message": str(exc)})


def _scores_rows(scores: activespace.OrbitalScores | None) -> list[dict] | None:
    if scores is None:
        return None
    return [
        {
            "mo_index": k,
            "kind": "occ" if scores.occupied[k] else "vir",
            "epsilon": float(scores.epsilons[k]),
            "score_Ha": float(scores.scores[k]),
            "percent": float(scores.percents[k]),
        }
        for k in range(len(scores.scores))
    ]


def create_app() -> FastAPI:
    app = FastAPI(title="aqvib", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/ingest")
    def ingest(req: IngestRequest):
        try:
            ints = parse_fcidump(req.fcidump)
        except ValueError as exc:
            _fail(exc)
        return {
            "n_orbitals": ints.n_orbitals,
            "n_electrons": ints.n_electrons,
            "n_occupied": ints.n_occupied,
            "e_const": ints.e_const,
            "orbital_energies": [float(e) for e in ints.orbital_energies],
        }

    @app.post("/select")
    def select(req: SelectRequest):
        try:
            ints = parse_fcidump(req.fcidump)
            cfg = req.config.to_run_config()
            ctx = solver.prepare_point(ints, cfg, req.elements)
        except ValueError as exc:
            _fail(exc)
        out = {"active_space": pipeline.spec_to_dict(ctx.spec),
               "scores": _scores_rows(ctx.scores)}
        if ctx.scores is not None:
            out["correlation_total_Ha"] = ctx.scores.total
        return out

    @app.post("/hamiltonian")
    def hamiltonian(req: HamiltonianRequest):
        try:
            ints = parse_fcidump(req.fcidump)
            cfg = req.config.to_run_config()
            ctx = solver.prepare_point(ints, cfg, req.elements)
        except ValueError as exc:
            _fail(exc)
        return {
            "n_qubits": ctx.pauli.n_qubits,
            "n_terms": len(ctx.pauli),
            "pauli_text": ctx.pauli.to_text(),
            "init_bits": ctx.init_bits,
            "mapping": cfg.mapping,
            "tapered": ctx.taper is not None,
            "taper_eigenvalues": (None if ctx.taper is None
                                  else list(ctx.taper.eigenvalues)),
            "active_space": pipeline.spec_to_dict(ctx.spec),
            "e_core": ctx.act.e_core,
        }

    @app.post("/solve")
    def solve_endpoint(req: SolveRequest):
        try:
            ints = parse_fcidump(req.fcidump)
            cfg = req.config.to_run_config()
            ctx = solver.prepare_point(ints, cfg, req.elements)
            sol = solver._solve_point(0, ints.bond_length or 0.0, ctx, cfg)
        except (ValueError, solver.VqeDivergenceError) as exc:
            _fail(exc)
        out = {
            "energy_hartree": sol.energy,
            "n_qubits": ctx.pauli.n_qubits,
            "active_space": pipeline.spec_to_dict(ctx.spec),
            "solver": cfg.solver,
        }
        if sol.ed is not None:
            out["degenerate"] = sol.ed.degenerate
        if sol.vqe is not None:
            out["vqe"] = sol.vqe.to_dict()
            out["n_params"] = ctx.circuit.n_params
            out["circuit_depth"] = ansatz.depth(ctx.circuit)
        return out

    @app.post("/pec")
    def pec(req: PecRequest):
        try:
            scan = req.scan.to_scan()
            cfg = req.config.to_run_config()
            curve = solver.pec_sweep(scan, cfg)
        except (ValueError, solver.VqeDivergenceError) as exc:
            _fail(exc)
        return {
            "method": curve.method,
            "elements": list(curve.elements),
            "pec_csv": spectro.pec_to_csv(curve),
            "samples": [{"r": r, "energy": e, "flag": f} for r, e, f in curve.samples],
        }

    @app.post("/freq")
    def freq(req: FreqRequest):
        try:
            curve = spectro.pec_from_csv(req.pec_csv)
            if req.mu_amu is not None:
                mu = req.mu_amu
            elif req.elements is not None:
                scan_like = GeometryScan(elements=tuple(req.elements), points=(),
                                         masses=req.masses)
                mu = reduced_mass(req.elements[0], req.elements[1],
                                  scan_mass_table(scan_like))
            else:
                raise ValueError("provide mu_amu or an element pair")
            fit = spectro.fit_quadratic(curve)
            r_e = spectro.equilibrium_bond_length(fit)
            nu = spectro.harmonic_frequency(fit, mu)
        except ValueError as exc:
            _fail(exc)
        return {
            "frequency_cm1": nu,
            "equilibrium_bond_length_angstrom": r_e,
            "reduced_mass_amu": mu,
            "fit": {"c2_ha_per_ang2": fit.c2, "c1_ha_per_ang": fit.c1,
                    "c0_ha": fit.c0, "residual_rms_ha": fit.residual,
                    "window_angstrom": list(fit.window)},
        }

    @app.post("/stats")
    def stats(req: StatsRequest):
        try:
            rep = pipeline.benchmark_stats(req.results_csv, req.reference_csv)
        except ValueError as exc:
            _fail(exc)
        return {
            "rows": rep.rows,
            "rmsd": rep.stats.rmsd,
            "msd": rep.stats.msd,
            "mad": rep.stats.mad,
            "count": rep.stats.count,
            "csv": rep.csv_text,
            "text": rep.text,
        }

    @app.post("/run")
    def run(req: PecRequest):
        try:
            scan = req.scan.to_scan()
            cfg = req.config.to_run_config()
            report = pipeline.run_scan(scan, cfg)
        except (ValueError, solver.VqeDivergenceError) as exc:
            _fail(exc)
        return {
            "summary": report.summary(),
            "ok": report.ok,
            "files": pipeline.bundle_files(report, cfg),
        }

    return app


app = create_app()
