"""End-to-end orchestration: ingest -> select -> fold -> map -> solve -> fit.

Produces a re-loadable artifact bundle per run: per-geometry selection
reports, Pauli Hamiltonians, solver results, the potential energy curve,
and a frequency summary.  Also joins calculated-vs-reference frequency
tables into benchmark statistics.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import activespace, ansatz, solver, spectro
from .chemdata import GeometryScan, read_scan_manifest, reduced_mass, scan_mass_table
from .config import RunConfig


def spec_to_dict(spec: activespace.ActiveSpaceSpec) -> dict:
    return {
        "frozen": list(spec.frozen),
        "active": list(spec.active),
        "discarded": list(spec.discarded),
        "n_active_electrons": spec.n_active_electrons,
        "active_occupied": list(spec.active_occupied),
        "label": spec.label,
    }


def spec_from_dict(doc: dict) -> activespace.ActiveSpaceSpec:
    return activespace.ActiveSpaceSpec(
        frozen=tuple(doc["frozen"]),
        active=tuple(doc["active"]),
        discarded=tuple(doc["discarded"]),
        n_active_electrons=doc["n_active_electrons"],
        active_occupied=tuple(doc["active_occupied"]),
    )


@dataclass
class PointArtifacts:
    scores_csv: str | None
    active_space_json: str
    hamiltonian_pauli: str
    hamiltonian_json: str
    result_json: str


@dataclass
class PointStatus:
    r: float
    status: str                       # "ok" or "error"
    message: str = ""
    solution: solver.PointSolution | None = None
    artifacts: PointArtifacts | None = None


@dataclass
class RunReport:
    label: str
    elements: tuple[str, str]
    statuses: list[PointStatus]
    curve: spectro.PotentialEnergyCurve | None = None
    fit: spectro.QuadraticFit | None = None
    fit_error: str | None = None
    r_e: float | None = None
    freq_cm1: float | None = None
    mu_amu: float | None = None
    expt_freq_cm1: float | None = None
    out_dir: str | None = None

    @property
    def ok(self) -> bool:
        return (all(s.status == "ok" for s in self.statuses)
                and self.fit_error is None)

    def summary(self) -> dict:
        points = []
        for s in self.statuses:
            row = {"r": s.r, "status": s.status}
            if s.status == "ok":
                sol = s.solution
                row.update(
                    energy=sol.energy,
                    flag=sol.flag,
                    n_qubits=sol.context.pauli.n_qubits,
                    active_space=sol.context.spec.label,
                )
                if sol.vqe is not None:
                    row.update(fidelity=sol.vqe.fidelity,
                               restart_index=sol.vqe.restart_index)
            else:
                row["message"] = s.message
            points.append(row)
        doc = {
            "label": self.label,
            "elements": list(self.elements),
            "n_points": len(self.statuses),
            "points": points,
            "equilibrium_bond_length_angstrom": self.r_e,
            "frequency_cm1": self.freq_cm1,
            "reduced_mass_amu": self.mu_amu,
            "expt_freq_cm1": self.expt_freq_cm1,
            "freq_error_cm1": (None if self.freq_cm1 is None
                               or self.expt_freq_cm1 is None
                               else self.freq_cm1 - self.expt_freq_cm1),
            "fit": (None if self.fit is None else {
                "c2_ha_per_ang2": self.fit.c2,
                "c1_ha_per_ang": self.fit.c1,
                "c0_ha": self.fit.c0,
                "residual_rms_ha": self.fit.residual,
                "window_angstrom": list(self.fit.window),
            }),
            "fit_error": self.fit_error,
        }
        return doc


def _point_artifacts(sol: solver.PointSolution, cfg: RunConfig) -> PointArtifacts:
    ctx = sol.context
    scores_csv = None
    if ctx.scores is not None:
        scores_csv = activespace.scores_to_csv(ctx.scores)
    ham_meta = {
        "n_qubits": ctx.pauli.n_qubits,
        "n_terms": len(ctx.pauli),
        "mapping": cfg.mapping,
        "tapered": ctx.taper is not None,
        "taper_eigenvalues": None if ctx.taper is None else list(ctx.taper.eigenvalues),
        "init_bits": ctx.init_bits,
        "active_space": spec_to_dict(ctx.spec),
        "e_core": ctx.act.e_core,
    }
    result = {
        "r_angstrom": sol.r,
        "energy_hartree": sol.energy,
        "flag": sol.flag,
        "solver": cfg.solver,
    }
    if sol.ed is not None:
        result["degenerate"] = sol.ed.degenerate
    if sol.vqe is not None:
        result["vqe"] = sol.vqe.to_dict()
        result["ansatz"] = cfg.ansatz
        if ctx.circuit is not None:
            result["n_params"] = ctx.circuit.n_params
            result["circuit_depth"] = ansatz.depth(ctx.circuit)
    return PointArtifacts(
        scores_csv=scores_csv,
        active_space_json=json.dumps(spec_to_dict(ctx.spec), indent=1),
        hamiltonian_pauli=ctx.pauli.to_text(),
        hamiltonian_json=json.dumps(ham_meta, indent=1),
        result_json=json.dumps(result, indent=1),
    )


def run_scan(scan: GeometryScan, cfg: RunConfig) -> RunReport:
    """Solve a geometry scan, tolerating per-point failures."""
    statuses: list[PointStatus] = []
    solutions: list[solver.PointSolution] = []
    for k, (r, ints) in enumerate(scan.points):
        try:
            ctx = solver.prepare_point(ints, cfg, scan.elements)
            sol = solver._solve_point(k, r, ctx, cfg)
        except Exception as exc:
            statuses.append(PointStatus(r, "error", f"{type(exc).__name__}: {exc}"))
            continue
        statuses.append(PointStatus(r, "ok", solution=sol))
        solutions.append(sol)

    if cfg.solver == "vqe" and len(solutions) > 1:
        solver._consistency_pass(solutions, cfg)

    for s in statuses:
        if s.status == "ok":
            s.artifacts = _point_artifacts(s.solution, cfg)

    report = RunReport(label=cfg.method_label, elements=scan.elements,
                       statuses=statuses, expt_freq_cm1=scan.expt_freq_cm1)
    if solutions:
        report.curve = spectro.PotentialEnergyCurve(
            samples=tuple((s.r, s.energy, s.flag) for s in solutions),
            method=cfg.method_label,
            elements=scan.elements,
        )
    report.mu_amu = reduced_mass(scan.elements[0], scan.elements[1],
                                 scan_mass_table(scan))
    try:
        if report.curve is None:
            raise ValueError("no successfully solved geometry")
        report.fit = spectro.fit_quadratic(report.curve)
        report.r_e = spectro.equilibrium_bond_length(report.fit)
        report.freq_cm1 = spectro.harmonic_frequency(report.fit, report.mu_amu)
    except Exception as exc:
        report.fit_error = f"{type(exc).__name__}: {exc}"
    return report


def bundle_files(report: RunReport, cfg: RunConfig) -> dict[str, str]:
    """The artifact bundle as {relative path: content}, ready to write."""
    files: dict[str, str] = {"config.json": cfg.to_json() + "\n"}
    for s in report.statuses:
        pdir = f"points/r_{s.r:.4f}"
        if s.status != "ok":
            files[f"{pdir}/error.json"] = json.dumps(
                {"r": s.r, "error": s.message}, indent=1) + "\n"
            continue
        a = s.artifacts
        if a.scores_csv is not None:
            files[f"{pdir}/scores.csv"] = a.scores_csv
        files[f"{pdir}/active_space.json"] = a.active_space_json + "\n"
        files[f"{pdir}/hamiltonian.pauli"] = a.hamiltonian_pauli + "\n"
        files[f"{pdir}/hamiltonian.json"] = a.hamiltonian_json + "\n"
        files[f"{pdir}/result.json"] = a.result_json + "\n"
    if report.curve is not None:
        files["pec.csv"] = spectro.pec_to_csv(report.curve)
    files["summary.json"] = json.dumps(report.summary(), indent=1) + "\n"
    return files


def write_files(files: dict[str, str], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    for rel, content in files.items():
        path = out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content)
    return out


def write_bundle(report: RunReport, cfg: RunConfig, out_dir: str | Path) -> Path:
    out = write_files(bundle_files(report, cfg), out_dir)
    report.out_dir = str(out)
    return out


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Full pipeline from a scan manifest; writes the bundle when cfg.out is set."""
    if cfg.manifest is None:
        raise ValueError("config needs a scan manifest path")
    scan = read_scan_manifest(cfg.manifest)
    report = run_scan(scan, cfg)
    if cfg.out:
        write_bundle(report, cfg, cfg.out)
    return report


# ---------------------------------------------------------------------------
# Benchmark statistics over calculated-vs-reference tables
# ---------------------------------------------------------------------------

@dataclass
class StatsReport:
    rows: list[dict]
    stats: spectro.ErrorStats
    csv_text: str = field(init=False)
    text: str = field(init=False)

    def __post_init__(self):
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf, fieldnames=["molecule", "active_space", "freq_cm1",
                             "expt_cm1", "error"])
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row)
        self.csv_text = buf.getvalue()
        lines = [f"{'molecule':<10} {'active_space':>12} {'freq_cm1':>10} "
                 f"{'expt_cm1':>10} {'error':>9}"]
        for row in self.rows:
            lines.append(f"{row['molecule']:<10} {row['active_space']:>12} "
                         f"{row['freq_cm1']:>10.2f} {row['expt_cm1']:>10.2f} "
                         f"{row['error']:>9.2f}")
        s = self.stats
        lines.append(f"{'RMSD':<10} {'':>12} {'':>10} {'':>10} {s.rmsd:>9.2f}")
        lines.append(f"{'MSD':<10} {'':>12} {'':>10} {'':>10} {s.msd:>9.2f}")
        lines.append(f"{'MAD':<10} {'':>12} {'':>10} {'':>10} {s.mad:>9.2f}")
        self.text = "\n".join(lines) + "\n"


def _read_csv_rows(text: str, required: tuple[str, ...], what: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError(f"{what} table is empty")
    missing = [c for c in required if c not in rows[0]]
    if missing:
        raise ValueError(f"{what} table lacks columns: {missing}")
    return rows

def benchmark_stats(results_text: str, reference_text: str) -> StatsReport:
    """Join a calculated-frequency table against a reference table by molecule."""
    calc_rows = _read_csv_rows(results_text, ("molecule", "freq_cm1"), "results")
    ref_rows = _read_csv_rows(reference_text, ("molecule", "expt_cm1"), "reference")
    calc = {r["molecule"]: r for r in calc_rows}
    ref = {r["molecule"]: r for r in ref_rows}
    if len(calc) != len(calc_rows):
        raise ValueError("duplicate molecule keys in results table")
    if len(ref) != len(ref_rows):
        raise ValueError("duplicate molecule keys in reference table")
    missing_ref = sorted(set(calc) - set(ref))
    missing_calc = sorted(set(ref) - set(calc))
    if missing_ref or missing_calc:
        raise ValueError(
            "molecule keys do not align; "
            f"missing from reference: {missing_ref}; missing from results: {missing_calc}"
        )

    rows = []
    for name in (r["molecule"] for r in calc_rows):
        f = float(calc[name]["freq_cm1"])
        e = float(ref[name]["expt_cm1"])
        rows.append({
            "molecule": name,
            "active_space": calc[name].get("active_space", ""),
            "freq_cm1": f,
            "expt_cm1": e,
            "error": f - e,
        })
    stats = spectro.error_stats([r["freq_cm1"] for r in rows],
                                [r["expt_cm1"] for r in rows])
    return StatsReport(rows=rows, stats=stats)
