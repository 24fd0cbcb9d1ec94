"""Command-line client for the compute service.

Every subcommand builds a request and posts it to the HTTP app — served
in-process by default, or remotely when --server is given — so local runs
and a deployed service return byte-identical payloads.  File handling
(reading FCIDUMPs and manifests, writing artifact bundles) stays here on
the client side.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
from pathlib import Path

import httpx

log = logging.getLogger("aqvib.cli")


def _post(server: str | None, path: str, payload: dict) -> dict:
    async def call() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=3600.0) as client:
                return await client.post(path, json=payload)
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://aqvib",
                                     timeout=3600.0) as client:
            return await client.post(path, json=payload)

    resp = asyncio.run(call())
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise CliError(detail)
    return resp.json()


class CliError(RuntimeError):
    def __init__(self, record):
        self.record = record if isinstance(record, dict) else {"error": str(record)}
        super().__init__(json.dumps(self.record))


def _parse_frozen(raw: str | None):
    if raw is None:
        return None
    if raw == "valence":
        return "valence"
    return [int(tok) for tok in raw.split(",") if tok.strip() != ""]


def _config_payload(args) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        cfg.update(json.loads(Path(args.config).read_text()))
        cfg.pop("manifest", None)
        cfg.pop("out", None)
    for key in ("policy", "topk", "threshold", "cumulative", "target", "mapping",
                "solver", "ansatz", "reps", "seed", "workers"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    frozen = _parse_frozen(getattr(args, "frozen", None))
    if frozen is not None:
        cfg["frozen"] = frozen
    if getattr(args, "optimizer", None):
        cfg["optimizer"] = json.loads(args.optimizer)
    return cfg


def _scan_payload(manifest_path: str) -> dict:
    doc = json.loads(Path(manifest_path).read_text())
    base = Path(manifest_path).parent
    points = [
        {"r": float(p["r"]), "fcidump": (base / p["fcidump"]).read_text()}
        for p in doc["points"]
    ]
    scan = {"elements": doc["elements"], "points": points}
    if doc.get("expt_freq_cm1") is not None:
        scan["expt_freq_cm1"] = doc["expt_freq_cm1"]
    if doc.get("masses"):
        scan["masses"] = doc["masses"]
    return scan


def _manifest_from(args) -> str:
    manifest = getattr(args, "manifest", None)
    if manifest is None and getattr(args, "config", None):
        manifest = json.loads(Path(args.config).read_text()).get("manifest")
    if manifest is None:
        raise CliError({"error": "no scan manifest (use --manifest or config file)"})
    return manifest


def _emit(doc, out: str | None):
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=1)
    if out:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)


def _elements_arg(args) -> list[str] | None:
    raw = getattr(args, "elements", None)
    return raw.split(",") if raw else None


def cmd_ingest(args) -> int:
    doc = _post(args.server, "/ingest", {"fcidump": Path(args.fcidump).read_text()})
    _emit(doc, args.out)
    return 0


def cmd_select(args) -> int:
    payload = {"fcidump": Path(args.fcidump).read_text(),
               "config": _config_payload(args)}
    if _elements_arg(args):
        payload["elements"] = _elements_arg(args)
    doc = _post(args.server, "/select", payload)
    _emit(doc, args.out)
    return 0


def cmd_hamiltonian(args) -> int:
    payload = {"fcidump": Path(args.fcidump).read_text(),
               "config": _config_payload(args)}
    if _elements_arg(args):
        payload["elements"] = _elements_arg(args)
    doc = _post(args.server, "/hamiltonian", payload)
    if args.pauli_out:
        Path(args.pauli_out).write_text(doc["pauli_text"] + "\n")
        doc = {k: v for k, v in doc.items() if k != "pauli_text"}
    _emit(doc, args.out)
    return 0


def cmd_solve(args) -> int:
    payload = {"fcidump": Path(args.fcidump).read_text(),
               "config": _config_payload(args)}
    if _elements_arg(args):
        payload["elements"] = _elements_arg(args)
    doc = _post(args.server, "/solve", payload)
    _emit(doc, args.out)
    return 0


def cmd_pec(args) -> int:
    payload = {"scan": _scan_payload(_manifest_from(args)),
               "config": _config_payload(args)}
    doc = _post(args.server, "/pec", payload)
    _emit(doc["pec_csv"], args.out)
    return 0


def cmd_freq(args) -> int:
    payload: dict = {"pec_csv": Path(args.pec).read_text()}
    if args.mu is not None:
        payload["mu_amu"] = args.mu
    if _elements_arg(args):
        payload["elements"] = _elements_arg(args)
    if args.masses:
        payload["masses"] = json.loads(args.masses)
    doc = _post(args.server, "/freq", payload)
    _emit(doc, args.out)
    return 0


def cmd_stats(args) -> int:
    doc = _post(args.server, "/stats", {
        "results_csv": Path(args.results).read_text(),
        "reference_csv": Path(args.reference).read_text(),
    })
    if args.out:
        Path(args.out).write_text(doc["csv"])
    print(doc["text"], end="")
    return 0


def cmd_run(args) -> int:
    manifest = _manifest_from(args)
    payload = {"scan": _scan_payload(manifest), "config": _config_payload(args)}
    doc = _post(args.server, "/run", payload)
    out = args.out
    if out is None and getattr(args, "config", None):
        out = json.loads(Path(args.config).read_text()).get("out")
    if out:
        base = Path(out)
        for rel, content in doc["files"].items():
            path = base / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content)
        log.info("wrote %d artifact files under %s", len(doc["files"]), base)
    summary = doc["summary"]
    print(json.dumps(summary, indent=1))
    if not doc["ok"]:
        failed = [p for p in summary["points"] if p["status"] != "ok"]
        record = {"error": "pipeline run incomplete",
                  "failed_points": failed,
                  "fit_error": summary["fit_error"]}
        print(json.dumps(record), file=sys.stderr)
        return 2
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _add_selection_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--policy", choices=["iepa1", "mb"])
    p.add_argument("--topk", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--cumulative", type=float)
    p.add_argument("--target", type=int)
    p.add_argument("--frozen", help='comma-separated MO indices or "valence"')
    p.add_argument("--elements", help="comma-separated element pair, e.g. H,F")


def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("--mapping", choices=["jw", "parity"])
    p.add_argument("--solver", choices=["ed", "vqe"])
    p.add_argument("--ansatz", choices=["uccsd", "realamp"])
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--optimizer", help="JSON dict of optimizer protocol overrides")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqvib",
        description="Active-space selection, qubit mapping, ground-state solvers, "
                    "and vibrational frequencies for diatomics.",
    )
    parser.add_argument("--server", help="URL of a running service "
                                         "(default: run the app in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and validate an FCIDUMP file")
    p.add_argument("--fcidump", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("select", help="score MOs and select an active space")
    p.add_argument("--fcidump", required=True)
    _add_selection_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("hamiltonian", help="build the qubit Hamiltonian")
    p.add_argument("--fcidump", required=True)
    _add_selection_flags(p)
    p.add_argument("--mapping", choices=["jw", "parity"])
    p.add_argument("--pauli-out", help="write the Pauli-sum text here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("solve", help="ground-state energy of one geometry")
    p.add_argument("--fcidump", required=True)
    _add_selection_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pec", help="solve every scan geometry to a PEC CSV")
    p.add_argument("--manifest", help="scan manifest JSON")
    _add_selection_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pec)

    p = sub.add_parser("freq", help="harmonic frequency from a PEC CSV")
    p.add_argument("--pec", required=True)
    p.add_argument("--mu", type=float, help="reduced mass in amu")
    p.add_argument("--elements", help="element pair, e.g. H,H")
    p.add_argument("--masses", help="JSON element->amu overrides")
    p.add_argument("--out")
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("stats", help="benchmark statistics from result tables")
    p.add_argument("--results", required=True, help="CSV with molecule,freq_cm1")
    p.add_argument("--reference", required=True, help="CSV with molecule,expt_cm1")
    p.add_argument("--out", help="write the joined CSV here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("run", help="full pipeline: scan -> PEC -> frequency")
    p.add_argument("--manifest", help="scan manifest JSON")
    _add_selection_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out", help="artifact bundle directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("AQVIB_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps(exc.record), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
