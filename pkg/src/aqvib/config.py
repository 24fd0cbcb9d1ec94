"""Run configuration shared by the pipeline, the service, and the CLI."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class RunConfig:
    """Everything needed to turn a geometry scan into a frequency.

    policy "iepa1" ranks MOs by pair-correlation scores and needs exactly one
    of topk / threshold / cumulative; policy "mb" imitates a minimal-basis
    active space and needs `target` (the active MO count).  `frozen` is an
    explicit MO index list, a preset name ("valence"), or None.
    """

    manifest: str | None = None
    policy: str = "iepa1"
    topk: int | None = None
    threshold: float | None = None
    cumulative: float | None = None
    target: int | None = None
    frozen: list[int] | str | None = None
    mapping: str = "parity"          # "jw" | "parity" (parity implies 2-qubit tapering)
    solver: str = "ed"               # "ed" | "vqe"
    ansatz: str = "uccsd"            # "uccsd" | "realamp"
    reps: int = 1
    optimizer: dict = field(default_factory=dict)
    consist_passes: int = 3
    consist_eps: float = 1e-6
    seed: int = 0
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.policy not in ("iepa1", "mb"):
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.mapping not in ("jw", "parity"):
            raise ValueError(f"unknown mapping {self.mapping!r}")
        if self.solver not in ("ed", "vqe"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.ansatz not in ("uccsd", "realamp"):
            raise ValueError(f"unknown ansatz {self.ansatz!r}")
        if self.policy == "iepa1":
            chosen = [v for v in (self.topk, self.threshold, self.cumulative) if v is not None]
            if len(chosen) != 1:
                raise ValueError("policy 'iepa1' needs exactly one of topk/threshold/cumulative")
        if self.policy == "mb" and self.target is None:
            raise ValueError("policy 'mb' needs target (active MO count)")

    @property
    def method_label(self) -> str:
        if self.solver == "ed":
            method = "EDQC"
        else:
            method = "VQE(UCCSD)" if self.ansatz == "uccsd" else "VQE(RealAmplitudes)"
        return f"{method}[{self.policy.upper()}]/FCIDUMP"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        doc = json.loads(Path(path).read_text())
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)
