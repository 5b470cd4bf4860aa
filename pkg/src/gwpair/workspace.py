"""Global workspace: broadcast state plus the append-only cycle trace."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

from .errors import ContractViolation
from .types import MODULE_ORDER


@dataclass
class CycleTrace:
    """What one competition cycle did, for export and diagnosis.

    ``conflicts`` lists the pairs that exceeded the conflict threshold this
    cycle; a non-empty list means resolution adjusted the weights (and may
    have replaced the broadcast content).
    """

    iteration: int
    salience_raw: dict[str, float]
    salience_norm: dict[str, float]
    combined_weights: dict[str, float]
    conflicts: list[dict]
    winner: str
    delta: float | None

    def __post_init__(self):
        total = sum(self.combined_weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ContractViolation(f"combined weights sum to {total}, not 1")

    def to_json(self) -> dict:
        return {
            "iteration": self.iteration,
            "salience_raw": self.salience_raw,
            "salience_norm": self.salience_norm,
            "combined_weights": self.combined_weights,
            "conflicts": self.conflicts,
            "winner": self.winner,
            "delta": self.delta,
        }


@dataclass
class GlobalWorkspace:
    """Shared broadcast state visible to every module.

    ``ignition_count`` always equals the trace length: one ignition per
    executed cycle.
    """

    broadcast_content: str = ""
    broadcast_source: str | None = None
    ignition_count: int = 0
    context_tags: dict[str, str] = field(default_factory=dict)
    trace: list[CycleTrace] = field(default_factory=list)

    def broadcast(self, content: str, source: str, trace_entry: CycleTrace) -> "GlobalWorkspace":
        """Ignite: replace the broadcast and append this cycle's trace."""
        if not content:
            raise ContractViolation("cannot broadcast empty content")
        if source not in MODULE_ORDER:
            raise ContractViolation(f"unknown broadcast source {source!r}")
        self.broadcast_content = content
        self.broadcast_source = source
        self.ignition_count += 1
        self.trace.append(trace_entry)
        return self


def write_trace_jsonl(traces: list[CycleTrace], fh: IO[str]) -> None:
    """One CycleTrace per line, stable key order for reproducible files."""
    for t in traces:
        fh.write(json.dumps(t.to_json(), sort_keys=True) + "\n")


def export_traces(traces: list[CycleTrace], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_trace_jsonl(traces, fh)
