"""Per-node evaluation records."""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class TraceRecord:
    section: str  # "target", "condition" or "policy"
    node: str
    kind: str
    decision: str
    policy: str = ""
    detail: str = ""
    vertices: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "policy": self.policy,
            "section": self.section,
            "node": self.node,
            "kind": self.kind,
            "decision": self.decision,
        }
        if self.detail:
            out["detail"] = self.detail
        if self.vertices:
            out["vertices"] = list(self.vertices)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class EvaluationTrace:
    records: list[TraceRecord] = field(default_factory=list)
    outcome: str = ""

    def add(self, record: TraceRecord) -> None:
        self.records.append(record)

    def extend(self, records: Iterable[TraceRecord]) -> None:
        self.records.extend(records)

    def section(self, name: str) -> list[TraceRecord]:
        return [r for r in self.records if r.section == name]

    def find(self, node: str, section: str | None = None) -> TraceRecord | None:
        for r in self.records:
            if r.node == node and (section is None or r.section == section):
                return r
        return None

    def to_jsonl(self) -> str:
        lines = [json.dumps(r.to_json(), ensure_ascii=False, sort_keys=True) for r in self.records]
        if self.outcome:
            lines.append(json.dumps({"outcome": self.outcome}, sort_keys=True))
        return "\n".join(lines) + "\n"
