"""Trace capture: one JSON record per line, hex payloads, stable key order.

Record fields: ``i`` (record index), ``step`` (bus delivery counter),
``link`` ("air" for UE<->SEAF, "core" for the secured serving<->home leg,
"none" for pure events), ``from``/``to`` entity labels, ``type`` message
class name or event name, ``payload`` canonical hex bytes, ``notes`` a flat
JSON object of annotations. Serialization is canonical (sorted note keys,
no whitespace variation) so determinism checks can compare raw bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

__all__ = ["TraceRecord", "Trace", "lint_no_cleartext_supi"]


@dataclass(frozen=True)
class TraceRecord:
    i: int
    step: int
    link: str
    sender: str
    receiver: str
    msg_type: str
    payload_hex: str
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "i": self.i,
                "step": self.step,
                "link": self.link,
                "from": self.sender,
                "to": self.receiver,
                "type": self.msg_type,
                "payload": self.payload_hex,
                "notes": self.notes,
            },
            sort_keys=False,
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "TraceRecord":
        obj = json.loads(line)
        return cls(
            i=obj["i"],
            step=obj["step"],
            link=obj["link"],
            sender=obj["from"],
            receiver=obj["to"],
            msg_type=obj["type"],
            payload_hex=obj["payload"],
            notes=obj.get("notes", {}),
        )

    @property
    def payload(self) -> bytes:
        return bytes.fromhex(self.payload_hex)


class Trace:
    """Append-only record list with JSONL round-tripping."""

    def __init__(self, records: list[TraceRecord] | None = None):
        self.records: list[TraceRecord] = records or []

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def messages(self, msg_type: str | None = None, link: str | None = None) -> list[TraceRecord]:
        out = []
        for r in self.records:
            if r.msg_type == "Event":
                continue
            if msg_type is not None and r.msg_type != msg_type:
                continue
            if link is not None and r.link != link:
                continue
            out.append(r)
        return out

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.records)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    @classmethod
    def read(cls, path: str | Path) -> "Trace":
        records = [
            TraceRecord.from_json(line)
            for line in Path(path).read_text().splitlines()
            if line.strip()
        ]
        return cls(records)


def lint_no_cleartext_supi(trace: Trace, supi_values: Iterable[bytes]) -> list[int]:
    """Indices of over-the-air records whose payload contains a SUPI.

    Empty list means the confidentiality invariant held for the trace.
    """
    supis = [s for s in supi_values]
    offenders = []
    for r in trace:
        if r.link != "air" or not r.payload_hex:
            continue
        payload = r.payload
        if any(s in payload for s in supis):
            offenders.append(r.i)
    return offenders
