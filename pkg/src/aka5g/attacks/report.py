"""Attack reports and the reduced-keyspace search template."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["EffectiveKeySpec", "AttackReport", "ATTACK_NAMES"]

ATTACK_NAMES = (
    "handshake-recovery",
    "keystream-recovery",
    "linkability",
    "sqn-leak",
    "suci-compromise",
)


@dataclass(frozen=True)
class EffectiveKeySpec:
    """Desk-scale keyspace reduction: only the leading ``effective_bits``
    of the key are unknown; the rest is pinned by ``fixed_suffix``.

    The pipeline under attack still runs on full-width 128/256-bit keys, so
    the searched code path is byte-identical to the honest one; only the
    search space shrinks to exactly 2**effective_bits candidates.
    """

    effective_bits: int
    fixed_suffix: bytes  # full key length; the leading effective_bits are zero

    def __post_init__(self):
        if not 8 <= self.effective_bits <= 32:
            raise ValueError("effective_bits must be in [8, 32]")
        if len(self.fixed_suffix) not in (16, 32):
            raise ValueError("fixed_suffix must be a full 128- or 256-bit key template")
        if int.from_bytes(self.fixed_suffix, "big") >> self.shift != 0:
            raise ValueError("fixed_suffix must be zero in the searched prefix")

    @property
    def key_len(self) -> int:
        return len(self.fixed_suffix)

    @property
    def shift(self) -> int:
        return 8 * self.key_len - self.effective_bits

    @property
    def space(self) -> int:
        return 1 << self.effective_bits

    def candidate(self, index: int) -> bytes:
        if not 0 <= index < self.space:
            raise ValueError(f"candidate index out of range: {index}")
        value = int.from_bytes(self.fixed_suffix, "big") | (index << self.shift)
        return value.to_bytes(self.key_len, "big")

    def admits(self, key: bytes) -> bool:
        """Does ``key`` agree with the template outside the searched prefix?"""
        if len(key) != self.key_len:
            return False
        mask = (1 << self.shift) - 1
        return int.from_bytes(key, "big") & mask == int.from_bytes(self.fixed_suffix, "big")

    @classmethod
    def from_true_key(cls, key: bytes, effective_bits: int) -> "EffectiveKeySpec":
        """Template revealing everything but the leading effective_bits."""
        shift = 8 * len(key) - effective_bits
        suffix = int.from_bytes(key, "big") & ((1 << shift) - 1)
        return cls(effective_bits, suffix.to_bytes(len(key), "big"))


@dataclass
class AttackReport:
    """Outcome of one attack run, serializable as a trace-style JSON line."""

    attack: str
    success: bool
    queries: int
    grover_cost: int
    recovered: bytes | None = None
    notes: str = ""
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "attack_report",
                "attack": self.attack,
                "success": self.success,
                "queries": self.queries,
                "grover_cost": self.grover_cost,
                "recovered": self.recovered.hex() if self.recovered is not None else None,
                "notes": self.notes,
                "details": self.details,
            },
            separators=(",", ":"),
            sort_keys=False,
        )
