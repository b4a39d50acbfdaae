"""Deterministic randomness derivation for simulations.

All simulation entropy descends from the 64-bit scenario seed through
labelled SHA-256 chains, so any individual value (a subscriber key, an AV's
RAND, SUCI randomness) can be re-derived independently of draw order. That
property is what lets the threat harness reconstruct ground truth from a
config without replaying a whole run.
"""

from __future__ import annotations

import hashlib
import random

__all__ = ["det_bytes", "det_rng"]


def _domain(seed: int, labels: tuple) -> bytes:
    h = hashlib.sha256()
    h.update(seed.to_bytes(8, "big", signed=False))
    for label in labels:
        part = label if isinstance(label, bytes) else str(label).encode()
        h.update(len(part).to_bytes(2, "big"))
        h.update(part)
    return h.digest()


def det_bytes(seed: int, *labels, n: int) -> bytes:
    """``n`` bytes, a pure function of (seed, labels)."""
    root = _domain(seed, labels)
    out = bytearray()
    counter = 0
    while len(out) < n:
        out += hashlib.sha256(root + counter.to_bytes(4, "big")).digest()
        counter += 1
    return bytes(out[:n])


def det_rng(seed: int, *labels) -> random.Random:
    """Independent PRNG stream keyed by (seed, labels)."""
    return random.Random(_domain(seed, labels))
