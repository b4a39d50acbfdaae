"""Batch HMAC-SHA-256 built on the lane compression kernels.

Works in byte space between compressions (simple slicing for the variable
fields of each pipeline stage) and converts to big-endian uint32 words only
at the compression boundary. All keys in the derivation pipelines are at
most 64 bytes, so the HMAC key schedule is always a single ipad/opad block.
"""

from __future__ import annotations

import numpy as np

from .sha256_numpy import IV

__all__ = [
    "bytes_to_words",
    "words_to_bytes",
    "tile_lanes",
    "hmac_precompute",
    "hmac_finish",
    "hmac_digest",
]


def bytes_to_words(block_bytes: np.ndarray) -> np.ndarray:
    """(N, 64k) uint8 -> (N, 16k) uint32, big-endian."""
    n, width = block_bytes.shape
    b = block_bytes.reshape(n, width // 4, 4).astype(np.uint32)
    return (b[:, :, 0] << np.uint32(24)) | (b[:, :, 1] << np.uint32(16)) | \
           (b[:, :, 2] << np.uint32(8)) | b[:, :, 3]


def words_to_bytes(words: np.ndarray) -> np.ndarray:
    """(N, W) uint32 -> (N, 4W) uint8, big-endian."""
    n, width = words.shape
    out = np.empty((n, width, 4), dtype=np.uint8)
    out[:, :, 0] = (words >> np.uint32(24)).astype(np.uint8)
    out[:, :, 1] = (words >> np.uint32(16)).astype(np.uint8)
    out[:, :, 2] = (words >> np.uint32(8)).astype(np.uint8)
    out[:, :, 3] = words.astype(np.uint8)
    return out.reshape(n, 4 * width)


def tile_lanes(data: bytes, n: int) -> np.ndarray:
    """Broadcast a constant byte string into an (N, len) uint8 array."""
    row = np.frombuffer(data, dtype=np.uint8)
    return np.tile(row, (n, 1))


def _iv_lanes(n: int) -> np.ndarray:
    return np.tile(IV, (n, 1))


def hmac_precompute(key_bytes: np.ndarray, compress) -> tuple[np.ndarray, np.ndarray]:
    """Inner/outer chaining states after the ipad/opad key blocks.

    key_bytes: (N, L) uint8 with L <= 64. Reusable across messages under
    the same per-lane keys (saves two compressions per extra message).
    """
    n, key_len = key_bytes.shape
    if key_len > 64:
        raise ValueError("lane HMAC supports keys up to one block (64 bytes)")
    padded = np.zeros((n, 64), dtype=np.uint8)
    padded[:, :key_len] = key_bytes
    inner = _iv_lanes(n)
    compress(inner, np.ascontiguousarray(bytes_to_words(padded ^ np.uint8(0x36))))
    outer = _iv_lanes(n)
    compress(outer, np.ascontiguousarray(bytes_to_words(padded ^ np.uint8(0x5C))))
    return inner, outer


def hmac_finish(inner: np.ndarray, outer: np.ndarray, msg_bytes: np.ndarray, compress) -> np.ndarray:
    """Digest of per-lane messages under precomputed key states.

    msg_bytes: (N, M) uint8. Returns (N, 32) uint8. ``inner``/``outer``
    are not modified (copied before use), so one precompute serves many
    messages.
    """
    n, m = msg_bytes.shape
    # inner hash: total hashed length is the ipad block plus the message
    padded_len = ((m + 9 + 63) // 64) * 64
    buf = np.zeros((n, padded_len), dtype=np.uint8)
    buf[:, :m] = msg_bytes
    buf[:, m] = 0x80
    bit_len = (64 + m) * 8
    buf[:, -8:] = np.frombuffer(bit_len.to_bytes(8, "big"), dtype=np.uint8)
    state = inner.copy()
    for off in range(0, padded_len, 64):
        compress(state, np.ascontiguousarray(bytes_to_words(buf[:, off : off + 64])))
    # outer hash: opad block (precomputed) + 32-byte inner digest
    out_block = np.zeros((n, 64), dtype=np.uint8)
    out_block[:, :32] = words_to_bytes(state)
    out_block[:, 32] = 0x80
    out_block[:, -8:] = np.frombuffer(((64 + 32) * 8).to_bytes(8, "big"), dtype=np.uint8)
    final = outer.copy()
    compress(final, np.ascontiguousarray(bytes_to_words(out_block)))
    return words_to_bytes(final)


def hmac_digest(key_bytes: np.ndarray, msg_bytes: np.ndarray, compress) -> np.ndarray:
    """One-shot batch HMAC-SHA-256 for (N, L<=64) keys and (N, M) messages."""
    inner, outer = hmac_precompute(key_bytes, compress)
    return hmac_finish(inner, outer, msg_bytes, compress)
