"""Numba-compiled SHA-256 compression: scalar per-lane loops.

Importing this module requires numba; the package-level selector only
imports it when the numba backend is active. Explicit np.uint32 casts pin
every intermediate to 32-bit wrapping arithmetic regardless of integer
promotion, and the per-lane loop allocates nothing inside the rounds.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .sha256_numpy import K  # same round constants; single source

_K = K.copy()


@njit(cache=True)
def _compress_lane(state: np.ndarray, block: np.ndarray, w: np.ndarray) -> None:
    for t in range(16):
        w[t] = block[t]
    for t in range(16, 64):
        x = w[t - 15]
        y = w[t - 2]
        s0 = np.uint32(((x >> np.uint32(7)) | (x << np.uint32(25)))
                       ^ ((x >> np.uint32(18)) | (x << np.uint32(14)))
                       ^ (x >> np.uint32(3)))
        s1 = np.uint32(((y >> np.uint32(17)) | (y << np.uint32(15)))
                       ^ ((y >> np.uint32(19)) | (y << np.uint32(13)))
                       ^ (y >> np.uint32(10)))
        w[t] = np.uint32(w[t - 16] + s0 + w[t - 7] + s1)

    a = state[0]
    b = state[1]
    c = state[2]
    d = state[3]
    e = state[4]
    f = state[5]
    g = state[6]
    h = state[7]
    for t in range(64):
        s1 = np.uint32(((e >> np.uint32(6)) | (e << np.uint32(26)))
                       ^ ((e >> np.uint32(11)) | (e << np.uint32(21)))
                       ^ ((e >> np.uint32(25)) | (e << np.uint32(7))))
        ch = np.uint32((e & f) ^ (~e & g))
        t1 = np.uint32(h + s1 + ch + _K[t] + w[t])
        s0 = np.uint32(((a >> np.uint32(2)) | (a << np.uint32(30)))
                       ^ ((a >> np.uint32(13)) | (a << np.uint32(19)))
                       ^ ((a >> np.uint32(22)) | (a << np.uint32(10))))
        maj = np.uint32((a & b) ^ (a & c) ^ (b & c))
        t2 = np.uint32(s0 + maj)
        h = g
        g = f
        f = e
        e = np.uint32(d + t1)
        d = c
        c = b
        b = a
        a = np.uint32(t1 + t2)
    state[0] = np.uint32(state[0] + a)
    state[1] = np.uint32(state[1] + b)
    state[2] = np.uint32(state[2] + c)
    state[3] = np.uint32(state[3] + d)
    state[4] = np.uint32(state[4] + e)
    state[5] = np.uint32(state[5] + f)
    state[6] = np.uint32(state[6] + g)
    state[7] = np.uint32(state[7] + h)


@njit(cache=True)
def compress_batch(states: np.ndarray, blocks: np.ndarray) -> None:
    """Apply one compression per lane, updating ``states`` in place."""
    w = np.empty(64, dtype=np.uint32)
    for i in range(states.shape[0]):
        _compress_lane(states[i], blocks[i], w)
