"""Lane-vectorised SHA-256 compression: pure numpy fallback backend.

State and message words are uint32 arrays with one row per lane; all
arithmetic relies on numpy's wrapping unsigned semantics. The round loop
works on a (64, N) schedule so each round touches contiguous rows.
"""

from __future__ import annotations

import numpy as np

K = np.array(
    [
        0x428A2F98, 0x71374491, 0xB5C0FBCF, 0xE9B5DBA5, 0x3956C25B, 0x59F111F1,
        0x923F82A4, 0xAB1C5ED5, 0xD807AA98, 0x12835B01, 0x243185BE, 0x550C7DC3,
        0x72BE5D74, 0x80DEB1FE, 0x9BDC06A7, 0xC19BF174, 0xE49B69C1, 0xEFBE4786,
        0x0FC19DC6, 0x240CA1CC, 0x2DE92C6F, 0x4A7484AA, 0x5CB0A9DC, 0x76F988DA,
        0x983E5152, 0xA831C66D, 0xB00327C8, 0xBF597FC7, 0xC6E00BF3, 0xD5A79147,
        0x06CA6351, 0x14292967, 0x27B70A85, 0x2E1B2138, 0x4D2C6DFC, 0x53380D13,
        0x650A7354, 0x766A0ABB, 0x81C2C92E, 0x92722C85, 0xA2BFE8A1, 0xA81A664B,
        0xC24B8B70, 0xC76C51A3, 0xD192E819, 0xD6990624, 0xF40E3585, 0x106AA070,
        0x19A4C116, 0x1E376C08, 0x2748774C, 0x34B0BCB5, 0x391C0CB3, 0x4ED8AA4A,
        0x5B9CCA4F, 0x682E6FF3, 0x748F82EE, 0x78A5636F, 0x84C87814, 0x8CC70208,
        0x90BEFFFA, 0xA4506CEB, 0xBEF9A3F7, 0xC67178F2,
    ],
    dtype=np.uint32,
)

IV = np.array(
    [0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A,
     0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19],
    dtype=np.uint32,
)


def _ror(x: np.ndarray, r: int) -> np.ndarray:
    return (x >> np.uint32(r)) | (x << np.uint32(32 - r))


def compress_batch(states: np.ndarray, blocks: np.ndarray) -> None:
    """Apply one compression per lane, updating ``states`` in place.

    states: (N, 8) uint32; blocks: (N, 16) uint32.
    """
    n = states.shape[0]
    w = np.empty((64, n), dtype=np.uint32)
    w[:16] = blocks.T
    for t in range(16, 64):
        x, y = w[t - 15], w[t - 2]
        s0 = _ror(x, 7) ^ _ror(x, 18) ^ (x >> np.uint32(3))
        s1 = _ror(y, 17) ^ _ror(y, 19) ^ (y >> np.uint32(10))
        w[t] = w[t - 16] + s0 + w[t - 7] + s1

    a, b, c, d = states[:, 0].copy(), states[:, 1].copy(), states[:, 2].copy(), states[:, 3].copy()
    e, f, g, h = states[:, 4].copy(), states[:, 5].copy(), states[:, 6].copy(), states[:, 7].copy()
    for t in range(64):
        s1 = _ror(e, 6) ^ _ror(e, 11) ^ _ror(e, 25)
        ch = (e & f) ^ (~e & g)
        t1 = h + s1 + ch + K[t] + w[t]
        s0 = _ror(a, 2) ^ _ror(a, 13) ^ _ror(a, 22)
        maj = (a & b) ^ (a & c) ^ (b & c)
        t2 = s0 + maj
        h = g
        g = f
        f = e
        e = d + t1
        d = c
        c = b
        b = a
        a = t1 + t2
    states[:, 0] += a
    states[:, 1] += b
    states[:, 2] += c
    states[:, 3] += d
    states[:, 4] += e
    states[:, 5] += f
    states[:, 6] += g
    states[:, 7] += h
