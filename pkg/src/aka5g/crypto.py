"""Core cryptographic primitives: generic KDF, the f1-f5/f1*/f5* reference
suite, the session keystream generator and the 32-bit session MAC.

The f-functions here are NOT MILENAGE (TS 35.205) or Tuak (TS 35.231).
Operators choose their own f1-f5; this package substitutes a single
HMAC-SHA-256 family with one-byte domain tags that keeps the standard
interface (input/output widths, SQN/AMF handling) and accepts 128- or
256-bit subscriber keys through the same call signature.

Everything in this module is a pure function of its inputs.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from enum import Enum

from .constants import (
    AK_LEN,
    KEY128_LEN,
    KEY256_LEN,
    MAC_A_LEN,
    RAND_LEN,
    SQN_MAX,
    TAG_F1,
    TAG_F1_STAR,
    TAG_F2,
    TAG_F3,
    TAG_F4,
    TAG_F5,
    TAG_F5_STAR,
    TAG_KEYSTREAM,
    TAG_MAC32,
)
from .errors import SuiteKeyError

__all__ = [
    "SecretKeyK",
    "AlgorithmSuiteId",
    "AlgorithmSuite",
    "KdfLabel",
    "kdf",
    "keystream",
    "mac32",
    "suite_by_name",
    "SUITE_REF128",
    "SUITE_REF256",
]


@dataclass(frozen=True)
class SecretKeyK:
    """Long-term subscriber key shared by USIM and ARPF (128 or 256 bits)."""

    bytes_: bytes

    def __post_init__(self):
        if len(self.bytes_) not in (KEY128_LEN, KEY256_LEN):
            raise ValueError(f"K must be 16 or 32 bytes, got {len(self.bytes_)}")

    @property
    def bit_length(self) -> int:
        return 8 * len(self.bytes_)


class AlgorithmSuiteId(Enum):
    REFERENCE_128 = "ref128"
    REFERENCE_256 = "ref256"


@dataclass(frozen=True)
class KdfLabel:
    """Input label for the generic KDF: an FC byte plus ordered parameters.

    Serialized as fc || P0 || len(P0) || P1 || len(P1) || ... with two-byte
    big-endian lengths, the TS 33.220 B.2.0 construction.
    """

    fc: int
    params: tuple[bytes, ...] = ()

    def to_bytes(self) -> bytes:
        if not 0 <= self.fc <= 0xFF:
            raise ValueError(f"fc must be a single byte, got {self.fc:#x}")
        out = bytes([self.fc])
        for i, p in enumerate(self.params):
            if len(p) > 0xFFFF:
                raise ValueError(f"KDF parameter {i} exceeds 65535 bytes")
            out += p + len(p).to_bytes(2, "big")
        return out


def kdf(key: bytes, label: KdfLabel) -> bytes:
    """Generic key derivation: HMAC-SHA-256(key, serialized label), 32 bytes."""
    if not key:
        raise ValueError("KDF key must be non-empty")
    return hmac.digest(key, label.to_bytes(), hashlib.sha256)


def _sqn_bytes(sqn: int) -> bytes:
    if not 0 <= sqn <= SQN_MAX:
        raise ValueError(f"SQN out of 48-bit range: {sqn}")
    return sqn.to_bytes(6, "big")


def _check_rand(rand: bytes) -> None:
    if len(rand) != RAND_LEN:
        raise ValueError(f"RAND must be {RAND_LEN} bytes, got {len(rand)}")


def _check_amf(amf: bytes) -> None:
    if len(amf) != 2:
        raise ValueError(f"AMF must be 2 bytes, got {len(amf)}")


class AlgorithmSuite:
    """Reference authentication algorithm set for one operator profile.

    The two shipped profiles share the HMAC construction, differing only in
    which key lengths they admit, so a 128-bit K yields identical outputs
    under either profile (a mixed 128/256-bit fleet interoperates).
    """

    def __init__(self, suite_id: AlgorithmSuiteId, key_bits: tuple[int, ...]):
        self.suite_id = suite_id
        self._key_bits = key_bits

    def __repr__(self):
        return f"AlgorithmSuite({self.suite_id.value})"

    def _check_key(self, k: SecretKeyK) -> None:
        if k.bit_length not in self._key_bits:
            raise SuiteKeyError(
                f"suite {self.suite_id.value} does not accept {k.bit_length}-bit K"
            )

    def _prf(self, k: SecretKeyK, tag: int, body: bytes) -> bytes:
        return hmac.digest(k.bytes_, bytes([tag]) + body, hashlib.sha256)

    def f1(self, k: SecretKeyK, rand: bytes, sqn: int, amf: bytes) -> bytes:
        """MAC-A: the 64-bit network authentication code inside AUTN."""
        self._check_key(k)
        _check_rand(rand)
        _check_amf(amf)
        return self._prf(k, TAG_F1, rand + _sqn_bytes(sqn) + amf)[:MAC_A_LEN]

    def f1_star(self, k: SecretKeyK, rand: bytes, sqn: int, amf: bytes) -> bytes:
        """MAC-S: the 64-bit resynchronisation code inside AUTS."""
        self._check_key(k)
        _check_rand(rand)
        _check_amf(amf)
        return self._prf(k, TAG_F1_STAR, rand + _sqn_bytes(sqn) + amf)[:MAC_A_LEN]

    def f2345(self, k: SecretKeyK, rand: bytes) -> tuple[bytes, bytes, bytes, bytes]:
        """(XRES, CK, IK, AK): response, cipher key, integrity key, anonymity key."""
        self._check_key(k)
        _check_rand(rand)
        xres = self._prf(k, TAG_F2, rand)[:16]
        ck = self._prf(k, TAG_F3, rand)[:16]
        ik = self._prf(k, TAG_F4, rand)[:16]
        ak = self._prf(k, TAG_F5, rand)[:AK_LEN]
        return xres, ck, ik, ak

    def f5_star(self, k: SecretKeyK, rand: bytes) -> bytes:
        """AK*: the 48-bit key concealing SQN_MS inside AUTS."""
        self._check_key(k)
        _check_rand(rand)
        return self._prf(k, TAG_F5_STAR, rand)[:AK_LEN]


SUITE_REF128 = AlgorithmSuite(AlgorithmSuiteId.REFERENCE_128, (128,))
SUITE_REF256 = AlgorithmSuite(AlgorithmSuiteId.REFERENCE_256, (128, 256))

_SUITES = {s.suite_id.value: s for s in (SUITE_REF128, SUITE_REF256)}


def suite_by_name(name: str) -> AlgorithmSuite:
    try:
        return _SUITES[name]
    except KeyError:
        raise ValueError(f"unknown algorithm suite {name!r}; valid: {sorted(_SUITES)}")


def _count_bearer_direction(count: int, bearer: int, direction: int) -> bytes:
    if not 0 <= count < 1 << 32:
        raise ValueError(f"COUNT out of 32-bit range: {count}")
    if not 0 <= bearer <= 31:
        raise ValueError(f"bearer out of 5-bit range: {bearer}")
    if direction not in (0, 1):
        raise ValueError(f"direction must be 0 or 1, got {direction}")
    return count.to_bytes(4, "big") + bytes([(bearer << 1) | direction])


def keystream(key: bytes, count: int, bearer: int, direction: int, length: int) -> bytes:
    """Counter-mode keystream: 32-byte blocks of
    HMAC-SHA-256(key, 0x10 || COUNT || bearer/direction || block index),
    truncated to ``length``. A shorter request is always a prefix of a
    longer one with the same parameters.
    """
    if length < 0:
        raise ValueError("keystream length must be >= 0")
    prefix = bytes([TAG_KEYSTREAM]) + _count_bearer_direction(count, bearer, direction)
    blocks = []
    for i in range((length + 31) // 32):
        blocks.append(hmac.digest(key, prefix + i.to_bytes(4, "big"), hashlib.sha256))
    return b"".join(blocks)[:length]


def mac32(key: bytes, count: int, bearer: int, direction: int, message: bytes) -> bytes:
    """32-bit session integrity MAC over ``message``."""
    body = bytes([TAG_MAC32]) + _count_bearer_direction(count, bearer, direction) + message
    return hmac.digest(key, body, hashlib.sha256)[:4]
