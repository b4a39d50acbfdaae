"""Authentication vector construction and the USIM-side challenge handling.

Covers the shared 3G/4G 5-tuple AV, the home-environment 5G AV, the serving
5G AV, and the mirror computations a UE performs: challenge verification,
RES*/K_AUSF/K_SEAF derivation, and AUTS generation on sequence-number
failure. Network side and UE side deliberately share the derivation helpers;
the AKA correctness property is exactly that both ends compute equal values.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .constants import (
    AMF_DEFAULT,
    AUTS_LEN,
    FC_K_AUSF,
    FC_K_SEAF,
    FC_XRES_STAR,
    RAND_LEN,
    SQN_MAX,
    SQN_MAX_JUMP,
)
from .crypto import AlgorithmSuite, KdfLabel, SecretKeyK, kdf
from .errors import IntegrityError

__all__ = [
    "Autn",
    "BaseAV",
    "HeAV",
    "ServingAV",
    "SubscriberRecord",
    "UsimSuccess",
    "MacFailure",
    "SyncFailure",
    "UsimState",
    "generate_base_av",
    "generate_he_av",
    "derive_xres_star",
    "derive_k_ausf",
    "derive_k_seaf",
    "reduce_to_serving_av",
    "hxres_star_from",
    "usim_process_challenge",
    "me_compute_response",
    "resync_from_auts",
    "xor_bytes",
]


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError(f"xor length mismatch: {len(a)} vs {len(b)}")
    return bytes(x ^ y for x, y in zip(a, b))


@dataclass(frozen=True)
class Autn:
    """Authentication token: concealed SQN, AMF field and MAC-A (16 bytes)."""

    sqn_xor_ak: bytes
    amf: bytes
    mac: bytes

    def __post_init__(self):
        if (len(self.sqn_xor_ak), len(self.amf), len(self.mac)) != (6, 2, 8):
            raise ValueError("AUTN fields must be 6/2/8 bytes")

    def to_bytes(self) -> bytes:
        return self.sqn_xor_ak + self.amf + self.mac

    @classmethod
    def from_bytes(cls, data: bytes) -> "Autn":
        if len(data) != 16:
            raise ValueError(f"AUTN must be 16 bytes, got {len(data)}")
        return cls(data[:6], data[6:8], data[8:16])


@dataclass(frozen=True)
class BaseAV:
    """3G/4G-style 5-value vector (RAND, XRES, CK, IK, AUTN)."""

    rand: bytes
    xres: bytes
    ck: bytes
    ik: bytes
    autn: Autn


@dataclass(frozen=True)
class HeAV:
    """Home-environment 5G AV: (RAND, AUTN, XRES*, K_AUSF)."""

    rand: bytes
    autn: Autn
    xres_star: bytes
    k_ausf: bytes

    def __post_init__(self):
        if len(self.xres_star) != 16 or len(self.k_ausf) != 32:
            raise ValueError("HE AV requires 128-bit XRES* and 256-bit K_AUSF")


@dataclass(frozen=True)
class ServingAV:
    """Serving-network 5G AV: (RAND, AUTN, HXRES*, K_SEAF)."""

    rand: bytes
    autn: Autn
    hxres_star: bytes
    k_seaf: bytes

    def __post_init__(self):
        if len(self.hxres_star) != 16 or len(self.k_seaf) != 32:
            raise ValueError("serving AV requires 128-bit HXRES* and 256-bit K_SEAF")


@dataclass
class SubscriberRecord:
    """ARPF-side long-term state for one subscription.

    ``sqn`` holds the sequence number of the most recently issued AV; each AV
    generation advances it by ``sqn_step``. Single-writer: callers serialize
    access per subscriber.
    """

    supi: str
    key: SecretKeyK
    suite: AlgorithmSuite
    sqn: int = 0
    amf: bytes = AMF_DEFAULT
    sqn_step: int = 1


def generate_base_av(subscriber: SubscriberRecord, rand: bytes) -> BaseAV:
    """Build the 3G/4G 5-tuple for the subscriber's next sequence number.

    Deterministic given ``rand``; the caller supplies the randomness. The
    subscriber's SQN counter advances by its configured step.
    """
    sqn = subscriber.sqn + subscriber.sqn_step
    if sqn > SQN_MAX:
        raise ValueError("subscriber SQN space exhausted")
    xres, ck, ik, ak = subscriber.suite.f2345(subscriber.key, rand)
    mac = subscriber.suite.f1(subscriber.key, rand, sqn, subscriber.amf)
    subscriber.sqn = sqn
    autn = Autn(xor_bytes(sqn.to_bytes(6, "big"), ak), subscriber.amf, mac)
    return BaseAV(rand, xres, ck, ik, autn)


def derive_xres_star(ck: bytes, ik: bytes, rand: bytes, xres: bytes, sn_name: bytes) -> bytes:
    """128-bit XRES* from (CK, IK, RAND, XRES, serving network name)."""
    return kdf(ck + ik, KdfLabel(FC_XRES_STAR, (sn_name, rand, xres)))[:16]


def derive_k_ausf(ck: bytes, ik: bytes, sqn_xor_ak: bytes, sn_name: bytes) -> bytes:
    """256-bit K_AUSF from CK||IK, the concealed SQN and the network name."""
    return kdf(ck + ik, KdfLabel(FC_K_AUSF, (sn_name, sqn_xor_ak)))


def derive_k_seaf(k_ausf: bytes, sn_name: bytes) -> bytes:
    """256-bit anchor key K_SEAF, binding K_AUSF to the serving network."""
    return kdf(k_ausf, KdfLabel(FC_K_SEAF, (sn_name,)))


def generate_he_av(subscriber: SubscriberRecord, rand: bytes, sn_name: bytes) -> HeAV:
    """3G/4G AV plus the two extra derivations that make a home 5G AV."""
    base = generate_base_av(subscriber, rand)
    xres_star = derive_xres_star(base.ck, base.ik, base.rand, base.xres, sn_name)
    k_ausf = derive_k_ausf(base.ck, base.ik, base.autn.sqn_xor_ak, sn_name)
    return HeAV(base.rand, base.autn, xres_star, k_ausf)


def hxres_star_from(rand: bytes, res_star: bytes) -> bytes:
    """Leading 16 bytes of SHA-256(RAND || RES*); the SEAF-side check value."""
    return hashlib.sha256(rand + res_star).digest()[:16]


def reduce_to_serving_av(he_av: HeAV, sn_name: bytes) -> ServingAV:
    """Derive the serving AV: hash XRES* down to HXRES*, KDF K_AUSF to K_SEAF."""
    return ServingAV(
        rand=he_av.rand,
        autn=he_av.autn,
        hxres_star=hxres_star_from(he_av.rand, he_av.xres_star),
        k_seaf=derive_k_seaf(he_av.k_ausf, sn_name),
    )


# ---------------------------------------------------------------------------
# UE side

@dataclass(frozen=True)
class UsimSuccess:
    res: bytes
    ck: bytes
    ik: bytes


@dataclass(frozen=True)
class MacFailure:
    pass


@dataclass(frozen=True)
class SyncFailure:
    auts: bytes

    def __post_init__(self):
        if len(self.auts) != AUTS_LEN:
            raise ValueError(f"AUTS must be {AUTS_LEN} bytes")


@dataclass
class UsimState:
    """USIM-resident secrets and the SQN acceptance window.

    ``sqn_ms`` is the highest accepted sequence number; a challenge is fresh
    iff its SQN exceeds it by at least 1 and at most ``sqn_max_jump``.
    """

    key: SecretKeyK
    suite: AlgorithmSuite
    sqn_ms: int = 0
    sqn_max_jump: int = SQN_MAX_JUMP
    home_public_key: bytes = b""


def usim_process_challenge(
    usim: UsimState, rand: bytes, autn: Autn
) -> UsimSuccess | MacFailure | SyncFailure:
    """Verify an authentication challenge the way the USIM does.

    MAC verification comes first (MacFailure on mismatch), then SQN
    freshness (SyncFailure carrying AUTS). Both failure kinds are in-band
    results, mirroring the two distinguishable protocol error messages.
    Only a Success advances the SQN window.
    """
    if len(rand) != RAND_LEN:
        raise ValueError(f"RAND must be {RAND_LEN} bytes")
    xres, ck, ik, ak = usim.suite.f2345(usim.key, rand)
    sqn = int.from_bytes(xor_bytes(autn.sqn_xor_ak, ak), "big")
    expected_mac = usim.suite.f1(usim.key, rand, sqn, autn.amf)
    if expected_mac != autn.mac:
        return MacFailure()
    if not usim.sqn_ms < sqn <= usim.sqn_ms + usim.sqn_max_jump:
        ak_star = usim.suite.f5_star(usim.key, rand)
        mac_s = usim.suite.f1_star(usim.key, rand, usim.sqn_ms, autn.amf)
        conced = xor_bytes(usim.sqn_ms.to_bytes(6, "big"), ak_star)
        return SyncFailure(conced + mac_s)
    usim.sqn_ms = sqn
    return UsimSuccess(res=xres, ck=ck, ik=ik)


def me_compute_response(
    ck: bytes, ik: bytes, res: bytes, rand: bytes, autn: Autn, sn_name: bytes
) -> tuple[bytes, bytes, bytes]:
    """ME-side mirror derivation: (RES*, K_AUSF, K_SEAF) from a USIM success."""
    res_star = derive_xres_star(ck, ik, rand, res, sn_name)
    k_ausf = derive_k_ausf(ck, ik, autn.sqn_xor_ak, sn_name)
    return res_star, k_ausf, derive_k_seaf(k_ausf, sn_name)


def resync_from_auts(
    key: SecretKeyK, suite: AlgorithmSuite, rand: bytes, amf: bytes, auts: bytes
) -> int:
    """Network-side AUTS processing: recover SQN_MS and verify MAC-S.

    Raises IntegrityError when MAC-S does not verify (AUTS not produced by
    the claimed subscriber for this RAND/AMF).
    """
    if len(auts) != AUTS_LEN:
        raise ValueError(f"AUTS must be {AUTS_LEN} bytes")
    ak_star = suite.f5_star(key, rand)
    sqn_ms = int.from_bytes(xor_bytes(auts[:6], ak_star), "big")
    if suite.f1_star(key, rand, sqn_ms, amf) != auts[6:]:
        raise IntegrityError("AUTS MAC-S verification failed")
    return sqn_ms
