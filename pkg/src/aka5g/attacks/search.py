"""Exhaustive key-recovery attacks over reduced effective keyspaces.

Both attacks run every candidate through the full honest derivation
pipeline (vectorised across lanes on the kernel backends) and scan their
entire candidate space: no early exit, so the executed query count is
exactly 2**effective_bits however the space is partitioned, and reports
are bytewise reproducible across single- and multi-partition runs.

Any candidate surviving the vectorised screen is confirmed through the
ordinary scalar implementation (hashlib-based), which both guards against
kernel defects and satisfies the rule that recovered material must
re-verify against the intercept via the public pipeline alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import (
    ALGO_ID_DEFAULT,
    FC_K_AMF,
    FC_K_AUSF,
    FC_K_GNB,
    FC_K_SEAF,
    FC_OPERATIONAL,
    FC_XRES_STAR,
    TAG_F2,
    TAG_F3,
    TAG_F4,
    TAG_KEYSTREAM,
)
from ..crypto import KdfLabel, SecretKeyK, keystream
from ..errors import MissingEvidenceError
from ..hierarchy import AlgoType, MigrationPhase, build_key_context
from ..kernels import get_compress
from ..kernels.lanes import hmac_finish, hmac_precompute, tile_lanes
from ..messages import AuthRequest, AuthResponse, ProtectedPdu
from ..trace import Trace
from ..vectors import Autn, derive_k_ausf, derive_k_seaf, derive_xres_star, xor_bytes
from .cost import grover_cost
from .report import AttackReport, EffectiveKeySpec

__all__ = [
    "HandshakeIntercept",
    "KeystreamIntercept",
    "extract_handshake_intercept",
    "extract_keystream_intercept",
    "handshake_key_recovery",
    "keystream_key_recovery",
]

DEFAULT_CHUNK = 1 << 14  # best cache/throughput trade-off measured on both backends

_MIN_KNOWN_PLAINTEXT = 8


@dataclass(frozen=True)
class HandshakeIntercept:
    """One AKA challenge-response pair read off the air link."""

    rand: bytes
    autn: Autn
    res_star: bytes
    sn_name: bytes


@dataclass(frozen=True)
class KeystreamIntercept:
    """A protected PDU plus the context needed to re-derive its keystream.

    ``rand`` may be None to represent an intercept where the challenge was
    missed; the attack refuses to run in that case.
    """

    rand: bytes | None
    autn: Autn
    sn_name: bytes
    supi: bytes
    stratum: str
    count: int
    bearer: int
    direction: int
    ciphertext: bytes
    known_plaintext: bytes


def extract_handshake_intercept(trace: Trace, sn_name: bytes, occurrence: int = 1) -> HandshakeIntercept:
    """Pull the nth challenge/response pair from a trace's air link."""
    from ..messages import unpack

    requests = trace.messages("AuthRequest", link="air")
    if len(requests) < occurrence:
        raise MissingEvidenceError("trace contains no matching AuthRequest")
    req_record = requests[occurrence - 1]
    req = unpack(req_record.payload)
    assert isinstance(req, AuthRequest)
    for record in trace.messages("AuthResponse", link="air"):
        if record.i > req_record.i:
            resp = unpack(record.payload)
            assert isinstance(resp, AuthResponse)
            return HandshakeIntercept(req.rand, req.autn, resp.res_star, sn_name)
    raise MissingEvidenceError("trace contains no AuthResponse after the challenge")


def extract_keystream_intercept(
    trace: Trace,
    sn_name: bytes,
    supi: bytes,
    known_plaintext: bytes,
    stratum: str = "UP",
    occurrence: int = 1,
    include_rand: bool = True,
) -> KeystreamIntercept:
    """Pull the nth protected PDU of a stratum plus its preceding challenge."""
    from ..messages import unpack

    pdus = [
        (record, unpack(record.payload))
        for record in trace.messages("ProtectedPdu", link="air")
    ]
    pdus = [(rec, m) for rec, m in pdus if m.stratum == stratum]
    if len(pdus) < occurrence:
        raise MissingEvidenceError(f"trace contains no {stratum} ProtectedPdu")
    pdu_record, pdu = pdus[occurrence - 1]
    assert isinstance(pdu, ProtectedPdu)
    ue_label = pdu_record.sender if pdu_record.sender.startswith("ue") else pdu_record.receiver
    challenge = None
    for record in trace.messages("AuthRequest", link="air"):
        if record.i < pdu_record.i and record.receiver == ue_label:
            challenge = unpack(record.payload)
    if challenge is None:
        raise MissingEvidenceError("no AuthRequest precedes the protected PDU")
    return KeystreamIntercept(
        rand=challenge.rand if include_rand else None,
        autn=challenge.autn,
        sn_name=sn_name,
        supi=supi,
        stratum=stratum,
        count=pdu.count,
        bearer=pdu.bearer,
        direction=pdu.direction,
        ciphertext=pdu.payload,
        known_plaintext=known_plaintext,
    )


# ---------------------------------------------------------------------------
# candidate enumeration

def _candidate_lanes(spec: EffectiveKeySpec, lo: int, hi: int) -> np.ndarray:
    """Candidate keys lo..hi-1 as an (N, key_len) uint8 array.

    Only the leading 32 bits of the key vary (effective_bits <= 32), so the
    template is tiled and the first word overwritten per lane.
    """
    n = hi - lo
    keys = tile_lanes(spec.fixed_suffix, n)
    idx = np.arange(lo, hi, dtype=np.uint64)
    word_shift = spec.shift - (8 * spec.key_len - 32)  # position within word 0
    word0 = (np.uint64(int.from_bytes(spec.fixed_suffix[:4], "big")) | (idx << np.uint64(word_shift))) & np.uint64(0xFFFFFFFF)
    keys[:, 0] = (word0 >> np.uint64(24)).astype(np.uint8)
    keys[:, 1] = (word0 >> np.uint64(16)).astype(np.uint8)
    keys[:, 2] = (word0 >> np.uint64(8)).astype(np.uint8)
    keys[:, 3] = word0.astype(np.uint8)
    return keys


def _partition_ranges(space: int, partitions: int) -> list[tuple[int, int]]:
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    partitions = min(partitions, space)
    bounds = [space * i // partitions for i in range(partitions + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(partitions)]


def _scan(spec, evaluate, partitions, chunk) -> tuple[list[int], int]:
    """Full scan of the candidate space; returns (matches, queries).

    Each partition is enumerated to completion so the query count -- and
    therefore the serialized report -- is independent of partitioning.
    """
    matches: list[int] = []
    queries = 0
    for lo, hi in _partition_ranges(spec.space, partitions):
        for start in range(lo, hi, chunk):
            stop = min(start + chunk, hi)
            mask = evaluate(_candidate_lanes(spec, start, stop))
            queries += stop - start
            for offset in np.flatnonzero(mask):
                matches.append(start + int(offset))
    return sorted(matches), queries


# ---------------------------------------------------------------------------
# handshake (challenge/response) key recovery

def _s_string(fc: int, params: tuple[bytes, ...]) -> bytes:
    return KdfLabel(fc, params).to_bytes()


def handshake_key_recovery(
    intercept: HandshakeIntercept,
    spec: EffectiveKeySpec,
    *,
    partitions: int = 1,
    chunk: int = DEFAULT_CHUNK,
    backend: str | None = None,
) -> AttackReport:
    """Recover K from a single intercepted (RAND, AUTN, RES*) triple.

    Per candidate: XRES/CK/IK, then RES* through the serving-network-name
    KDF, compared against the intercepted RES*. A survivor is confirmed by
    recomputing RES* and the AUTN MAC through the scalar pipeline.
    """
    if len(intercept.res_star) != 16:
        raise MissingEvidenceError("intercepted RES* must be 16 bytes")
    _, compress = get_compress(backend)
    rand, sn = intercept.rand, intercept.sn_name

    s_template = _s_string(FC_XRES_STAR, (sn, rand, bytes(16)))
    xres_offset = 1 + len(sn) + 2 + 16 + 2
    target = np.frombuffer(intercept.res_star, dtype=np.uint8)

    def evaluate(keys: np.ndarray) -> np.ndarray:
        n = keys.shape[0]
        inner, outer = hmac_precompute(keys, compress)
        xres = hmac_finish(inner, outer, tile_lanes(bytes([TAG_F2]) + rand, n), compress)[:, :16]
        ck = hmac_finish(inner, outer, tile_lanes(bytes([TAG_F3]) + rand, n), compress)[:, :16]
        ik = hmac_finish(inner, outer, tile_lanes(bytes([TAG_F4]) + rand, n), compress)[:, :16]
        i2, o2 = hmac_precompute(np.concatenate([ck, ik], axis=1), compress)
        s = tile_lanes(s_template, n)
        s[:, xres_offset : xres_offset + 16] = xres
        res_star = hmac_finish(i2, o2, s, compress)[:, :16]
        return np.all(res_star == target, axis=1)

    matches, queries = _scan(spec, evaluate, partitions, chunk)
    recovered = _confirm_handshake(matches, spec, intercept)
    return AttackReport(
        attack="handshake-recovery",
        success=recovered is not None,
        queries=queries,
        grover_cost=grover_cost(spec.effective_bits),
        recovered=recovered,
        notes=(
            "key confirmed against RES* and AUTN MAC"
            if recovered is not None
            else "no candidate consistent with the intercept"
        ),
        details={"effective_bits": spec.effective_bits, "candidates": len(matches)},
    )


def _confirm_handshake(
    matches: list[int], spec: EffectiveKeySpec, intercept: HandshakeIntercept
) -> bytes | None:
    from ..crypto import SUITE_REF256

    for index in matches:
        key = SecretKeyK(spec.candidate(index))
        xres, ck, ik, ak = SUITE_REF256.f2345(key, intercept.rand)
        res_star = derive_xres_star(ck, ik, intercept.rand, xres, intercept.sn_name)
        if res_star != intercept.res_star:
            continue
        sqn = int.from_bytes(xor_bytes(intercept.autn.sqn_xor_ak, ak), "big")
        mac = SUITE_REF256.f1(key, intercept.rand, sqn, intercept.autn.amf)
        if mac == intercept.autn.mac:
            return key.bytes_
    return None


# ---------------------------------------------------------------------------
# keystream (known plaintext) key recovery

def keystream_key_recovery(
    intercept: KeystreamIntercept,
    spec: EffectiveKeySpec,
    phase: MigrationPhase,
    *,
    partitions: int = 1,
    chunk: int = DEFAULT_CHUNK,
    backend: str | None = None,
    algo_id: int = ALGO_ID_DEFAULT,
) -> AttackReport:
    """Recover K from ciphertext with known plaintext, counters and RAND.

    Each candidate runs the entire chain CK/IK -> K_AUSF -> K_SEAF ->
    K_AMF (-> K_gNB) -> cipher key -> keystream, compared against
    ciphertext XOR known-plaintext. Refuses to run without the RAND or
    with fewer than 8 known bytes, mirroring what the evidence actually
    has to contain.
    """
    if intercept.rand is None:
        raise MissingEvidenceError(
            "RAND was not intercepted; the derivation chain cannot be evaluated"
        )
    kp = intercept.known_plaintext
    if len(kp) < _MIN_KNOWN_PLAINTEXT:
        raise MissingEvidenceError(
            f"need at least {_MIN_KNOWN_PLAINTEXT} bytes of known plaintext, got {len(kp)}"
        )
    if len(kp) > len(intercept.ciphertext):
        raise MissingEvidenceError("known plaintext longer than the ciphertext")

    _, compress = get_compress(backend)
    rand, sn, supi = intercept.rand, intercept.sn_name, intercept.supi
    target_ks = xor_bytes(intercept.ciphertext[: len(kp)], kp)
    n_blocks = (len(kp) + 31) // 32
    key_len = phase.operational_key_len
    atype = {"NAS": AlgoType.NAS_ENC, "RRC": AlgoType.RRC_ENC, "UP": AlgoType.UP_ENC}[
        intercept.stratum
    ]

    s_kausf = _s_string(FC_K_AUSF, (sn, intercept.autn.sqn_xor_ak))
    s_kseaf = _s_string(FC_K_SEAF, (sn,))
    s_kamf = _s_string(FC_K_AMF, (supi,))
    s_kgnb = _s_string(FC_K_GNB, ((0).to_bytes(4, "big"),))
    s_op = _s_string(FC_OPERATIONAL, (bytes([atype.value]), bytes([algo_id])))
    cbd = intercept.count.to_bytes(4, "big") + bytes([(intercept.bearer << 1) | intercept.direction])
    ks_msgs = [bytes([TAG_KEYSTREAM]) + cbd + i.to_bytes(4, "big") for i in range(n_blocks)]
    target = np.frombuffer(target_ks, dtype=np.uint8)

    def evaluate(keys: np.ndarray) -> np.ndarray:
        n = keys.shape[0]
        inner, outer = hmac_precompute(keys, compress)
        ck = hmac_finish(inner, outer, tile_lanes(bytes([TAG_F3]) + rand, n), compress)[:, :16]
        ik = hmac_finish(inner, outer, tile_lanes(bytes([TAG_F4]) + rand, n), compress)[:, :16]

        def kdf_lanes(key_lanes, s):
            i, o = hmac_precompute(key_lanes, compress)
            return hmac_finish(i, o, tile_lanes(s, n), compress)

        k_ausf = kdf_lanes(np.concatenate([ck, ik], axis=1), s_kausf)
        k_seaf = kdf_lanes(k_ausf, s_kseaf)
        k_amf = kdf_lanes(k_seaf, s_kamf)
        parent = k_amf if atype.parent == "k_amf" else kdf_lanes(k_amf, s_kgnb)
        enc_key = kdf_lanes(parent, s_op)[:, :key_len]
        i_ks, o_ks = hmac_precompute(enc_key, compress)
        stream = np.concatenate(
            [hmac_finish(i_ks, o_ks, tile_lanes(m, n), compress) for m in ks_msgs], axis=1
        )[:, : len(kp)]
        return np.all(stream == target, axis=1)

    matches, queries = _scan(spec, evaluate, partitions, chunk)
    recovered = _confirm_keystream(matches, spec, intercept, phase, algo_id)
    return AttackReport(
        attack="keystream-recovery",
        success=recovered is not None,
        queries=queries,
        grover_cost=grover_cost(spec.effective_bits),
        recovered=recovered,
        notes=(
            "key reproduces the observed keystream through the full hierarchy"
            if recovered is not None
            else "no candidate consistent with the intercept"
        ),
        details={
            "effective_bits": spec.effective_bits,
            "candidates": len(matches),
            "known_bytes": len(kp),
            "stratum": intercept.stratum,
        },
    )


def _confirm_keystream(
    matches: list[int],
    spec: EffectiveKeySpec,
    intercept: KeystreamIntercept,
    phase: MigrationPhase,
    algo_id: int,
) -> bytes | None:
    from ..crypto import SUITE_REF256

    kp = intercept.known_plaintext
    target_ks = xor_bytes(intercept.ciphertext[: len(kp)], kp)
    for index in matches:
        key = SecretKeyK(spec.candidate(index))
        _, ck, ik, _ = SUITE_REF256.f2345(key, intercept.rand)
        k_ausf = derive_k_ausf(ck, ik, intercept.autn.sqn_xor_ak, intercept.sn_name)
        k_seaf = derive_k_seaf(k_ausf, intercept.sn_name)
        ctx = build_key_context(k_seaf, intercept.supi, phase, algo_id)
        enc_key = {"NAS": ctx.nas_enc, "RRC": ctx.rrc_enc, "UP": ctx.up_enc}[intercept.stratum]
        ks = keystream(enc_key, intercept.count, intercept.bearer, intercept.direction, len(kp))
        if ks == target_ks:
            return key.bytes_
    return None
