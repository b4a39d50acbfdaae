"""Key hierarchy below the anchor key K_SEAF.

Every intermediate key is 256 bits. Operational keys are derived as 256-bit
strings and truncated to 128 bits in the legacy and phase-1 deployments;
the phase-2 deployment keeps all 256 bits (untruncated), which is the whole
of the second migration step at this layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .constants import (
    ALGO_ID_DEFAULT,
    ALGO_TYPE_NAS_ENC,
    ALGO_TYPE_NAS_INT,
    ALGO_TYPE_RRC_ENC,
    ALGO_TYPE_RRC_INT,
    ALGO_TYPE_UP_ENC,
    ALGO_TYPE_UP_INT,
    FC_K_AMF,
    FC_K_GNB,
    FC_OPERATIONAL,
)
from .crypto import KdfLabel, kdf
from .errors import SuiteKeyError

__all__ = [
    "MigrationPhase",
    "AlgoType",
    "KeyContext",
    "derive_k_amf",
    "derive_k_gnb",
    "derive_operational_pair",
    "build_key_context",
]


class MigrationPhase(Enum):
    """Deployment stage controlling permitted K sizes and key truncation.

    legacy: 128-bit K only, operational keys truncated to 128 bits.
    phase1: 128- or 256-bit K (USIM/ARPF upgrade only); everything outside
            the USIM and ARPF is byte-identical to legacy.
    phase2: 256-bit K, operational keys kept at 256 bits.
    """

    LEGACY = "legacy"
    PHASE1 = "phase1"
    PHASE2 = "phase2"

    @property
    def operational_key_len(self) -> int:
        return 32 if self is MigrationPhase.PHASE2 else 16

    def allows_k_bits(self, bits: int) -> bool:
        if self is MigrationPhase.LEGACY:
            return bits == 128
        if self is MigrationPhase.PHASE1:
            return bits in (128, 256)
        return bits == 256


class AlgoType(Enum):
    NAS_INT = ALGO_TYPE_NAS_INT
    NAS_ENC = ALGO_TYPE_NAS_ENC
    RRC_INT = ALGO_TYPE_RRC_INT
    RRC_ENC = ALGO_TYPE_RRC_ENC
    UP_INT = ALGO_TYPE_UP_INT
    UP_ENC = ALGO_TYPE_UP_ENC

    @property
    def parent(self) -> str:
        # NAS keys hang off K_AMF; RRC and UP keys hang off K_gNB
        return "k_amf" if self in (AlgoType.NAS_INT, AlgoType.NAS_ENC) else "k_gnb"


@dataclass(frozen=True)
class KeyContext:
    """Derived keys for one authenticated session.

    ``k_seaf`` is populated at build time and dropped (set to None) by the
    protocol entities as soon as K_AMF exists; see ``without_anchor``.
    Operational key length follows the phase.
    """

    phase: MigrationPhase
    k_seaf: bytes | None
    k_amf: bytes
    k_gnb: bytes
    nas_int: bytes
    nas_enc: bytes
    rrc_int: bytes
    rrc_enc: bytes
    up_int: bytes
    up_enc: bytes

    def without_anchor(self) -> "KeyContext":
        """Copy with K_SEAF erased (the post-K_AMF deletion rule)."""
        from dataclasses import replace

        return replace(self, k_seaf=None)

    def operational_keys(self) -> dict[str, bytes]:
        return {
            "nas_int": self.nas_int,
            "nas_enc": self.nas_enc,
            "rrc_int": self.rrc_int,
            "rrc_enc": self.rrc_enc,
            "up_int": self.up_int,
            "up_enc": self.up_enc,
        }


def derive_k_amf(k_seaf: bytes, supi: bytes) -> bytes:
    """256-bit K_AMF from the anchor key; callers delete K_SEAF afterwards."""
    return kdf(k_seaf, KdfLabel(FC_K_AMF, (supi,)))


def derive_k_gnb(k_amf: bytes, nas_uplink_count: int) -> bytes:
    """256-bit K_gNB bound to the NAS uplink count at activation."""
    if not 0 <= nas_uplink_count < 1 << 32:
        raise ValueError(f"NAS uplink count out of 32-bit range: {nas_uplink_count}")
    return kdf(k_amf, KdfLabel(FC_K_GNB, (nas_uplink_count.to_bytes(4, "big"),)))


def derive_operational_pair(
    parent_key: bytes,
    algo_type: AlgoType,
    algo_id: int,
    phase: MigrationPhase,
    *,
    parent_name: str | None = None,
) -> bytes:
    """One operational key, derived as 256 bits and truncated per phase.

    ``parent_name`` (when given) is checked against the type's expected
    parent so NAS keys cannot silently be derived from K_gNB or vice versa.
    """
    if parent_name is not None and parent_name != algo_type.parent:
        raise SuiteKeyError(
            f"{algo_type.name} derives from {algo_type.parent}, not {parent_name}"
        )
    full = kdf(
        parent_key,
        KdfLabel(FC_OPERATIONAL, (bytes([algo_type.value]), bytes([algo_id]))),
    )
    return full[: phase.operational_key_len]


def build_key_context(
    k_seaf: bytes, supi: bytes, phase: MigrationPhase, algo_id: int = ALGO_ID_DEFAULT
) -> KeyContext:
    """Chain K_SEAF -> K_AMF -> K_gNB -> the six operational keys."""
    if len(k_seaf) != 32:
        raise ValueError("K_SEAF must be 32 bytes")
    k_amf = derive_k_amf(k_seaf, supi)
    k_gnb = derive_k_gnb(k_amf, 0)

    def op(atype: AlgoType) -> bytes:
        parent = k_amf if atype.parent == "k_amf" else k_gnb
        return derive_operational_pair(parent, atype, algo_id, phase, parent_name=atype.parent)

    return KeyContext(
        phase=phase,
        k_seaf=k_seaf,
        k_amf=k_amf,
        k_gnb=k_gnb,
        nas_int=op(AlgoType.NAS_INT),
        nas_enc=op(AlgoType.NAS_ENC),
        rrc_int=op(AlgoType.RRC_INT),
        rrc_enc=op(AlgoType.RRC_ENC),
        up_int=op(AlgoType.UP_INT),
        up_enc=op(AlgoType.UP_ENC),
    )
