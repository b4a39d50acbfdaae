"""Per-stratum session protection: stream encryption plus a 32-bit MAC.

Operation order differs by stratum and that difference is load-bearing for
the known-plaintext analysis: user-plane traffic is MAC-then-encrypt (tag
computed over the plaintext), while NAS and RRC are encrypt-then-MAC (tag
computed over the ciphertext, verifiable without the cipher key).
"""

from __future__ import annotations

import hmac as hmac_mod
from dataclasses import dataclass, field

from .constants import BEARER_NAS, BEARER_RRC, BEARER_UP
from .crypto import keystream, mac32
from .errors import ChannelExpiredError, IntegrityError, ReplayError
from .messages import ProtectedPdu
from .vectors import xor_bytes

__all__ = ["SessionChannel", "BEARER_FOR_STRATUM", "verify_only"]

_COUNT_LIMIT = 1 << 32

BEARER_FOR_STRATUM = {"NAS": BEARER_NAS, "RRC": BEARER_RRC, "UP": BEARER_UP}


@dataclass
class SessionChannel:
    """Keys and direction counters for one stratum of one session.

    ``send_count[d]`` is the next COUNT to use when transmitting in
    direction ``d``; ``recv_expected[d]`` the next acceptable received
    COUNT. A (key, count, bearer, direction) tuple is never reused for
    encryption within the channel's lifetime.
    """

    stratum: str
    enc_key: bytes
    int_key: bytes
    send_count: dict[int, int] = field(default_factory=lambda: {0: 0, 1: 0})
    recv_expected: dict[int, int] = field(default_factory=lambda: {0: 0, 1: 0})

    @property
    def bearer(self) -> int:
        return BEARER_FOR_STRATUM[self.stratum]

    def protect(self, plaintext: bytes, direction: int) -> ProtectedPdu:
        """Cipher and tag one PDU, consuming the direction's next COUNT."""
        count = self.send_count[direction]
        if count >= _COUNT_LIMIT:
            raise ChannelExpiredError(
                f"{self.stratum} COUNT exhausted; re-authentication required"
            )
        ks = keystream(self.enc_key, count, self.bearer, direction, len(plaintext))
        if self.stratum == "UP":
            # MAC-then-encrypt: tag over the plaintext
            tag = mac32(self.int_key, count, self.bearer, direction, plaintext)
            ciphertext = xor_bytes(plaintext, ks)
        else:
            # encrypt-then-MAC: tag over the ciphertext
            ciphertext = xor_bytes(plaintext, ks)
            tag = mac32(self.int_key, count, self.bearer, direction, ciphertext)
        self.send_count[direction] = count + 1
        return ProtectedPdu(self.stratum, count, self.bearer, direction, ciphertext, tag)

    def unprotect(self, pdu: ProtectedPdu) -> bytes:
        """Verify and decipher; advances the receive window on success."""
        if pdu.stratum != self.stratum or pdu.bearer != self.bearer:
            raise IntegrityError(
                f"PDU for {pdu.stratum}/bearer {pdu.bearer} on {self.stratum} channel"
            )
        expected = self.recv_expected[pdu.direction]
        if pdu.count < expected:
            raise ReplayError(
                f"stale {self.stratum} COUNT {pdu.count}, expected >= {expected}"
            )
        if self.stratum == "UP":
            ks = keystream(self.enc_key, pdu.count, pdu.bearer, pdu.direction, len(pdu.payload))
            plaintext = xor_bytes(pdu.payload, ks)
            tag = mac32(self.int_key, pdu.count, pdu.bearer, pdu.direction, plaintext)
            if not hmac_mod.compare_digest(tag, pdu.mac):
                raise IntegrityError(f"{self.stratum} MAC verification failed")
        else:
            tag = mac32(self.int_key, pdu.count, pdu.bearer, pdu.direction, pdu.payload)
            if not hmac_mod.compare_digest(tag, pdu.mac):
                raise IntegrityError(f"{self.stratum} MAC verification failed")
            ks = keystream(self.enc_key, pdu.count, pdu.bearer, pdu.direction, len(pdu.payload))
            plaintext = xor_bytes(pdu.payload, ks)
        self.recv_expected[pdu.direction] = pdu.count + 1
        return plaintext


def verify_only(pdu: ProtectedPdu, int_key: bytes) -> bool:
    """Check an encrypt-then-MAC (NAS/RRC) tag without any cipher key.

    Not defined for UP PDUs, whose tag covers the plaintext.
    """
    if pdu.stratum == "UP":
        raise ValueError("UP tags cover the plaintext; decryption is required first")
    tag = mac32(int_key, pdu.count, pdu.bearer, pdu.direction, pdu.payload)
    return hmac_mod.compare_digest(tag, pdu.mac)
