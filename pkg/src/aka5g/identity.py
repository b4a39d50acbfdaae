"""Subscriber identity confidentiality: SUPI concealment into SUCIs,
home-network deconcealment, and the serving network's GUTI directory.

The default protection scheme is an ECIES-style KEM/DEM composition over
X25519 (ephemeral-static Diffie-Hellman, HKDF-like key split, stream
encryption, HMAC tag). It is the model's own profile, not the SECG-profiled
ECIES of TS 33.501 Annex C; the over-the-wire shape and the security
properties under test (randomised, home-key-decryptable, tamper-evident)
are the contract.

Scheme id 0x02 occupies the slot a post-quantum KEM would fill. It is a
symmetric stand-in for simulation only: its "public" key must stay secret,
which no real KEM requires. Do not reuse outside this model.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field

from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)

from .constants import GUTI_LEN, SCHEME_ECIES_X25519, SCHEME_PQ_SIM_KEM, SUPI_MAX_LEN
from .errors import (
    ConcealmentError,
    DecryptionError,
    SchemeNotFoundError,
    StateError,
)

__all__ = [
    "Supi",
    "Suci",
    "Guti",
    "ProtectionScheme",
    "EciesX25519Scheme",
    "PqSimKemScheme",
    "SchemeRegistry",
    "default_registry",
    "GutiDirectory",
    "conceal_supi",
    "reveal_suci",
]

_TAG_LEN = 16


@dataclass(frozen=True)
class Supi:
    """Permanent subscriber identifier; never sent in clear over the air."""

    value: bytes
    home_network_id: bytes

    def __post_init__(self):
        if not self.value:
            raise ValueError("SUPI must be non-empty")
        if len(self.value) > SUPI_MAX_LEN:
            raise ValueError(f"SUPI exceeds {SUPI_MAX_LEN} bytes")

    @classmethod
    def from_str(cls, value: str, home_network_id: str = "hn") -> "Supi":
        return cls(value.encode(), home_network_id.encode())


@dataclass(frozen=True)
class Suci:
    """Concealed subscriber identifier: routing id, scheme id, ciphertext."""

    home_network_id: bytes
    scheme_id: int
    ciphertext: bytes


@dataclass(frozen=True)
class Guti:
    """Serving-network temporary identifier (10 bytes)."""

    value: bytes

    def __post_init__(self):
        if len(self.value) != GUTI_LEN:
            raise ValueError(f"GUTI must be {GUTI_LEN} bytes")


def _stream_xor(key: bytes, data: bytes) -> bytes:
    out = bytearray()
    for i in range((len(data) + 31) // 32):
        out += hmac.digest(key, b"stream" + i.to_bytes(4, "big"), hashlib.sha256)
    return bytes(x ^ y for x, y in zip(data, out))


def _split_keys(secret: bytes, context: bytes) -> tuple[bytes, bytes]:
    enc = hmac.digest(secret, b"\x01enc" + context, hashlib.sha256)
    mac = hmac.digest(secret, b"\x02mac" + context, hashlib.sha256)
    return enc, mac


class ProtectionScheme:
    """Interface for SUPI protection schemes addressed by one-byte ids."""

    scheme_id: int

    def generate_keypair(self, seed: bytes) -> tuple[bytes, bytes]:
        """Deterministic (private, public) pair from a 32-byte seed."""
        raise NotImplementedError

    def conceal(self, public_key: bytes, plaintext: bytes, randomness: bytes) -> bytes:
        raise NotImplementedError

    def reveal(self, private_key: bytes, ciphertext: bytes) -> bytes:
        raise NotImplementedError


class EciesX25519Scheme(ProtectionScheme):
    """Ephemeral-static X25519, key split, stream encryption, 16-byte tag.

    Ciphertext layout: ephemeral public value (32) || body || tag (16).
    Vulnerable by design to an adversary who can solve the curve's discrete
    log (the classical-scheme compromise the threat harness exercises).
    """

    scheme_id = SCHEME_ECIES_X25519

    def generate_keypair(self, seed: bytes) -> tuple[bytes, bytes]:
        if len(seed) != 32:
            raise ValueError("keypair seed must be 32 bytes")
        priv = X25519PrivateKey.from_private_bytes(seed)
        return seed, priv.public_key().public_bytes_raw()

    def conceal(self, public_key: bytes, plaintext: bytes, randomness: bytes) -> bytes:
        if len(randomness) != 32:
            raise ConcealmentError("ECIES randomness must be 32 bytes")
        eph_priv = X25519PrivateKey.from_private_bytes(randomness)
        eph_pub = eph_priv.public_key().public_bytes_raw()
        shared = eph_priv.exchange(X25519PublicKey.from_public_bytes(public_key))
        enc, mac = _split_keys(shared, eph_pub)
        body = _stream_xor(enc, plaintext)
        tag = hmac.digest(mac, body, hashlib.sha256)[:_TAG_LEN]
        return eph_pub + body + tag

    def reveal(self, private_key: bytes, ciphertext: bytes) -> bytes:
        if len(ciphertext) < 32 + _TAG_LEN:
            raise DecryptionError("ECIES ciphertext too short")
        eph_pub, body, tag = (
            ciphertext[:32],
            ciphertext[32:-_TAG_LEN],
            ciphertext[-_TAG_LEN:],
        )
        priv = X25519PrivateKey.from_private_bytes(private_key)
        try:
            shared = priv.exchange(X25519PublicKey.from_public_bytes(eph_pub))
        except ValueError as exc:
            raise DecryptionError(f"bad ephemeral public value: {exc}") from exc
        enc, mac = _split_keys(shared, eph_pub)
        if not hmac.compare_digest(hmac.digest(mac, body, hashlib.sha256)[:_TAG_LEN], tag):
            raise DecryptionError("SUCI tag verification failed")
        return _stream_xor(enc, body)


class PqSimKemScheme(ProtectionScheme):
    """SIMULATION-ONLY stand-in for a post-quantum KEM (scheme id 0x02).

    Symmetric under the hood: public and private halves are the same 32
    bytes, so the "public" key must be kept secret. Exists so scenarios can
    exercise the second-scheme slot and show that a compromised classical
    private key does not open these SUCIs. NOT FOR PRODUCTION USE.
    """

    scheme_id = SCHEME_PQ_SIM_KEM

    def generate_keypair(self, seed: bytes) -> tuple[bytes, bytes]:
        if len(seed) != 32:
            raise ValueError("keypair seed must be 32 bytes")
        secret = hashlib.sha256(b"pq-sim-kem" + seed).digest()
        return secret, secret

    def conceal(self, public_key: bytes, plaintext: bytes, randomness: bytes) -> bytes:
        if len(randomness) < 16:
            raise ConcealmentError("PQ stand-in needs >= 16 bytes of randomness")
        nonce = randomness[:16]
        enc, mac = _split_keys(public_key, nonce)
        body = _stream_xor(enc, plaintext)
        tag = hmac.digest(mac, body, hashlib.sha256)[:_TAG_LEN]
        return nonce + body + tag

    def reveal(self, private_key: bytes, ciphertext: bytes) -> bytes:
        if len(ciphertext) < 16 + _TAG_LEN:
            raise DecryptionError("PQ stand-in ciphertext too short")
        nonce, body, tag = (
            ciphertext[:16],
            ciphertext[16:-_TAG_LEN],
            ciphertext[-_TAG_LEN:],
        )
        enc, mac = _split_keys(private_key, nonce)
        if not hmac.compare_digest(hmac.digest(mac, body, hashlib.sha256)[:_TAG_LEN], tag):
            raise DecryptionError("SUCI tag verification failed")
        return _stream_xor(enc, body)


class SchemeRegistry:
    """One-byte scheme id -> protection scheme lookup."""

    def __init__(self, schemes: list[ProtectionScheme] | None = None):
        self._schemes: dict[int, ProtectionScheme] = {}
        for s in schemes or ():
            self.register(s)

    def register(self, scheme: ProtectionScheme) -> None:
        self._schemes[scheme.scheme_id] = scheme

    def get(self, scheme_id: int) -> ProtectionScheme:
        try:
            return self._schemes[scheme_id]
        except KeyError:
            raise SchemeNotFoundError(f"no protection scheme with id {scheme_id:#04x}")

    def ids(self) -> list[int]:
        return sorted(self._schemes)


def default_registry() -> SchemeRegistry:
    return SchemeRegistry([EciesX25519Scheme(), PqSimKemScheme()])


def conceal_supi(
    supi: Supi,
    home_public_key: bytes,
    scheme_id: int,
    randomness: bytes,
    registry: SchemeRegistry,
) -> Suci:
    """Conceal a SUPI under the home network's public key.

    Deterministic given ``randomness`` so traces reproduce; distinct
    randomness yields bytewise-distinct (unlinkable) SUCIs.
    """
    scheme = registry.get(scheme_id)
    ct = scheme.conceal(home_public_key, supi.value, randomness)
    return Suci(supi.home_network_id, scheme_id, ct)


def reveal_suci(suci: Suci, home_private_key: bytes, registry: SchemeRegistry) -> Supi:
    """Home-network deconcealment; raises DecryptionError on any tampering."""
    scheme = registry.get(suci.scheme_id)
    value = scheme.reveal(home_private_key, suci.ciphertext)
    return Supi(value, suci.home_network_id)


@dataclass
class GutiDirectory:
    """Serving-network GUTI state: allocation plus GUTI -> SUPI resolution.

    Allocation requires the subscriber to be authenticated first; freshness
    is guaranteed within one directory lifetime (no value is ever reissued).
    Single-writer per serving network instance.
    """

    _guti_to_supi: dict[bytes, Supi] = field(default_factory=dict)
    _issued: set = field(default_factory=set)
    _authenticated: set = field(default_factory=set)

    def mark_authenticated(self, supi: Supi) -> None:
        self._authenticated.add(supi.value)

    def is_authenticated(self, supi: Supi) -> bool:
        return supi.value in self._authenticated

    def assign(self, supi: Supi, fresh_bytes) -> Guti:
        """Allocate a fresh GUTI; ``fresh_bytes(n)`` supplies entropy."""
        if supi.value not in self._authenticated:
            raise StateError("cannot assign GUTI before authentication")
        while True:
            candidate = bytes(fresh_bytes(GUTI_LEN))
            if candidate not in self._issued:
                break
        self._issued.add(candidate)
        # a re-assignment supersedes the subscriber's previous GUTI
        for old, owner in list(self._guti_to_supi.items()):
            if owner.value == supi.value:
                del self._guti_to_supi[old]
        guti = Guti(candidate)
        self._guti_to_supi[candidate] = supi
        return guti

    def seed_mapping(self, supi: Supi, guti: Guti) -> None:
        """Install a mapping carried over from a previous registration."""
        self._issued.add(guti.value)
        self._guti_to_supi[guti.value] = supi

    def resolve(self, guti: Guti) -> Supi | None:
        """Mapped SUPI, or None (unknown: caller requests a SUCI instead)."""
        return self._guti_to_supi.get(guti.value)

    def reset(self) -> None:
        self._guti_to_supi.clear()
        self._authenticated.clear()
