"""Protocol messages and their canonical byte serialization.

Every message packs to a stable byte string (one type byte plus a fixed
field layout) so traces capture exact wire content, attackers can replay
captured bytes verbatim, and trace diffs are meaningful at byte level.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .identity import Guti, Suci, Supi
from .vectors import Autn

__all__ = [
    "Message",
    "RegistrationRequest",
    "IdentityRequest",
    "AvRequest",
    "AvResponse",
    "ServingAvResponse",
    "AuthRequest",
    "AuthResponse",
    "MacFailureMsg",
    "SyncFailureMsg",
    "AuthFailureMsg",
    "AuthConfirm",
    "AuthResult",
    "ProtectedPdu",
    "GutiAssignment",
    "pack",
    "unpack",
]

_ID_SUCI = 0x01
_ID_GUTI = 0x02
_ID_SUPI = 0x03

STRATUM_BY_CODE = {0x01: "NAS", 0x02: "RRC", 0x03: "UP"}
CODE_BY_STRATUM = {v: k for k, v in STRATUM_BY_CODE.items()}


def _pack_bytes(data: bytes, width: int = 2) -> bytes:
    return len(data).to_bytes(width, "big") + data


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValueError("truncated message")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def take_lv(self, width: int = 2) -> bytes:
        n = int.from_bytes(self.take(width), "big")
        return self.take(n)

    def done(self) -> None:
        if self.pos != len(self.data):
            raise ValueError(f"{len(self.data) - self.pos} trailing bytes in message")


def _pack_suci(suci: Suci) -> bytes:
    return (
        _pack_bytes(suci.home_network_id, 1)
        + bytes([suci.scheme_id])
        + _pack_bytes(suci.ciphertext)
    )


def _read_suci(r: _Reader) -> Suci:
    hn = r.take_lv(1)
    scheme_id = r.take(1)[0]
    return Suci(hn, scheme_id, r.take_lv())


class Message:
    """Base class; subclasses define TYPE_BYTE, body packing and parsing."""

    TYPE_BYTE: int = 0

    def body(self) -> bytes:
        raise NotImplementedError

    @classmethod
    def parse(cls, r: _Reader) -> "Message":
        raise NotImplementedError


@dataclass(frozen=True)
class RegistrationRequest(Message):
    """UE -> SEAF over the air; identity is a SUCI or a GUTI, never a SUPI."""

    TYPE_BYTE = 0x01
    identity: Suci | Guti

    def body(self) -> bytes:
        if isinstance(self.identity, Suci):
            return bytes([_ID_SUCI]) + _pack_suci(self.identity)
        return bytes([_ID_GUTI]) + self.identity.value

    @classmethod
    def parse(cls, r: _Reader) -> "RegistrationRequest":
        kind = r.take(1)[0]
        if kind == _ID_SUCI:
            return cls(_read_suci(r))
        if kind == _ID_GUTI:
            return cls(Guti(r.take(10)))
        raise ValueError(f"bad identity kind {kind:#04x} in RegistrationRequest")


@dataclass(frozen=True)
class IdentityRequest(Message):
    """SEAF -> UE when a presented GUTI cannot be resolved."""

    TYPE_BYTE = 0x02

    def body(self) -> bytes:
        return b""

    @classmethod
    def parse(cls, r: _Reader) -> "IdentityRequest":
        return cls()


@dataclass(frozen=True)
class AvRequest(Message):
    """Serving -> home (secure link): request an AV for a SUCI or a SUPI
    the serving network already resolved from a GUTI."""

    TYPE_BYTE = 0x03
    identity: Suci | Supi
    sn_name: bytes

    def body(self) -> bytes:
        if isinstance(self.identity, Suci):
            ident = bytes([_ID_SUCI]) + _pack_suci(self.identity)
        else:
            ident = (
                bytes([_ID_SUPI])
                + _pack_bytes(self.identity.value, 1)
                + _pack_bytes(self.identity.home_network_id, 1)
            )
        return ident + _pack_bytes(self.sn_name, 1)

    @classmethod
    def parse(cls, r: _Reader) -> "AvRequest":
        kind = r.take(1)[0]
        if kind == _ID_SUCI:
            ident: Suci | Supi = _read_suci(r)
        elif kind == _ID_SUPI:
            ident = Supi(r.take_lv(1), r.take_lv(1))
        else:
            raise ValueError(f"bad identity kind {kind:#04x} in AvRequest")
        return cls(ident, r.take_lv(1))


@dataclass(frozen=True)
class AvResponse(Message):
    """ARPF -> AUSF (secure link): home AV plus the deconcealed SUPI."""

    TYPE_BYTE = 0x04
    rand: bytes
    autn_bytes: bytes
    xres_star: bytes
    k_ausf: bytes
    supi_value: bytes

    def body(self) -> bytes:
        return (
            self.rand + self.autn_bytes + self.xres_star + self.k_ausf
            + _pack_bytes(self.supi_value, 1)
        )

    @classmethod
    def parse(cls, r: _Reader) -> "AvResponse":
        return cls(r.take(16), r.take(16), r.take(16), r.take(32), r.take_lv(1))

    @property
    def autn(self) -> Autn:
        return Autn.from_bytes(self.autn_bytes)


@dataclass(frozen=True)
class ServingAvResponse(Message):
    """AUSF -> SEAF: RAND, AUTN, HXRES*. K_SEAF is withheld until the AUSF
    confirms the response (it rides on AuthResult)."""

    TYPE_BYTE = 0x05
    rand: bytes
    autn_bytes: bytes
    hxres_star: bytes

    def body(self) -> bytes:
        return self.rand + self.autn_bytes + self.hxres_star

    @classmethod
    def parse(cls, r: _Reader) -> "ServingAvResponse":
        return cls(r.take(16), r.take(16), r.take(16))

    @property
    def autn(self) -> Autn:
        return Autn.from_bytes(self.autn_bytes)


@dataclass(frozen=True)
class AuthRequest(Message):
    """SEAF -> UE over the air: the AKA challenge."""

    TYPE_BYTE = 0x06
    rand: bytes
    autn_bytes: bytes

    def body(self) -> bytes:
        return self.rand + self.autn_bytes

    @classmethod
    def parse(cls, r: _Reader) -> "AuthRequest":
        return cls(r.take(16), r.take(16))

    @property
    def autn(self) -> Autn:
        return Autn.from_bytes(self.autn_bytes)


@dataclass(frozen=True)
class AuthResponse(Message):
    """UE -> SEAF over the air: RES*."""

    TYPE_BYTE = 0x07
    res_star: bytes

    def body(self) -> bytes:
        return self.res_star

    @classmethod
    def parse(cls, r: _Reader) -> "AuthResponse":
        return cls(r.take(16))


@dataclass(frozen=True)
class MacFailureMsg(Message):
    """UE -> SEAF: the challenge MAC did not verify."""

    TYPE_BYTE = 0x08

    def body(self) -> bytes:
        return b""

    @classmethod
    def parse(cls, r: _Reader) -> "MacFailureMsg":
        return cls()


@dataclass(frozen=True)
class SyncFailureMsg(Message):
    """UE -> SEAF: MAC fine but SQN stale; carries AUTS. Distinguishable
    from MacFailureMsg on purpose (the linkability/SQN-leak surface)."""

    TYPE_BYTE = 0x09
    auts: bytes

    def body(self) -> bytes:
        return self.auts

    @classmethod
    def parse(cls, r: _Reader) -> "SyncFailureMsg":
        return cls(r.take(14))


@dataclass(frozen=True)
class AuthFailureMsg(Message):
    """UE -> SEAF under merged_errors: one indistinguishable failure message
    with no AUTS, closing both the linkability and the SQN-leak channels."""

    TYPE_BYTE = 0x0A

    def body(self) -> bytes:
        return b""

    @classmethod
    def parse(cls, r: _Reader) -> "AuthFailureMsg":
        return cls()


@dataclass(frozen=True)
class AuthConfirm(Message):
    """SEAF -> AUSF: forward RES* for the home-side check."""

    TYPE_BYTE = 0x0B
    res_star: bytes

    def body(self) -> bytes:
        return self.res_star

    @classmethod
    def parse(cls, r: _Reader) -> "AuthConfirm":
        return cls(r.take(16))


@dataclass(frozen=True)
class AuthResult(Message):
    """AUSF -> SEAF: final verdict; on success carries K_SEAF and the SUPI
    (secure link only)."""

    TYPE_BYTE = 0x0C
    success: bool
    k_seaf: bytes = b""
    supi_value: bytes = b""

    def body(self) -> bytes:
        if not self.success:
            return b"\x00"
        return b"\x01" + self.k_seaf + _pack_bytes(self.supi_value, 1)

    @classmethod
    def parse(cls, r: _Reader) -> "AuthResult":
        ok = r.take(1)[0]
        if ok == 0:
            return cls(False)
        return cls(True, r.take(32), r.take_lv(1))


@dataclass(frozen=True)
class ProtectedPdu(Message):
    """Ciphered and integrity-protected PDU for one stratum."""

    TYPE_BYTE = 0x0D
    stratum: str  # "NAS" | "RRC" | "UP"
    count: int
    bearer: int
    direction: int
    payload: bytes  # ciphertext
    mac: bytes

    def body(self) -> bytes:
        return (
            bytes([CODE_BY_STRATUM[self.stratum]])
            + struct.pack(">IBB", self.count, self.bearer, self.direction)
            + _pack_bytes(self.payload)
            + self.mac
        )

    @classmethod
    def parse(cls, r: _Reader) -> "ProtectedPdu":
        stratum = STRATUM_BY_CODE[r.take(1)[0]]
        count, bearer, direction = struct.unpack(">IBB", r.take(6))
        payload = r.take_lv()
        return cls(stratum, count, bearer, direction, payload, r.take(4))


@dataclass(frozen=True)
class GutiAssignment(Message):
    """Fresh GUTI for the UE. Never sent bare: always the plaintext of a
    protected NAS PDU."""

    TYPE_BYTE = 0x0E
    guti: Guti

    def body(self) -> bytes:
        return self.guti.value

    @classmethod
    def parse(cls, r: _Reader) -> "GutiAssignment":
        return cls(Guti(r.take(10)))


_MESSAGE_TYPES: dict[int, type[Message]] = {
    cls.TYPE_BYTE: cls
    for cls in (
        RegistrationRequest,
        IdentityRequest,
        AvRequest,
        AvResponse,
        ServingAvResponse,
        AuthRequest,
        AuthResponse,
        MacFailureMsg,
        SyncFailureMsg,
        AuthFailureMsg,
        AuthConfirm,
        AuthResult,
        ProtectedPdu,
        GutiAssignment,
    )
}


def pack(message: Message) -> bytes:
    """Canonical serialization: type byte followed by the message body."""
    return bytes([message.TYPE_BYTE]) + message.body()


def unpack(data: bytes) -> Message:
    if not data:
        raise ValueError("empty message")
    try:
        cls = _MESSAGE_TYPES[data[0]]
    except KeyError:
        raise ValueError(f"unknown message type byte {data[0]:#04x}")
    r = _Reader(data[1:])
    msg = cls.parse(r)
    r.done()
    return msg
