"""Wire format tests: every message type round-trips through its canonical
bytes, and malformed buffers are rejected."""

import pytest

from aka5g.identity import Guti, Suci, Supi
from aka5g.messages import (
    AuthConfirm,
    AuthFailureMsg,
    AuthRequest,
    AuthResponse,
    AuthResult,
    AvRequest,
    AvResponse,
    GutiAssignment,
    IdentityRequest,
    MacFailureMsg,
    ProtectedPdu,
    RegistrationRequest,
    ServingAvResponse,
    SyncFailureMsg,
    pack,
    unpack,
)

SUCI = Suci(b"hn0", 0x01, b"\xab" * 70)
SUPI = Supi(b"imsi-001010000000001", b"hn0")

MESSAGES = [
    RegistrationRequest(SUCI),
    RegistrationRequest(Guti(b"\x11" * 10)),
    IdentityRequest(),
    AvRequest(SUCI, b"5G:simnet-001"),
    AvRequest(SUPI, b"5G:simnet-001"),
    AvResponse(b"\x01" * 16, b"\x02" * 16, b"\x03" * 16, b"\x04" * 32, SUPI.value),
    ServingAvResponse(b"\x01" * 16, b"\x02" * 16, b"\x05" * 16),
    AuthRequest(b"\x01" * 16, b"\x02" * 16),
    AuthResponse(b"\x06" * 16),
    MacFailureMsg(),
    SyncFailureMsg(b"\x07" * 14),
    AuthFailureMsg(),
    AuthConfirm(b"\x06" * 16),
    AuthResult(False),
    AuthResult(True, b"\x08" * 32, SUPI.value),
    ProtectedPdu("NAS", 3, 1, 1, b"ciphertext bytes", b"\x09" * 4),
    ProtectedPdu("UP", 0, 3, 0, b"", b"\x0a" * 4),
    GutiAssignment(Guti(b"\x0b" * 10)),
]


@pytest.mark.parametrize("msg", MESSAGES, ids=lambda m: type(m).__name__)
def test_round_trip(msg):
    raw = pack(msg)
    assert raw[0] == msg.TYPE_BYTE
    assert unpack(raw) == msg


def test_distinct_type_bytes():
    assert len({m.TYPE_BYTE for m in MESSAGES}) == len({type(m) for m in MESSAGES})


def test_unpack_rejects_garbage():
    with pytest.raises(ValueError):
        unpack(b"")
    with pytest.raises(ValueError):
        unpack(b"\xff\x00\x00")  # unknown type byte
    with pytest.raises(ValueError):
        unpack(pack(AuthRequest(b"\x01" * 16, b"\x02" * 16))[:-1])  # truncated
    with pytest.raises(ValueError):
        unpack(pack(MacFailureMsg()) + b"\x00")  # trailing bytes
