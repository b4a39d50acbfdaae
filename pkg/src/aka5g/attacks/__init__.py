"""Threat harness: executable desk-scale versions of the known attacks on
the modelled system, plus the quantum-search cost calculator."""

from .compromise import suci_compromise
from .cost import CostModel, classical_cost, grover_cost
from .replay import capture_auth_request, linkability_replay, sqn_leak
from .report import ATTACK_NAMES, AttackReport, EffectiveKeySpec
from .search import (
    HandshakeIntercept,
    KeystreamIntercept,
    extract_handshake_intercept,
    extract_keystream_intercept,
    handshake_key_recovery,
    keystream_key_recovery,
)

__all__ = [
    "ATTACK_NAMES",
    "AttackReport",
    "CostModel",
    "EffectiveKeySpec",
    "HandshakeIntercept",
    "KeystreamIntercept",
    "capture_auth_request",
    "classical_cost",
    "extract_handshake_intercept",
    "extract_keystream_intercept",
    "grover_cost",
    "handshake_key_recovery",
    "keystream_key_recovery",
    "linkability_replay",
    "sqn_leak",
    "suci_compromise",
]
