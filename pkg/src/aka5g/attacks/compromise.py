"""Identity compromise via a broken home-network key pair.

Models the post-quantum break of the classical concealment scheme: the
adversary is simply handed the home private key (standing in for solving
the curve's discrete log from the public key) and decrypts every SUCI it
captured off the air. SUCIs produced under the PQ-slot scheme do not fall
to this key.
"""

from __future__ import annotations

from ..errors import DecryptionError, SchemeNotFoundError
from ..identity import SchemeRegistry, Suci
from ..messages import RegistrationRequest, unpack
from ..trace import Trace
from .report import AttackReport

__all__ = ["suci_compromise"]


def suci_compromise(
    trace: Trace,
    home_private_key: bytes,
    registry: SchemeRegistry,
    ground_truth: dict[str, bytes],
) -> AttackReport:
    """Decrypt every air-captured SUCI with the compromised private key.

    ``ground_truth`` maps the sending radio endpoint (ue label) to its SUPI
    and is used only to grade the result. Success requires at least one
    captured SUCI and every one of them recovered correctly.
    """
    captured: list[tuple[str, Suci]] = []
    for record in trace.messages("RegistrationRequest", link="air"):
        msg = unpack(record.payload)
        assert isinstance(msg, RegistrationRequest)
        if isinstance(msg.identity, Suci):
            captured.append((record.sender, msg.identity))
    if not captured:
        return AttackReport(
            attack="suci-compromise",
            success=False,
            queries=0,
            grover_cost=0,
            notes="no concealed identifiers captured",
        )
    recovered: list[dict] = []
    all_correct = True
    for sender, suci in captured:
        entry: dict = {"sender": sender, "scheme": suci.scheme_id}
        try:
            supi = registry.get(suci.scheme_id).reveal(home_private_key, suci.ciphertext)
            entry["supi"] = supi.decode(errors="replace")
            entry["correct"] = ground_truth.get(sender) == supi
        except (DecryptionError, SchemeNotFoundError) as exc:
            entry["error"] = type(exc).__name__
            entry["correct"] = False
        all_correct = all_correct and entry["correct"]
        recovered.append(entry)
    first_good = next((e["supi"].encode() for e in recovered if e["correct"]), None)
    return AttackReport(
        attack="suci-compromise",
        success=all_correct,
        queries=len(captured),
        grover_cost=0,
        recovered=first_good if all_correct else None,
        notes=(
            f"all {len(captured)} captured SUCIs deconcealed"
            if all_correct
            else "one or more captured SUCIs resisted the compromised key"
        ),
        details={"captured": len(captured), "results": recovered},
    )
