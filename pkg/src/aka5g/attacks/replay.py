"""Active replay attacks against the AKA error-message design.

Both attacks stand in the man-in-the-middle position: probes reach the UE
as if from the network and the responses are captured rather than
forwarded, so serving-network state never notices.

* Linkability: replaying a captured Authentication Request distinguishes
  its original recipient (SyncFailure: MAC valid, SQN stale) from any
  other UE (MacFailure: wrong key). With merged error messages the
  responses are bytewise indistinguishable classes and the attacker can
  only guess.

* SQN leak: the AUTS field of repeated SyncFailures conceals SQN_MS under
  AK*, but AK* depends only on (K, RAND); replaying the same RAND makes it
  constant, so XORing two AUTS values yields the XOR of the two SQN values
  exactly.
"""

from __future__ import annotations

import random

from ..engine import Simulation
from ..messages import AuthRequest, MacFailureMsg, SyncFailureMsg
from ..vectors import xor_bytes
from .report import AttackReport

__all__ = ["linkability_replay", "sqn_leak", "capture_auth_request"]


def capture_auth_request(sim: Simulation, target: str, index: int = -1) -> AuthRequest:
    """An AuthRequest previously delivered to ``target`` over the air.

    ``index`` picks among matching records (default: most recent).
    """
    from ..messages import unpack

    # only genuine network deliveries count; the attacker's own probe
    # injections are also on the trace but are not captures
    records = [
        r
        for r in sim.trace.messages("AuthRequest", link="air")
        if r.receiver == target and r.sender == "seaf"
    ]
    if not records:
        from ..errors import MissingEvidenceError

        raise MissingEvidenceError(f"no AuthRequest for {target} in the trace")
    msg = unpack(records[index].payload)
    assert isinstance(msg, AuthRequest)
    return msg


def linkability_replay(
    sim: Simulation,
    captured: AuthRequest,
    probe_targets: list[str],
    true_target: str,
    rng: random.Random,
) -> AttackReport:
    """Replay one captured challenge to each probe target and classify.

    A target answering SyncFailure is classified as the original
    recipient. If no response type distinguishes (merged errors), the
    attacker falls back to a uniform guess and the report flags the attack
    as defeated.
    """
    if not probe_targets:
        return AttackReport(
            attack="linkability",
            success=False,
            queries=0,
            grover_cost=0,
            notes="no probe targets supplied",
        )
    classifications: dict[str, str] = {}
    identified: list[str] = []
    for target in probe_targets:
        replies = sim.attacker_probe(target, captured)
        reply_kind = type(replies[0]).__name__ if replies else "none"
        is_original = bool(replies) and isinstance(replies[0], SyncFailureMsg)
        classifications[target] = reply_kind
        if is_original:
            identified.append(target)
    distinguishable = bool(identified)
    if distinguishable:
        guess = identified[0]
        notes = "responses distinguishable; original recipient identified"
    else:
        guess = rng.choice(probe_targets)
        notes = "attack defeated: error messages indistinguishable; uniform guess"
    correct = guess == true_target
    return AttackReport(
        attack="linkability",
        success=distinguishable and correct,
        queries=len(probe_targets),
        grover_cost=0,
        recovered=guess.encode() if distinguishable and correct else None,
        notes=notes,
        details={
            "classifications": classifications,
            "identified": guess,
            "true_target": true_target,
            "correct": correct,
            "distinguishable": distinguishable,
        },
    )


def sqn_leak(
    sim: Simulation,
    target: str,
    replay_count: int = 2,
    *,
    captured: AuthRequest | None = None,
    advance_between_probes: bool = True,
) -> AttackReport:
    """Replay one challenge ``replay_count`` times and XOR the AUTS fields.

    Ground-truth SQN values are read from the simulator only to grade the
    result; the recovered differences come purely from the captured AUTS
    values. ``captured`` defaults to the target's most recent genuine
    challenge; passing a challenge that belongs to another UE makes every
    probe fail its MAC check, which is the attack's wrong-target outcome.
    ``advance_between_probes`` runs a fresh authentication between probes
    so the target's SQN actually moves.
    """
    if replay_count < 2:
        raise ValueError("sqn_leak needs at least two probes")
    if captured is None:
        captured = capture_auth_request(sim, target)
    concealed: list[bytes] = []
    truth: list[int] = []
    for i in range(replay_count):
        replies = sim.attacker_probe(target, captured)
        reply = replies[0] if replies else None
        if isinstance(reply, MacFailureMsg):
            return AttackReport(
                attack="sqn-leak",
                success=False,
                queries=i + 1,
                grover_cost=0,
                notes="probe answered MacFailure: challenge was not for this UE",
            )
        if not isinstance(reply, SyncFailureMsg):
            return AttackReport(
                attack="sqn-leak",
                success=False,
                queries=i + 1,
                grover_cost=0,
                notes=f"no AUTS available (response: {type(reply).__name__})",
            )
        concealed.append(reply.auts[:6])
        truth.append(sim.ues[target].usim.sqn_ms)
        if advance_between_probes and i + 1 < replay_count:
            sim.authenticate(target)
    # AK* is fixed by the fixed RAND, so pairwise XORs expose SQN deltas
    recovered_xors = [
        xor_bytes(concealed[i], concealed[i + 1]) for i in range(len(concealed) - 1)
    ]
    expected = [
        (truth[i] ^ truth[i + 1]).to_bytes(6, "big") for i in range(len(truth) - 1)
    ]
    success = recovered_xors == expected
    return AttackReport(
        attack="sqn-leak",
        success=success,
        queries=replay_count,
        grover_cost=0,
        recovered=recovered_xors[0] if success else None,
        notes=(
            "AUTS XOR equals the ground-truth SQN difference"
            if success
            else "recovered XOR disagrees with ground truth"
        ),
        details={
            "recovered_xors": [x.hex() for x in recovered_xors],
            "ground_truth_xors": [x.hex() for x in expected],
            "probes": replay_count,
        },
    )
