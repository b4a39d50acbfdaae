"""Command-line front end.

Subcommands:
  run     execute a scenario config, write the JSONL trace, print a summary
  attack  run a named attack against a recorded trace (plus its config,
          which supplies ground truth and lets active attacks re-simulate
          the deterministic world)
  cost    print classical vs quantum-model search cost for a key size

stdout carries one JSON object per line; diagnostics go to stderr.
Exit codes: 0 ok, 2 usage, 3 bad config, 4 missing evidence.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from pathlib import Path

from .attacks import (
    ATTACK_NAMES,
    EffectiveKeySpec,
    capture_auth_request,
    classical_cost,
    extract_handshake_intercept,
    extract_keystream_intercept,
    grover_cost,
    handshake_key_recovery,
    keystream_key_recovery,
    linkability_replay,
    sqn_leak,
    suci_compromise,
)
from .config import ScenarioConfig
from .engine import Simulation, run_scenario
from .errors import ConfigError, MissingEvidenceError
from .identity import EciesX25519Scheme
from .trace import Trace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_EVIDENCE = 4


def _emit(obj: dict) -> None:
    print(json.dumps(obj, separators=(",", ":")))


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_run(args) -> int:
    try:
        config = ScenarioConfig.from_file(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    trace = run_scenario(config)
    Path(args.out).write_text(trace.to_jsonl())
    failures = {
        "mac_failures": len(trace.messages("MacFailureMsg")),
        "sync_failures": len(trace.messages("SyncFailureMsg")),
        "merged_failures": len(trace.messages("AuthFailureMsg")),
    }
    auth_successes = sum(
        1 for r in trace.messages("AuthResult") if r.payload[1] == 1
    )
    _emit(
        {
            "kind": "run_summary",
            "config": str(args.config),
            "out": str(args.out),
            "subscribers": len(config.subscribers),
            "auth_successes": auth_successes,
            "records": len(trace),
            **failures,
        }
    )
    return EXIT_OK


def _load_trace_and_config(args) -> tuple[Trace, ScenarioConfig]:
    config = ScenarioConfig.from_file(args.config)
    trace_path = Path(args.trace)
    if not trace_path.exists():
        raise ConfigError(f"trace file not found: {trace_path}")
    return Trace.read(trace_path), config


def _spec_for(config: ScenarioConfig, ue_label: str, effective_bits: int) -> EffectiveKeySpec:
    sub = config.subscriber_by_label(ue_label)
    true_key = config.subscriber_key(sub).bytes_
    return EffectiveKeySpec.from_true_key(true_key, effective_bits)


def cmd_attack(args) -> int:
    try:
        trace, config = _load_trace_and_config(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    sn_name = config.sn_name.encode()
    try:
        if args.name == "handshake-recovery":
            spec = _spec_for(config, args.ue, args.effective_bits)
            intercept = extract_handshake_intercept(trace, sn_name, args.occurrence)
            report = handshake_key_recovery(
                intercept, spec, partitions=args.partitions
            )
        elif args.name == "keystream-recovery":
            sub = config.subscriber_by_label(args.ue)
            spec = _spec_for(config, args.ue, args.effective_bits)
            if args.known_plaintext:
                known = bytes.fromhex(args.known_plaintext)
            else:
                known = f"UP-PDU from {args.ue} seq 00000001".encode()
            intercept = extract_keystream_intercept(
                trace,
                sn_name,
                sub.supi.encode(),
                known,
                stratum=args.stratum,
                occurrence=args.occurrence,
                include_rand=not args.withhold_rand,
            )
            report = keystream_key_recovery(
                intercept, spec, config.phase, partitions=args.partitions
            )
        elif args.name == "linkability":
            requests = trace.messages("AuthRequest", link="air")
            if len(requests) < args.occurrence:
                raise MissingEvidenceError("trace contains no matching AuthRequest")
            true_target = requests[args.occurrence - 1].receiver
            sim = Simulation(config)
            sim.run()
            captured = capture_auth_request(sim, true_target, args.occurrence - 1)
            probes = args.probes.split(",") if args.probes else config.labels()
            rng = random.Random(config.seed ^ 0x1A2B3C4D)
            report = linkability_replay(sim, captured, probes, true_target, rng)
        elif args.name == "sqn-leak":
            sim = Simulation(config)
            sim.run()
            report = sqn_leak(sim, args.target, replay_count=args.replays)
        elif args.name == "suci-compromise":
            # Shor stands in: derive the classical private key that matches
            # the home public key (useless if the PQ-slot scheme is in use)
            classical_priv, _ = EciesX25519Scheme().generate_keypair(
                config.home_keypair_seed()
            )
            truth = {
                config.ue_label(i): s.supi.encode()
                for i, s in enumerate(config.subscribers)
            }
            from .identity import default_registry

            report = suci_compromise(trace, classical_priv, default_registry(), truth)
        else:  # unreachable through argparse choices
            return _fail(EXIT_USAGE, f"unknown attack {args.name!r}; valid: {ATTACK_NAMES}")
    except MissingEvidenceError as exc:
        return _fail(EXIT_EVIDENCE, str(exc))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except ValueError as exc:  # bad attack parameters (bits range, hex, ...)
        return _fail(EXIT_USAGE, str(exc))
    line = report.to_json()
    print(line)
    if args.out:
        Path(args.out).write_text(line + "\n")
    return EXIT_OK


def cmd_cost(args) -> int:
    try:
        classical = classical_cost(args.bits)
        grover = grover_cost(args.bits)
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    _emit(
        {
            "kind": "cost",
            "bits": args.bits,
            "classical": str(classical),
            "grover": str(grover),
            "classical_log2": args.bits,
            "grover_log2": round(math.log2(grover), 2),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aka5g",
        description="Deterministic 5G AKA security model and PQ threat harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write its trace")
    p_run.add_argument("--config", required=True, help="scenario JSON path")
    p_run.add_argument("--out", required=True, help="output trace JSONL path")
    p_run.set_defaults(func=cmd_run)

    p_attack = sub.add_parser("attack", help="run an attack against a trace")
    p_attack.add_argument("name", choices=ATTACK_NAMES, help="attack to run")
    p_attack.add_argument("--trace", required=True, help="recorded trace JSONL path")
    p_attack.add_argument("--config", required=True, help="scenario JSON that produced the trace")
    p_attack.add_argument("--ue", default="ue0", help="target subscriber label (searches)")
    p_attack.add_argument("--effective-bits", type=int, default=20,
                          help="unknown key prefix bits for the searches (8..32)")
    p_attack.add_argument("--partitions", type=int, default=1,
                          help="split the candidate space into this many ranges")
    p_attack.add_argument("--occurrence", type=int, default=1,
                          help="which matching message to attack (1-based)")
    p_attack.add_argument("--stratum", default="UP", choices=("NAS", "RRC", "UP"),
                          help="stratum of the protected PDU (keystream-recovery)")
    p_attack.add_argument("--known-plaintext", default="",
                          help="hex known plaintext (keystream-recovery)")
    p_attack.add_argument("--withhold-rand", action="store_true",
                          help="simulate an intercept that missed the challenge RAND")
    p_attack.add_argument("--target", default="ue0", help="probe target (sqn-leak)")
    p_attack.add_argument("--replays", type=int, default=2, help="probe count (sqn-leak)")
    p_attack.add_argument("--probes", default="", help="comma-joined probe labels (linkability)")
    p_attack.add_argument("--out", default="", help="also write the report to this path")
    p_attack.set_defaults(func=cmd_attack)

    p_cost = sub.add_parser("cost", help="classical vs quantum-model search cost")
    p_cost.add_argument("--bits", type=int, required=True, help="key size in bits (1..512)")
    p_cost.set_defaults(func=cmd_cost)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
