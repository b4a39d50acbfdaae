"""Acceptance suite: the package's exit criteria, one test per criterion,
each printing a PASS/FAIL line (run with ``pytest -s`` to see them live).

Criteria summary:
 1. 1,000 randomized honest AKA runs agree on keys, under 10 s
 2. handshake key recovery at 20 unknown bits, <= 2**20 queries, Grover 805
 3. keystream key recovery at 16 unknown bits; refuses without RAND
 4. linkability: 100% identification; merged errors push accuracy to chance
 5. SQN-leak XOR exact in 100/100 trials
 6. SUCI privacy: unlinkability, lint, post-compromise break, PQ slot holds
 7. 256-bit-K USIM runs the unmodified legacy path; traces differ only in
    key-dependent values
 8. phase-1 operational keys are the leading half of phase-2 keys
 9. every primitive matches the standalone oracle on 256 random inputs
10. bytewise trace/report determinism, including across partitionings
"""

import random
import time
from contextlib import contextmanager

import pytest

from aka5g.attacks import (
    EffectiveKeySpec,
    capture_auth_request,
    extract_handshake_intercept,
    extract_keystream_intercept,
    grover_cost,
    handshake_key_recovery,
    keystream_key_recovery,
    linkability_replay,
    sqn_leak,
    suci_compromise,
)
from aka5g.config import ScenarioConfig, SubscriberConfig
from aka5g.constants import SCHEME_PQ_SIM_KEM
from aka5g.crypto import (
    SUITE_REF128,
    SUITE_REF256,
    KdfLabel,
    SecretKeyK,
    kdf,
    keystream,
    mac32,
)
from aka5g.engine import Simulation, run_scenario
from aka5g.errors import MissingEvidenceError
from aka5g.hierarchy import MigrationPhase, build_key_context
from aka5g.identity import EciesX25519Scheme, Supi, conceal_supi, default_registry, reveal_suci
from aka5g.messages import unpack
from aka5g.session import SessionChannel
from aka5g.trace import lint_no_cleartext_supi
from oracle import hmac_sha256, kdf_s_string, sha256


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number:2d} FAIL  {description}")
        raise
    print(f"[acceptance] criterion {number:2d} PASS  {description}")


def _phase_subscribers(rng, phase, count, tag):
    subs = []
    for i in range(count):
        if phase is MigrationPhase.LEGACY:
            bits = 128
        elif phase is MigrationPhase.PHASE2:
            bits = 256
        else:
            bits = rng.choice((128, 256))
        subs.append(
            SubscriberConfig(
                supi=f"imsi-{tag}{i:010d}",
                k_bits=bits,
                suite="ref256" if bits == 256 else rng.choice(("ref128", "ref256")),
            )
        )
    return subs


def test_criterion_1_key_agreement_1000_runs():
    with criterion(1, "1000/1000 honest runs agree on keys in <10s"):
        rng = random.Random(0xACCE9701)
        started = time.monotonic()
        agreed = 0
        total = 0
        scenario = 0
        while total < 1000:
            phase = rng.choice(list(MigrationPhase))
            count = min(40, 1000 - total)
            cfg = ScenarioConfig(
                seed=rng.randrange(1 << 48),
                phase=phase,
                subscribers=_phase_subscribers(rng, phase, count, f"{scenario:03d}"),
            )
            sim = Simulation(cfg)
            sim.run()
            for label in cfg.labels():
                total += 1
                ue_ctx = sim.ues[label].key_context
                if ue_ctx is not None and ue_ctx == sim.seaf.contexts.get(label):
                    agreed += 1
            scenario += 1
        elapsed = time.monotonic() - started
        assert total == 1000
        assert agreed == 1000, f"key agreement failed in {1000 - agreed} runs"
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_criterion_2_handshake_recovery_20_bits():
    with criterion(2, "handshake recovery: 20 unknown bits from one intercept, Grover 805"):
        started = time.monotonic()
        cfg = ScenarioConfig(
            seed=0xACCE9702,
            phase=MigrationPhase.PHASE1,
            subscribers=[SubscriberConfig(supi="imsi-001012024000001")],
        )
        sim = Simulation(cfg)
        sim.run()
        true_key = cfg.subscriber_key(cfg.subscribers[0]).bytes_
        intercept = extract_handshake_intercept(sim.trace, cfg.sn_name.encode())
        spec = EffectiveKeySpec.from_true_key(true_key, 20)
        report = handshake_key_recovery(intercept, spec)
        elapsed = time.monotonic() - started
        assert report.success
        assert report.recovered == true_key
        assert report.queries <= 1 << 20
        assert report.grover_cost == 805 == grover_cost(20)
        assert elapsed < 60.0, f"took {elapsed:.2f}s"


def test_criterion_3_keystream_recovery_16_bits():
    with criterion(3, "keystream recovery: 16 unknown bits, 16 known bytes; no RAND -> refuses"):
        started = time.monotonic()
        cfg = ScenarioConfig(
            seed=0xACCE9703,
            phase=MigrationPhase.PHASE1,
            subscribers=[SubscriberConfig(supi="imsi-001012024000002")],
        )
        sim = Simulation(cfg)
        sim.run()
        sub = cfg.subscribers[0]
        true_key = cfg.subscriber_key(sub).bytes_
        known16 = b"UP-PDU from ue0 "  # first 16 bytes of the stock payload
        intercept = extract_keystream_intercept(
            sim.trace, cfg.sn_name.encode(), sub.supi.encode(), known16, stratum="UP"
        )
        spec = EffectiveKeySpec.from_true_key(true_key, 16)
        report = keystream_key_recovery(intercept, spec, cfg.phase)
        assert report.success
        assert report.recovered == true_key
        assert report.queries <= 1 << 16
        # the same intercept minus RAND must be refused up front
        blind = extract_keystream_intercept(
            sim.trace, cfg.sn_name.encode(), sub.supi.encode(), known16,
            stratum="UP", include_rand=False,
        )
        with pytest.raises(MissingEvidenceError):
            keystream_key_recovery(blind, spec, cfg.phase)
        elapsed = time.monotonic() - started
        assert elapsed < 60.0, f"took {elapsed:.2f}s"


def _linkability_sim(seed, merged):
    cfg = ScenarioConfig(
        seed=seed,
        phase=MigrationPhase.PHASE1,
        subscribers=[
            SubscriberConfig(supi=f"imsi-0010140400{i:05d}") for i in range(10)
        ],
        merged_errors=merged,
    )
    sim = Simulation(cfg)
    sim.run()
    return cfg, sim


def test_criterion_4_linkability_and_merged_errors():
    with criterion(4, "linkability 100/100; merged errors reduce accuracy to ~10%"):
        cfg, sim = _linkability_sim(0xACCE9704, merged=False)
        rng = random.Random(0x1144)
        correct = 0
        for _ in range(100):
            target = rng.choice(cfg.labels())
            captured = capture_auth_request(sim, target)
            report = linkability_replay(sim, captured, cfg.labels(), target, rng)
            if report.success and report.details["identified"] == target:
                correct += 1
        assert correct == 100, f"identified {correct}/100"

        cfg_m, sim_m = _linkability_sim(0xACCE9705, merged=True)
        rng_m = random.Random(0x4D45)
        hits = 0
        trials = 1000
        for _ in range(trials):
            target = rng_m.choice(cfg_m.labels())
            captured = capture_auth_request(sim_m, target)
            report = linkability_replay(sim_m, captured, cfg_m.labels(), target, rng_m)
            assert not report.details["distinguishable"]
            if report.details["identified"] == target:
                hits += 1
        accuracy = hits / trials
        assert 0.07 <= accuracy <= 0.13, f"merged-errors accuracy {accuracy:.3f}"


def test_criterion_5_sqn_leak_100_trials():
    with criterion(5, "SQN-leak XOR equals ground truth in 100/100 trials"):
        cfg = ScenarioConfig(
            seed=0xACCE9706,
            phase=MigrationPhase.PHASE1,
            subscribers=[SubscriberConfig(supi=f"imsi-0010150500{i:05d}") for i in range(4)],
        )
        sim = Simulation(cfg)
        sim.run()
        exact = 0
        for trial in range(100):
            target = cfg.ue_label(trial % 4)
            report = sqn_leak(sim, target, replay_count=2)
            if report.success and (
                report.details["recovered_xors"] == report.details["ground_truth_xors"]
            ):
                exact += 1
        assert exact == 100, f"exact in {exact}/100 trials"


def test_criterion_6_suci_privacy_end_to_end():
    with criterion(6, "SUCI unlinkability, lint, post-compromise break, PQ slot holds"):
        registry = default_registry()
        priv, pub = EciesX25519Scheme().generate_keypair(b"\x21" * 32)
        supi = Supi(b"imsi-001016060000001", b"hn0")
        rng = random.Random(0xACCE9707)
        seen = set()
        for _ in range(100):
            suci = conceal_supi(supi, pub, 0x01, rng.randbytes(32), registry)
            assert suci.ciphertext not in seen
            seen.add(suci.ciphertext)
            assert reveal_suci(suci, priv, registry).value == supi.value

        cfg = ScenarioConfig(
            seed=0xACCE9708,
            phase=MigrationPhase.PHASE1,
            subscribers=[SubscriberConfig(supi=f"imsi-0010160600{i:05d}") for i in range(5)],
        )
        sim = Simulation(cfg)
        sim.run()
        supis = [s.supi.encode() for s in cfg.subscribers]
        assert lint_no_cleartext_supi(sim.trace, supis) == []

        truth = {cfg.ue_label(i): s.supi.encode() for i, s in enumerate(cfg.subscribers)}
        report = suci_compromise(sim.trace, sim.home_private_key, sim.registry, truth)
        assert report.success and report.details["captured"] == 5
        assert all(r["correct"] for r in report.details["results"])

        cfg_pq = ScenarioConfig(
            seed=0xACCE9709,
            phase=MigrationPhase.PHASE1,
            subscribers=[SubscriberConfig(supi="imsi-001016060100001")],
            home_key_scheme=SCHEME_PQ_SIM_KEM,
        )
        sim_pq = Simulation(cfg_pq)
        sim_pq.run()
        assert sim_pq.auth_successes == 1
        classical_priv, _ = EciesX25519Scheme().generate_keypair(cfg_pq.home_keypair_seed())
        truth_pq = {"ue0": cfg_pq.subscribers[0].supi.encode()}
        report_pq = suci_compromise(sim_pq.trace, classical_priv, sim_pq.registry, truth_pq)
        assert not report_pq.success


def test_criterion_7_phase1_runs_legacy_path():
    with criterion(7, "256-bit K over the legacy path; trace differs only in key-dependent bytes"):
        supi = "imsi-001017070000001"
        seed = 0xACCE970A
        cfg_256 = ScenarioConfig(
            seed=seed, phase=MigrationPhase.PHASE1,
            subscribers=[SubscriberConfig(supi=supi, k_bits=256, suite="ref256")],
        )
        cfg_128 = ScenarioConfig(
            seed=seed, phase=MigrationPhase.LEGACY,
            subscribers=[SubscriberConfig(supi=supi, k_bits=128, suite="ref128")],
        )
        sim_256, sim_128 = Simulation(cfg_256), Simulation(cfg_128)
        sim_256.run()
        sim_128.run()
        assert sim_256.auth_successes == 1  # 256-bit USIM completed plain AKA
        # the USIM still exports 128-bit CK/IK
        _, ck, ik, _ = SUITE_REF256.f2345(
            cfg_256.subscriber_key(cfg_256.subscribers[0]), bytes(16)
        )
        assert len(ck) == 16 and len(ik) == 16

        a, b = sim_256.trace.records, sim_128.trace.records
        assert len(a) == len(b), "trace structure diverged"
        for ra, rb in zip(a, b):
            assert (ra.msg_type, ra.sender, ra.receiver, ra.link, ra.step) == (
                rb.msg_type, rb.sender, rb.receiver, rb.link, rb.step
            )
            assert len(ra.payload_hex) == len(rb.payload_hex), (
                f"length diverged in record {ra.i} ({ra.msg_type})"
            )
            if ra.msg_type in ("RegistrationRequest", "AvRequest", "IdentityRequest"):
                # identity handling is entirely K-independent
                assert ra.payload_hex == rb.payload_hex
            if ra.msg_type == "AuthRequest":
                ma, mb = unpack(ra.payload), unpack(rb.payload)
                assert ma.rand == mb.rand              # K-independent
                assert ma.autn.amf == mb.autn.amf      # K-independent
                assert ma.autn.mac != mb.autn.mac      # key-dependent
            if ra.msg_type == "AuthResponse":
                assert ra.payload_hex != rb.payload_hex  # RES* is key-dependent
            if ra.msg_type == "ProtectedPdu":
                ma, mb = unpack(ra.payload), unpack(rb.payload)
                assert (ma.stratum, ma.count, ma.bearer, ma.direction) == (
                    mb.stratum, mb.count, mb.bearer, mb.direction
                )
                assert len(ma.payload) == len(mb.payload)


def test_criterion_8_phase2_truncation_consistency():
    with criterion(8, "phase-1 keys are the leading half of phase-2 keys; 256-bit sessions work"):
        rng = random.Random(0xACCE970B)
        for _ in range(100):
            k_seaf = rng.randbytes(32)
            supi = rng.randbytes(rng.randrange(8, 32))
            ctx1 = build_key_context(k_seaf, supi, MigrationPhase.PHASE1)
            ctx2 = build_key_context(k_seaf, supi, MigrationPhase.PHASE2)
            for name, key1 in ctx1.operational_keys().items():
                key2 = ctx2.operational_keys()[name]
                assert len(key1) == 16 and len(key2) == 32
                assert key2[:16] == key1
        # full phase-2 session protection round-trip on 256-bit keys
        cfg = ScenarioConfig(
            seed=0xACCE970C, phase=MigrationPhase.PHASE2,
            subscribers=[SubscriberConfig(supi="imsi-001018080000001", k_bits=256, suite="ref256")],
        )
        sim = Simulation(cfg)
        sim.run()
        assert sim.auth_successes == 1
        ctx = sim.ues["ue0"].key_context
        assert all(len(k) == 32 for k in ctx.operational_keys().values())
        tx = SessionChannel("UP", ctx.up_enc, ctx.up_int)
        rx = SessionChannel("UP", ctx.up_enc, ctx.up_int)
        for _ in range(5):
            msg = rng.randbytes(rng.randrange(1, 200))
            assert rx.unprotect(tx.protect(msg, 0)) == msg


def test_criterion_9_oracle_equivalence_256_inputs():
    with criterion(9, "all primitives match the standalone oracle on 256 random inputs"):
        rng = random.Random(0xACCE970D)
        for _ in range(256):
            key_bytes = rng.randbytes(rng.choice((16, 32)))
            k = SecretKeyK(key_bytes)
            suite = SUITE_REF128 if len(key_bytes) == 16 else SUITE_REF256
            rand = rng.randbytes(16)
            sqn = rng.randrange(1 << 48)
            amf = rng.randbytes(2)
            sqn6 = sqn.to_bytes(6, "big")
            assert suite.f1(k, rand, sqn, amf) == hmac_sha256(key_bytes, b"\x01" + rand + sqn6 + amf)[:8]
            assert suite.f1_star(k, rand, sqn, amf) == hmac_sha256(key_bytes, b"\x02" + rand + sqn6 + amf)[:8]
            xres, ck, ik, ak = suite.f2345(k, rand)
            assert xres == hmac_sha256(key_bytes, b"\x03" + rand)[:16]
            assert ck == hmac_sha256(key_bytes, b"\x04" + rand)[:16]
            assert ik == hmac_sha256(key_bytes, b"\x05" + rand)[:16]
            assert ak == hmac_sha256(key_bytes, b"\x06" + rand)[:6]
            assert suite.f5_star(k, rand) == hmac_sha256(key_bytes, b"\x07" + rand)[:6]

            fc = rng.randrange(256)
            params = tuple(rng.randbytes(rng.randrange(0, 24)) for _ in range(rng.randrange(0, 3)))
            assert kdf(key_bytes, KdfLabel(fc, params)) == hmac_sha256(key_bytes, kdf_s_string(fc, params))

            count, bearer, d = rng.randrange(1 << 32), rng.randrange(32), rng.randrange(2)
            cbd = count.to_bytes(4, "big") + bytes([(bearer << 1) | d])
            n = rng.randrange(0, 70)
            want = b"".join(
                hmac_sha256(key_bytes, b"\x10" + cbd + i.to_bytes(4, "big"))
                for i in range((n + 31) // 32)
            )[:n]
            assert keystream(key_bytes, count, bearer, d, n) == want
            msg = rng.randbytes(rng.randrange(0, 64))
            assert mac32(key_bytes, count, bearer, d, msg) == hmac_sha256(key_bytes, b"\x11" + cbd + msg)[:4]

            blob = rng.randbytes(rng.randrange(0, 120))
            import hashlib

            assert hashlib.sha256(blob).digest() == sha256(blob)


def test_criterion_10_determinism_including_partitions():
    with criterion(10, "trace and attack reports are bytewise reproducible"):
        cfg_dict = {
            "seed": 0xACCE970E,
            "phase": "phase1",
            "subscribers": [
                {"supi": "imsi-001019090000001", "k_bits": 128},
                {"supi": "imsi-001019090000002", "k_bits": 256, "suite": "ref256"},
            ],
            "attacker_script": [
                {"action": "replay", "message_type": "AuthRequest", "occurrence": 1, "to": "ue1"}
            ],
        }
        cfg_a = ScenarioConfig.from_dict(cfg_dict)
        cfg_b = ScenarioConfig.from_dict(cfg_dict)
        trace_a, trace_b = run_scenario(cfg_a), run_scenario(cfg_b)
        assert trace_a.to_jsonl().encode() == trace_b.to_jsonl().encode()

        true_key = cfg_a.subscriber_key(cfg_a.subscribers[0]).bytes_
        spec = EffectiveKeySpec.from_true_key(true_key, 14)
        intercept = extract_handshake_intercept(trace_a, cfg_a.sn_name.encode())
        reports = {
            handshake_key_recovery(intercept, spec, partitions=p).to_json()
            for p in (1, 2, 7)
        }
        assert len(reports) == 1  # single- and multi-partition runs byte-identical
        # and across kernel backends
        from aka5g.kernels import numba_available

        if numba_available():
            for backend in ("numpy", "numba"):
                assert handshake_key_recovery(intercept, spec, backend=backend).to_json() in reports
