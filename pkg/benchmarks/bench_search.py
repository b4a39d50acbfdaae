#!/usr/bin/env python3
"""Benchmark the key-search kernels: numba vs the pure-numpy fallback,
with a scalar hashlib loop as the honest-path reference rate.

Usage:
    python benchmarks/bench_search.py [--bits 16] [--chunk 16384]

The numba figure includes JIT warm-up on a tiny search first, so the
steady-state rate is what gets reported.
"""

import argparse
import time

from aka5g.attacks import EffectiveKeySpec, extract_handshake_intercept, handshake_key_recovery
from aka5g.config import ScenarioConfig, SubscriberConfig
from aka5g.crypto import SUITE_REF256, SecretKeyK
from aka5g.engine import Simulation
from aka5g.hierarchy import MigrationPhase
from aka5g.kernels import backend_name
from aka5g.vectors import derive_xres_star


def scalar_reference_rate(intercept, spec, sample=2048):
    """Candidates/second through the plain hashlib implementation."""
    started = time.perf_counter()
    for index in range(sample):
        key = SecretKeyK(spec.candidate(index))
        xres, ck, ik, _ = SUITE_REF256.f2345(key, intercept.rand)
        derive_xres_star(ck, ik, intercept.rand, xres, intercept.sn_name)
    return sample / (time.perf_counter() - started)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bits", type=int, default=16, help="effective key bits to search")
    parser.add_argument("--chunk", type=int, default=1 << 14, help="lanes per kernel call")
    args = parser.parse_args()

    cfg = ScenarioConfig(
        seed=0xBE7C4,
        phase=MigrationPhase.PHASE1,
        subscribers=[SubscriberConfig(supi="imsi-001010000424242")],
    )
    sim = Simulation(cfg)
    sim.run()
    true_key = cfg.subscriber_key(cfg.subscribers[0]).bytes_
    intercept = extract_handshake_intercept(sim.trace, cfg.sn_name.encode())
    spec = EffectiveKeySpec.from_true_key(true_key, args.bits)
    space = spec.space

    backends = ["numpy"]
    if backend_name() == "numba":  # honours AKA5G_NUMBA
        backends.insert(0, "numba")
        # warm the JIT outside the timed region
        handshake_key_recovery(
            intercept, EffectiveKeySpec.from_true_key(true_key, 8), backend="numba"
        )
    else:
        print("numba disabled or not importable; benchmarking the numpy fallback only")

    print(f"handshake search over 2^{args.bits} = {space} candidates, chunk {args.chunk}")
    print(f"{'backend':10s} {'seconds':>9s} {'cand/s':>12s} {'recovered':>10s}")
    rates = {}
    for backend in backends:
        started = time.perf_counter()
        report = handshake_key_recovery(
            intercept, spec, backend=backend, chunk=args.chunk
        )
        elapsed = time.perf_counter() - started
        rates[backend] = space / elapsed
        print(f"{backend:10s} {elapsed:9.2f} {space / elapsed:12.0f} {str(report.success):>10s}")

    ref = scalar_reference_rate(intercept, spec)
    print(f"{'hashlib':10s} {'':>9s} {ref:12.0f} {'(scalar reference, extrapolated)'}")
    if "numba" in rates:
        print(f"\nnumba speedup over numpy fallback: {rates['numba'] / rates['numpy']:.1f}x")
        print(f"numba speedup over scalar hashlib: {rates['numba'] / ref:.1f}x")


if __name__ == "__main__":
    main()
