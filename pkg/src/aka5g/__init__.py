"""Deterministic desk-scale model of the 5G AKA security system, with a
post-quantum threat harness that runs the known attacks at reduced
effective key sizes and demonstrates the staged 256-bit migration.
"""

from .config import ScenarioConfig, SubscriberConfig
from .engine import Simulation, run_scenario
from .hierarchy import KeyContext, MigrationPhase, build_key_context
from .trace import Trace, lint_no_cleartext_supi

__version__ = "0.1.0"

__all__ = [
    "KeyContext",
    "MigrationPhase",
    "ScenarioConfig",
    "Simulation",
    "SubscriberConfig",
    "Trace",
    "build_key_context",
    "lint_no_cleartext_supi",
    "run_scenario",
]
