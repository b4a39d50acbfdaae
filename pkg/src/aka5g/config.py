"""Scenario configuration: JSON schema, validation and key-material
derivation shared by the simulator and the threat harness.

Everything a run needs (subscriber keys, home key pair, per-auth RAND
values, SUCI randomness, GUTIs) derives deterministically from the config
seed, so ground truth is re-derivable from the config alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .constants import SCHEME_ECIES_X25519
from .crypto import SecretKeyK, suite_by_name
from .errors import ConfigError
from .hierarchy import MigrationPhase
from .seeds import det_bytes

__all__ = ["SubscriberConfig", "AttackerDirective", "TrafficItem", "ScenarioConfig"]

DEFAULT_SN_NAME = "5G:simnet-001"

_REGISTRATION_MODES = ("suci", "guti", "stale-guti")


@dataclass(frozen=True)
class SubscriberConfig:
    supi: str
    k_bits: int = 128
    suite: str = "ref128"
    registration: str = "suci"  # "suci" | "guti" (preassigned) | "stale-guti"


@dataclass(frozen=True)
class AttackerDirective:
    """One scripted attacker action executed by the in-run tap.

    action "replay": re-deliver the nth captured air message of
    ``message_type`` to entity ``to``. action "inject": deliver raw
    ``payload_hex`` to ``to``. action "drop": swallow the nth air message
    of ``message_type`` in transit.
    """

    action: str
    message_type: str = ""
    occurrence: int = 1
    to: str = ""
    payload_hex: str = ""
    spoof_as: str = ""  # radio endpoint to impersonate (replay/inject)


@dataclass(frozen=True)
class TrafficItem:
    """Post-authentication protected traffic to emit."""

    ue: str  # ue label, e.g. "ue0"
    stratum: str = "UP"
    direction: str = "uplink"
    payload_hex: str = ""  # empty -> default payload


@dataclass
class ScenarioConfig:
    seed: int
    phase: MigrationPhase
    subscribers: list[SubscriberConfig]
    home_key_scheme: int = SCHEME_ECIES_X25519
    merged_errors: bool = False
    sn_name: str = DEFAULT_SN_NAME
    attacker_script: list[AttackerDirective] = field(default_factory=list)
    traffic: list[TrafficItem] | None = None  # None -> one default UP PDU per UE

    # -- key material (pure functions of the config) --------------------

    def subscriber_key(self, sub: SubscriberConfig) -> SecretKeyK:
        return SecretKeyK(det_bytes(self.seed, "subscriber-k", sub.supi, n=sub.k_bits // 8))

    def subscriber_sqn_start(self, sub: SubscriberConfig) -> int:
        # a small nonzero starting SQN per subscriber, varied for realism
        return int.from_bytes(det_bytes(self.seed, "sqn0", sub.supi, n=3), "big")

    def home_keypair_seed(self) -> bytes:
        return det_bytes(self.seed, "home-keypair", self.home_key_scheme, n=32)

    def ue_label(self, index: int) -> str:
        return f"ue{index}"

    def subscriber_by_label(self, label: str) -> SubscriberConfig:
        for i, sub in enumerate(self.subscribers):
            if self.ue_label(i) == label:
                return sub
        raise ConfigError(f"no subscriber with label {label!r}", "subscribers")

    def labels(self) -> list[str]:
        return [self.ue_label(i) for i in range(len(self.subscribers))]

    # -- validation / IO -------------------------------------------------

    def validate(self) -> None:
        if not self.subscribers:
            raise ConfigError("at least one subscriber required", "subscribers")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must fit in 64 bits", "seed")
        seen = set()
        for i, sub in enumerate(self.subscribers):
            loc = f"subscribers[{i}]"
            if not sub.supi:
                raise ConfigError("supi must be non-empty", f"{loc}.supi")
            if len(sub.supi.encode()) > 64:
                raise ConfigError("supi exceeds 64 bytes", f"{loc}.supi")
            if sub.supi in seen:
                raise ConfigError(f"duplicate supi {sub.supi!r}", f"{loc}.supi")
            seen.add(sub.supi)
            if sub.k_bits not in (128, 256):
                raise ConfigError("k_bits must be 128 or 256", f"{loc}.k_bits")
            if not self.phase.allows_k_bits(sub.k_bits):
                raise ConfigError(
                    f"subscriber {sub.supi!r}: {sub.k_bits}-bit K not allowed in "
                    f"{self.phase.value}",
                    f"{loc}.k_bits",
                )
            suite = suite_by_name(sub.suite)  # raises ValueError for unknown names
            if sub.k_bits == 256 and sub.suite == "ref128":
                raise ConfigError(
                    "suite ref128 cannot hold a 256-bit K", f"{loc}.suite"
                )
            del suite
            if sub.registration not in _REGISTRATION_MODES:
                raise ConfigError(
                    f"registration must be one of {_REGISTRATION_MODES}",
                    f"{loc}.registration",
                )
        if not 0 <= self.home_key_scheme <= 0xFF:
            raise ConfigError("home_key_scheme must be a single byte", "home_key_scheme")
        for i, item in enumerate(self.traffic or ()):
            loc = f"traffic[{i}]"
            if item.ue not in self.labels():
                raise ConfigError(f"unknown ue label {item.ue!r}", f"{loc}.ue")
            if item.stratum not in ("NAS", "RRC", "UP"):
                raise ConfigError("stratum must be NAS, RRC or UP", f"{loc}.stratum")
            if item.direction not in ("uplink", "downlink"):
                raise ConfigError("direction must be uplink or downlink", f"{loc}.direction")
            if item.payload_hex:
                try:
                    bytes.fromhex(item.payload_hex)
                except ValueError:
                    raise ConfigError("payload_hex is not valid hex", f"{loc}.payload_hex")
        air_side = set(self.labels()) | {"seaf"}
        for i, d in enumerate(self.attacker_script):
            loc = f"attacker_script[{i}]"
            if d.action not in ("replay", "inject", "drop"):
                raise ConfigError("action must be replay, inject or drop", f"{loc}.action")
            if d.action in ("replay", "drop") and not d.message_type:
                raise ConfigError("message_type required", f"{loc}.message_type")
            if d.action in ("replay", "inject") and not d.to:
                raise ConfigError("target entity required", f"{loc}.to")
            # the attacker sits on the radio link; the serving<->home leg
            # is out of its reach
            if d.to and d.to not in air_side:
                raise ConfigError(
                    f"attacker can only reach the air link, not {d.to!r}", f"{loc}.to"
                )
            if d.spoof_as and d.spoof_as not in air_side:
                raise ConfigError(f"unknown spoof label {d.spoof_as!r}", f"{loc}.spoof_as")
            if d.occurrence < 1:
                raise ConfigError("occurrence is 1-based", f"{loc}.occurrence")

    @classmethod
    def from_dict(cls, obj: dict) -> "ScenarioConfig":
        def need(key, typ, loc=""):
            if key not in obj:
                raise ConfigError(f"missing required field {key!r}", loc or key)
            val = obj[key]
            if not isinstance(val, typ):
                raise ConfigError(f"{key} must be {typ.__name__}", loc or key)
            return val

        seed = need("seed", int)
        phase_name = need("phase", str)
        try:
            phase = MigrationPhase(phase_name)
        except ValueError:
            raise ConfigError(
                f"unknown phase {phase_name!r}; valid: "
                f"{[p.value for p in MigrationPhase]}",
                "phase",
            )
        subs_raw = need("subscribers", list)
        subscribers = []
        for i, s in enumerate(subs_raw):
            if not isinstance(s, dict):
                raise ConfigError("subscriber entries must be objects", f"subscribers[{i}]")
            unknown = set(s) - {"supi", "k_bits", "suite", "registration"}
            if unknown:
                raise ConfigError(f"unknown fields {sorted(unknown)}", f"subscribers[{i}]")
            subscribers.append(
                SubscriberConfig(
                    supi=s.get("supi", ""),
                    k_bits=s.get("k_bits", 128),
                    suite=s.get("suite", "ref256" if s.get("k_bits", 128) == 256 else "ref128"),
                    registration=s.get("registration", "suci"),
                )
            )
        script = []
        for i, d in enumerate(obj.get("attacker_script", [])):
            if not isinstance(d, dict):
                raise ConfigError("directives must be objects", f"attacker_script[{i}]")
            script.append(
                AttackerDirective(
                    action=d.get("action", ""),
                    message_type=d.get("message_type", ""),
                    occurrence=d.get("occurrence", 1),
                    to=d.get("to", ""),
                    payload_hex=d.get("payload_hex", ""),
                    spoof_as=d.get("spoof_as", ""),
                )
            )
        traffic = None
        if "traffic" in obj:
            traffic = [
                TrafficItem(
                    ue=t.get("ue", ""),
                    stratum=t.get("stratum", "UP"),
                    direction=t.get("direction", "uplink"),
                    payload_hex=t.get("payload_hex", ""),
                )
                for t in obj["traffic"]
            ]
        cfg = cls(
            seed=seed,
            phase=phase,
            subscribers=subscribers,
            home_key_scheme=obj.get("home_key_scheme", SCHEME_ECIES_X25519),
            merged_errors=bool(obj.get("merged_errors", False)),
            sn_name=obj.get("sn_name", DEFAULT_SN_NAME),
            attacker_script=script,
            traffic=traffic,
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}", str(path))
        if not isinstance(obj, dict):
            raise ConfigError("top-level config must be an object", str(path))
        return cls.from_dict(obj)
