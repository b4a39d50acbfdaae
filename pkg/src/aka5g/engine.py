"""Protocol engine: USIM/ME, SEAF, AUSF and ARPF state machines exchanging
messages over a deterministic in-order bus, with an attacker tap.

The simulation loop is single-threaded; every run is a pure function of
(config, seed). The UE<->SEAF leg is the "air" link the attacker can read,
drop, replay onto and inject into; the serving<->home leg is modelled as
secure. SEAF and AMF are one entity here, as they are co-located anyway.

Radio addressing: the SEAF correlates an authentication transaction with
the sending radio endpoint (the UE label), never with a claimed identity;
spoofed injections therefore land in the spoofed endpoint's transaction,
which is exactly what makes the replay attacks meaningful.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .config import ScenarioConfig, SubscriberConfig, TrafficItem
from .constants import DIRECTION_DOWNLINK, DIRECTION_UPLINK, GUTI_LEN
from .crypto import suite_by_name
from .errors import IntegrityError, ReplayError, StateError
from .hierarchy import KeyContext, build_key_context
from .identity import (
    Guti,
    GutiDirectory,
    SchemeRegistry,
    Suci,
    Supi,
    conceal_supi,
    default_registry,
    reveal_suci,
)
from .messages import (
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
    Message,
    ProtectedPdu,
    RegistrationRequest,
    ServingAvResponse,
    SyncFailureMsg,
    pack,
    unpack,
)
from .seeds import det_bytes, det_rng
from .session import SessionChannel
from .trace import Trace, TraceRecord
from .vectors import (
    MacFailure,
    SubscriberRecord,
    SyncFailure,
    UsimState,
    UsimSuccess,
    generate_he_av,
    hxres_star_from,
    me_compute_response,
    reduce_to_serving_av,
    usim_process_challenge,
)

__all__ = ["Simulation", "run_scenario", "HOME_NETWORK_ID"]

HOME_NETWORK_ID = b"hn0"

Outgoing = list[tuple[str, Message]]


def _default_up_payload(label: str) -> bytes:
    return f"UP-PDU from {label} seq 00000001".encode()


def _make_channels(ctx: KeyContext) -> dict[str, SessionChannel]:
    return {
        "NAS": SessionChannel("NAS", ctx.nas_enc, ctx.nas_int),
        "RRC": SessionChannel("RRC", ctx.rrc_enc, ctx.rrc_int),
        "UP": SessionChannel("UP", ctx.up_enc, ctx.up_int),
    }


class UserEquipment:
    """USIM plus ME for one subscription."""

    def __init__(self, sim: "Simulation", label: str, sub: SubscriberConfig):
        cfg = sim.config
        self.sim = sim
        self.label = label
        self.sub = sub
        self.supi = Supi(sub.supi.encode(), HOME_NETWORK_ID)
        self.usim = UsimState(
            key=cfg.subscriber_key(sub),
            suite=suite_by_name(sub.suite),
            sqn_ms=cfg.subscriber_sqn_start(sub),
            home_public_key=sim.home_public_key,
        )
        self.phase = cfg.phase
        self.sn_name = cfg.sn_name.encode()
        self.merged_errors = cfg.merged_errors
        self.guti: Guti | None = None
        self.key_context: KeyContext | None = None
        self.channels: dict[str, SessionChannel] = {}
        self.reg_index = 0
        if sub.registration == "guti":
            self.guti = Guti(det_bytes(cfg.seed, "preassigned-guti", sub.supi, n=GUTI_LEN))
        elif sub.registration == "stale-guti":
            self.guti = Guti(det_bytes(cfg.seed, "stale-guti", sub.supi, n=GUTI_LEN))

    # -- registration ----------------------------------------------------

    def registration_message(self) -> RegistrationRequest:
        if self.guti is not None:
            return RegistrationRequest(self.guti)
        return RegistrationRequest(self._fresh_suci())

    def _fresh_suci(self) -> Suci:
        randomness = det_bytes(
            self.sim.config.seed, "suci-randomness", self.sub.supi, self.reg_index, n=32
        )
        self.reg_index += 1
        return conceal_supi(
            self.supi,
            self.sim.home_public_key,
            self.sim.config.home_key_scheme,
            randomness,
            self.sim.registry,
        )

    # -- message handling -------------------------------------------------

    def step(self, sender: str, msg: Message) -> Outgoing:
        if isinstance(msg, IdentityRequest):
            # GUTI was not resolvable; fall back to a fresh SUCI
            self.guti = None
            return [("seaf", RegistrationRequest(self._fresh_suci()))]
        if isinstance(msg, AuthRequest):
            return self._handle_challenge(msg)
        if isinstance(msg, ProtectedPdu):
            self._handle_protected(msg)
            return []
        self.sim.emit_event(self.label, "unexpected_message", type=type(msg).__name__)
        return []

    def _handle_challenge(self, msg: AuthRequest) -> Outgoing:
        result = usim_process_challenge(self.usim, msg.rand, msg.autn)
        if isinstance(result, MacFailure):
            failure: Message = AuthFailureMsg() if self.merged_errors else MacFailureMsg()
            return [("seaf", failure)]
        if isinstance(result, SyncFailure):
            failure = AuthFailureMsg() if self.merged_errors else SyncFailureMsg(result.auts)
            return [("seaf", failure)]
        assert isinstance(result, UsimSuccess)
        res_star, _k_ausf, k_seaf = me_compute_response(
            result.ck, result.ik, result.res, msg.rand, msg.autn, self.sn_name
        )
        ctx = build_key_context(k_seaf, self.supi.value, self.phase)
        self.key_context = ctx.without_anchor()  # K_SEAF deleted once K_AMF exists
        self.channels = _make_channels(self.key_context)
        return [("seaf", AuthResponse(res_star))]

    def _handle_protected(self, pdu: ProtectedPdu) -> None:
        channel = self.channels.get(pdu.stratum)
        if channel is None:
            self.sim.emit_event(self.label, "no_session", stratum=pdu.stratum)
            return
        try:
            plaintext = channel.unprotect(pdu)
        except ReplayError:
            self.sim.emit_event(self.label, "replay_error", stratum=pdu.stratum)
            return
        except IntegrityError:
            self.sim.emit_event(self.label, "integrity_error", stratum=pdu.stratum)
            return
        inner = None
        if pdu.stratum == "NAS":
            try:
                inner = unpack(plaintext)
            except ValueError:
                inner = None  # opaque NAS payload, not a wrapped message
        if isinstance(inner, GutiAssignment):
            self.guti = inner.guti
            self.sim.emit_event(self.label, "guti_stored")
        else:
            self.sim.emit_event(self.label, "pdu_ok", stratum=pdu.stratum)

    def send_traffic(self, item: TrafficItem) -> Outgoing:
        payload = bytes.fromhex(item.payload_hex) if item.payload_hex else _default_up_payload(self.label)
        channel = self.channels.get(item.stratum)
        if channel is None:
            raise StateError(f"{self.label} has no {item.stratum} session")
        return [("seaf", channel.protect(payload, DIRECTION_UPLINK))]


@dataclass
class _SeafTransaction:
    ue_label: str
    stage: str  # "identity" | "av" | "response" | "confirm"
    rand: bytes = b""
    autn_bytes: bytes = b""
    hxres_star: bytes = b""


class Seaf:
    """Serving-network anchor (SEAF/AMF combined)."""

    def __init__(self, sim: "Simulation"):
        cfg = sim.config
        self.sim = sim
        self.label = "seaf"
        self.sn_name = cfg.sn_name.encode()
        self.phase = cfg.phase
        self.directory = GutiDirectory()
        self.contexts: dict[str, KeyContext] = {}
        self.channels: dict[str, dict[str, SessionChannel]] = {}
        self.supi_by_ue: dict[str, Supi] = {}
        self._guti_rng = det_rng(cfg.seed, "guti-alloc")
        self._by_ue: dict[str, _SeafTransaction] = {}
        self._awaiting_av: deque[str] = deque()
        self._awaiting_result: deque[str] = deque()

    def step(self, sender: str, msg: Message) -> Outgoing:
        if isinstance(msg, RegistrationRequest):
            return self._handle_registration(sender, msg)
        if isinstance(msg, ServingAvResponse):
            return self._handle_serving_av(msg)
        if isinstance(msg, AuthResponse):
            return self._handle_auth_response(sender, msg)
        if isinstance(msg, AuthResult):
            return self._handle_auth_result(msg)
        if isinstance(msg, (MacFailureMsg, SyncFailureMsg, AuthFailureMsg)):
            return self._handle_auth_failure(sender, msg)
        if isinstance(msg, ProtectedPdu):
            self._handle_protected(sender, msg)
            return []
        self.sim.emit_event(self.label, "unexpected_message", type=type(msg).__name__)
        return []

    def _handle_registration(self, sender: str, msg: RegistrationRequest) -> Outgoing:
        if isinstance(msg.identity, Suci):
            self._by_ue[sender] = _SeafTransaction(sender, "av")
            self._awaiting_av.append(sender)
            return [("ausf", AvRequest(msg.identity, self.sn_name))]
        supi = self.directory.resolve(msg.identity)
        if supi is None:
            # unresolvable GUTI: ask the UE to identify itself with a SUCI
            self._by_ue[sender] = _SeafTransaction(sender, "identity")
            return [(sender, IdentityRequest())]
        self._by_ue[sender] = _SeafTransaction(sender, "av")
        self._awaiting_av.append(sender)
        return [("ausf", AvRequest(supi, self.sn_name))]

    def _handle_serving_av(self, msg: ServingAvResponse) -> Outgoing:
        if not self._awaiting_av:
            self.sim.emit_event(self.label, "unexpected_message", type="ServingAvResponse")
            return []
        ue_label = self._awaiting_av.popleft()
        tx = self._by_ue[ue_label]
        tx.stage = "response"
        tx.rand, tx.autn_bytes, tx.hxres_star = msg.rand, msg.autn_bytes, msg.hxres_star
        return [(ue_label, AuthRequest(msg.rand, msg.autn_bytes))]

    def _handle_auth_response(self, sender: str, msg: AuthResponse) -> Outgoing:
        tx = self._by_ue.get(sender)
        if tx is None or tx.stage != "response":
            self.sim.emit_event(self.label, "unexpected_message", type="AuthResponse", ue=sender)
            return []
        if hxres_star_from(tx.rand, msg.res_star) != tx.hxres_star:
            self.sim.emit_event(self.label, "auth_failed_hxres", ue=sender)
            del self._by_ue[sender]
            return []
        tx.stage = "confirm"
        self._awaiting_result.append(sender)
        return [("ausf", AuthConfirm(msg.res_star))]

    def _handle_auth_result(self, msg: AuthResult) -> Outgoing:
        if not self._awaiting_result:
            self.sim.emit_event(self.label, "unexpected_message", type="AuthResult")
            return []
        ue_label = self._awaiting_result.popleft()
        self._by_ue.pop(ue_label, None)
        if not msg.success:
            self.sim.emit_event(self.label, "auth_rejected", ue=ue_label)
            return []
        supi = Supi(msg.supi_value, HOME_NETWORK_ID)
        ctx = build_key_context(msg.k_seaf, supi.value, self.phase)
        self.contexts[ue_label] = ctx.without_anchor()  # K_SEAF deleted
        self.channels[ue_label] = _make_channels(self.contexts[ue_label])
        self.supi_by_ue[ue_label] = supi
        self.directory.mark_authenticated(supi)
        self.sim.emit_event(self.label, "auth_success", ue=ue_label)
        self.sim.auth_successes += 1
        guti = self.directory.assign(supi, self._guti_rng.randbytes)
        pdu = self.channels[ue_label]["NAS"].protect(
            pack(GutiAssignment(guti)), DIRECTION_DOWNLINK
        )
        return [(ue_label, pdu)]

    def _handle_auth_failure(self, sender: str, msg: Message) -> Outgoing:
        tx = self._by_ue.pop(sender, None)
        kind = type(msg).__name__
        if tx is None:
            self.sim.emit_event(self.label, "unexpected_message", type=kind, ue=sender)
        else:
            self.sim.emit_event(self.label, "auth_failed", ue=sender, message=kind)
        return []

    def _handle_protected(self, sender: str, pdu: ProtectedPdu) -> None:
        chans = self.channels.get(sender)
        if chans is None or pdu.stratum not in chans:
            self.sim.emit_event(self.label, "no_session", ue=sender, stratum=pdu.stratum)
            return
        try:
            chans[pdu.stratum].unprotect(pdu)
        except ReplayError:
            self.sim.emit_event(self.label, "replay_error", ue=sender, stratum=pdu.stratum)
            return
        except IntegrityError:
            self.sim.emit_event(self.label, "integrity_error", ue=sender, stratum=pdu.stratum)
            return
        self.sim.emit_event(self.label, "pdu_ok", ue=sender, stratum=pdu.stratum)

    def send_traffic(self, ue_label: str, item: TrafficItem) -> Outgoing:
        payload = bytes.fromhex(item.payload_hex) if item.payload_hex else b"NAS keepalive 0001"
        chans = self.channels.get(ue_label)
        if chans is None:
            raise StateError(f"no session for {ue_label}")
        return [(ue_label, chans[item.stratum].protect(payload, DIRECTION_DOWNLINK))]


class Ausf:
    """Home-network authentication server: turns HE AVs into serving AVs,
    holds K_SEAF back until it has checked RES*, enforces AV single use."""

    def __init__(self, sim: "Simulation"):
        self.sim = sim
        self.label = "ausf"
        self.sn_name = sim.config.sn_name.encode()
        self._stored: deque[dict] = deque()

    def step(self, sender: str, msg: Message) -> Outgoing:
        if isinstance(msg, AvRequest):
            return [("arpf", msg)]
        if isinstance(msg, AvResponse):
            return self._handle_av(msg)
        if isinstance(msg, AuthConfirm):
            return self._handle_confirm(msg)
        self.sim.emit_event(self.label, "unexpected_message", type=type(msg).__name__)
        return []

    def _handle_av(self, msg: AvResponse) -> Outgoing:
        from .vectors import HeAV

        he = HeAV(msg.rand, msg.autn, msg.xres_star, msg.k_ausf)
        serving = reduce_to_serving_av(he, self.sn_name)
        self._stored.append(
            {
                "xres_star": msg.xres_star,
                "k_seaf": serving.k_seaf,
                "supi_value": msg.supi_value,
                "used": False,
            }
        )
        return [("seaf", ServingAvResponse(serving.rand, serving.autn.to_bytes(), serving.hxres_star))]

    def _handle_confirm(self, msg: AuthConfirm) -> Outgoing:
        if not self._stored:
            self.sim.emit_event(self.label, "unexpected_message", type="AuthConfirm")
            return []
        entry = self._stored.popleft()
        ok = (not entry["used"]) and entry["xres_star"] == msg.res_star
        entry["used"] = True
        if not ok:
            return [("seaf", AuthResult(False))]
        return [("seaf", AuthResult(True, entry["k_seaf"], entry["supi_value"]))]


class Arpf:
    """Home credential repository: subscriber database, home key pair,
    HE AV generation."""

    def __init__(self, sim: "Simulation"):
        cfg = sim.config
        self.sim = sim
        self.label = "arpf"
        self.sn_name = cfg.sn_name.encode()
        self.home_private_key = sim.home_private_key
        self.records: dict[bytes, SubscriberRecord] = {}
        self._auth_index: dict[bytes, int] = {}
        for sub in cfg.subscribers:
            record = SubscriberRecord(
                supi=sub.supi,
                key=cfg.subscriber_key(sub),
                suite=suite_by_name(sub.suite),
                sqn=cfg.subscriber_sqn_start(sub),
            )
            self.records[sub.supi.encode()] = record
            self._auth_index[sub.supi.encode()] = 0

    def step(self, sender: str, msg: Message) -> Outgoing:
        if not isinstance(msg, AvRequest):
            self.sim.emit_event(self.label, "unexpected_message", type=type(msg).__name__)
            return []
        if isinstance(msg.identity, Suci):
            supi_value = reveal_suci(msg.identity, self.home_private_key, self.sim.registry).value
        else:
            supi_value = msg.identity.value
        record = self.records.get(supi_value)
        if record is None:
            self.sim.emit_event(self.label, "unknown_subscriber")
            return []
        index = self._auth_index[supi_value]
        self._auth_index[supi_value] = index + 1
        rand = det_bytes(self.sim.config.seed, "rand", record.supi, index, n=16)
        he = generate_he_av(record, rand, msg.sn_name)
        return [
            (
                "ausf",
                AvResponse(he.rand, he.autn.to_bytes(), he.xres_star, he.k_ausf, supi_value),
            )
        ]


class Simulation:
    """One deterministic world: entities, bus, trace and attacker tap."""

    def __init__(self, config: ScenarioConfig, registry: SchemeRegistry | None = None):
        config.validate()
        self.config = config
        self.registry = registry or default_registry()
        scheme = self.registry.get(config.home_key_scheme)
        self.home_private_key, self.home_public_key = scheme.generate_keypair(
            config.home_keypair_seed()
        )
        self.trace = Trace()
        self.auth_successes = 0
        self._step_counter = 0
        self._queue: deque[tuple[str, str, Message, str | None]] = deque()
        self._drop_rules: dict[tuple[str, int], bool] = {}
        self._type_counts: dict[str, int] = {}

        self.ues: dict[str, UserEquipment] = {}
        for i, sub in enumerate(config.subscribers):
            label = config.ue_label(i)
            self.ues[label] = UserEquipment(self, label, sub)
        self.seaf = Seaf(self)
        self.ausf = Ausf(self)
        self.arpf = Arpf(self)
        self._entities: dict[str, object] = {**self.ues, "seaf": self.seaf, "ausf": self.ausf, "arpf": self.arpf}

        for i, sub in enumerate(config.subscribers):
            if sub.registration == "guti":
                ue = self.ues[config.ue_label(i)]
                # carried over from a prior session in this serving network
                self.seaf.directory.seed_mapping(ue.supi, ue.guti)
        for d in config.attacker_script:
            if d.action == "drop":
                self._drop_rules[(d.message_type, d.occurrence)] = True

    # -- trace helpers ----------------------------------------------------

    @staticmethod
    def _link_for(sender: str, receiver: str) -> str:
        air_parties = {"seaf", "attacker"}
        if sender.startswith("ue") or receiver.startswith("ue"):
            return "air"
        if sender in air_parties and receiver in air_parties:
            return "air"
        return "core"

    def emit_event(self, entity: str, name: str, **info) -> None:
        self.trace.append(
            TraceRecord(
                i=len(self.trace),
                step=self._step_counter,
                link="none",
                sender=entity,
                receiver="",
                msg_type="Event",
                payload_hex="",
                notes={"event": name, **info},
            )
        )

    def _log_message(self, sender, receiver, msg: Message, notes: dict) -> None:
        self.trace.append(
            TraceRecord(
                i=len(self.trace),
                step=self._step_counter,
                link=self._link_for(sender, receiver),
                sender=sender,
                receiver=receiver,
                msg_type=type(msg).__name__,
                payload_hex=pack(msg).hex(),
                notes=notes,
            )
        )

    # -- bus ---------------------------------------------------------------

    def send(self, sender: str, receiver: str, msg: Message, spoof_as: str | None = None) -> None:
        self._queue.append((sender, receiver, msg, spoof_as))

    def pump(self) -> None:
        while self._queue:
            sender, receiver, msg, spoof_as = self._queue.popleft()
            self._step_counter += 1
            link = self._link_for(sender, receiver)
            notes: dict = {}
            if spoof_as:
                notes["as"] = spoof_as
            kind = type(msg).__name__
            if link == "air":
                count = self._type_counts.get(kind, 0) + 1
                self._type_counts[kind] = count
                if self._drop_rules.pop((kind, count), None):
                    notes["dropped"] = True
                    self._log_message(sender, receiver, msg, notes)
                    continue
            self._log_message(sender, receiver, msg, notes)
            entity = self._entities.get(receiver)
            if entity is None:
                continue  # addressed to the attacker: observed, not processed
            effective_sender = spoof_as or sender
            for to, out in entity.step(effective_sender, msg):
                self.send(receiver, to, out)

    # -- scenario driving ---------------------------------------------------

    def register(self, ue_label: str) -> None:
        ue = self.ues[ue_label]
        self.send(ue_label, "seaf", ue.registration_message())
        self.pump()

    def authenticate(self, ue_label: str) -> KeyContext | None:
        """One full registration/authentication cycle for a UE."""
        self.register(ue_label)
        return self.seaf.contexts.get(ue_label)

    def run_traffic(self, item: TrafficItem) -> None:
        if item.direction == "uplink":
            for to, msg in self.ues[item.ue].send_traffic(item):
                self.send(item.ue, to, msg)
        else:
            for to, msg in self.seaf.send_traffic(item.ue, item):
                self.send("seaf", to, msg)
        self.pump()

    def run(self) -> Trace:
        """Honest registrations and traffic, then scripted attacker actions."""
        for label in self.config.labels():
            self.register(label)
        traffic = self.config.traffic
        if traffic is None:
            traffic = [TrafficItem(ue=label) for label in self.config.labels()]
        for item in traffic:
            self.run_traffic(item)
        for directive in self.config.attacker_script:
            self._run_directive(directive)
        return self.trace

    # -- attacker ----------------------------------------------------------

    def _run_directive(self, d) -> None:
        if d.action == "drop":
            return  # consumed as messages transit
        if d.action == "replay":
            matches = self.trace.messages(d.message_type, link="air")
            if len(matches) < d.occurrence:
                self.emit_event("attacker", "replay_no_match", type=d.message_type)
                return
            payload = matches[d.occurrence - 1].payload
            self.send("attacker", d.to, unpack(payload), spoof_as=d.spoof_as or None)
            self.pump()
            return
        if d.action == "inject":
            try:
                msg = unpack(bytes.fromhex(d.payload_hex))
            except ValueError as exc:
                self.emit_event("attacker", "malformed_injection", error=str(exc))
                return
            self.send("attacker", d.to, msg)
            self.pump()

    def inject(self, to: str, msg: Message, spoof_as: str | None = None) -> None:
        """Deliver an attacker-crafted message on the air link."""
        self.send("attacker", to, msg, spoof_as=spoof_as)
        self.pump()

    def attacker_probe(self, ue_label: str, msg: Message) -> list[Message]:
        """Deliver ``msg`` to a UE while impersonating the network, and
        capture the UE's radio response instead of forwarding it.

        This is the man-in-the-middle position the replay attacks assume:
        the SEAF never sees the probe, so serving-network state is
        untouched no matter how many probes run.
        """
        self._step_counter += 1
        self._log_message("attacker", ue_label, msg, {"probe": True})
        replies: list[Message] = []
        for _to, out in self.ues[ue_label].step("attacker", msg):
            self._step_counter += 1
            self._log_message(ue_label, "attacker", out, {"probe": True})
            replies.append(out)
        return replies


def run_scenario(config: ScenarioConfig, registry: SchemeRegistry | None = None) -> Trace:
    """Execute a scenario end to end and return its trace."""
    return Simulation(config, registry).run()
