"""Discrete-cycle scheduler for the representation MAS.

One call to :meth:`Engine.run_cycle` executes, in order:

1. ingest every incoming FSF (create or update the owning agent),
2. deliver pending bus messages to inboxes,
3. let every alive agent, in ascending id order, read its inbox, recompute
   indicators and step its ATN,
4. retire agents that reached the End state,
5. record :class:`CycleMetrics`.

Notifications produced while ingesting are delivered in phase 2 of the same
cycle; messages produced by ATN actions in phase 3 are delivered in phase 2 of
the next cycle.
"""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, fields
from typing import Iterable

from factnet.agent import (
    AgentKind,
    AgentMessage,
    FactualAgent,
    MessageKind,
    compute_ai,
    compute_pi_brigade,
    compute_pi_fire,
    fire_pi_inputs,
    forget_peer,
    handle_message,
    qualifier_int,
    refresh_acquaintances,
    update_fsf,
)
from factnet.atn import END, ActionKind, IndicatorVector, build_brigade_atn, build_fire_atn, step
from factnet.config import EngineConfig
from factnet.fsf import FSF, distance, parse_fsf, serialize_fsf
from factnet.ontology import OntologyGraph, TaxonomyClass, classify

KIND_BY_CLASS = {
    TaxonomyClass.PHENOMENON: AgentKind.FIRE,
    TaxonomyClass.PERSON: AgentKind.BRIGADE,
}


class RoutingError(ValueError):
    """An incoming FSF cannot be routed to an agent."""


class EnginePoisoned(RuntimeError):
    pass


@dataclass(frozen=True)
class CycleMetrics:
    cycle: int
    state_changes: int
    indicator_variations: int
    messages_sent: int
    activity: int
    perceived_fires: int
    alive_agents: int


CSV_HEADER = (
    "cycle",
    "stateChanges",
    "indicatorVariations",
    "messagesSent",
    "activity",
    "perceivedFires",
    "aliveAgents",
)


def metrics_to_csv(rows: Iterable[CycleMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m in rows:
        writer.writerow([getattr(m, f.name) for f in fields(CycleMetrics)])
    return buf.getvalue()


def metrics_from_csv(text: str) -> list[CycleMetrics]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValueError(f"unexpected metrics header {header!r}")
    return [CycleMetrics(*map(int, row)) for row in reader if row]


@dataclass(frozen=True)
class AgentRecord:
    id: int
    kind: str
    atn_state: int
    alive: bool
    ai: float | None
    pi: float | None
    fsf: FSF
    close: tuple[int, ...]
    opposite: tuple[int, ...]


def _record_doc(r: AgentRecord) -> dict:
    # field by field: asdict would deep-copy the nested FSF only to discard it
    return {
        "id": r.id, "kind": r.kind, "atn_state": r.atn_state, "alive": r.alive, "ai": r.ai, "pi": r.pi,
        "fsf": serialize_fsf(r.fsf), "close": list(r.close), "opposite": list(r.opposite),
    }


@dataclass(frozen=True)
class Snapshot:
    """State at the end of ``cycle`` (None before the first cycle has run)."""

    cycle: int | None
    agents: tuple[AgentRecord, ...]

    def to_json(self) -> str:
        doc = {
            "format": "snapshot-v1",
            "cycle": self.cycle,
            "agents": [_record_doc(r) for r in self.agents],
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Snapshot:
        doc = json.loads(text)
        if doc.get("format") != "snapshot-v1":
            raise ValueError("not a snapshot-v1 document")
        records = []
        for r in doc["agents"]:
            records.append(AgentRecord(
                r["id"], r["kind"], r["atn_state"], r["alive"], r["ai"], r["pi"],
                parse_fsf(r["fsf"]), tuple(r["close"]), tuple(r["opposite"]),
            ))
        return cls(doc["cycle"], tuple(records))


class Engine:
    def __init__(self, graph: OntologyGraph, config: EngineConfig | None = None):
        self.graph = graph
        self.config = config or EngineConfig()
        self.scales = self.config.scales
        self.atns = {
            AgentKind.FIRE: build_fire_atn(self.config.fire_thresholds),
            AgentKind.BRIGADE: build_brigade_atn(self.config.brigade_thresholds),
        }
        self.identity_qualifier = {
            AgentKind.FIRE: self.config.fire_identity,
            AgentKind.BRIGADE: self.config.brigade_identity,
        }
        self.agents: dict[int, FactualAgent] = {}
        self.retired: dict[int, FactualAgent] = {}
        self.cycle = 0
        self.bus: list[AgentMessage] = []
        self.metrics_log: list[CycleMetrics] = []
        # send-cycle -> counts, used to audit message conservation
        self.message_ledger: dict[int, dict[str, int]] = defaultdict(lambda: {"sent": 0, "delivered": 0, "dropped": 0})
        self._identity: dict[tuple[str, str], int] = {}
        self._next_id = 1
        self._sent = 0
        self._poisoned: BaseException | None = None

    # -- routing ---------------------------------------------------------

    def _route(self, fsf: FSF) -> tuple[AgentKind, tuple[str, str]]:
        low = self.cycle - self.config.lateness_window
        if not low <= fsf.timestamp <= self.cycle:
            raise RoutingError(
                f"FSF at t={fsf.timestamp} outside the accepted window [{low}, {self.cycle}]"
            )
        try:
            cls = classify(self.graph, fsf.key)
        except KeyError as exc:
            raise RoutingError(exc.args[0]) from None
        kind = KIND_BY_CLASS.get(cls)
        if kind is None:
            raise RoutingError(f"no agent kind registered for {fsf.key!r} ({cls.value})")
        qualifier = self.identity_qualifier[kind]
        ident = fsf.get(qualifier)
        if ident is None:
            raise RoutingError(f"FSF for {fsf.key!r} lacks identity qualifier {qualifier!r}")
        return kind, (fsf.key, ident)

    def ingest(self, fsf: FSF) -> str:
        kind, identity = self._route(fsf)
        existing = self._identity.get(identity)
        if existing is not None:
            agent = self.agents[existing]
            for msg in update_fsf(agent, fsf):
                self._broadcast(agent, msg)
            return "updated"
        agent = FactualAgent(self._next_id, kind, fsf, alive_since=self.cycle)
        self._next_id += 1
        peers = list(self.agents.values())
        self.agents[agent.id] = agent
        self._identity[identity] = agent.id
        self._broadcast(agent, AgentMessage(MessageKind.FSF, agent.id, fsf, self.cycle))
        # peers introduce themselves so the newcomer's network starts complete
        for peer in peers:
            if self._in_range(peer.current_fsf, fsf):
                self._send(AgentMessage(MessageKind.FSF, peer.id, peer.current_fsf, self.cycle, agent.id))
        return "created"

    # -- messaging -------------------------------------------------------

    def _in_range(self, a: FSF, b: FSF) -> bool:
        radius = self.config.broadcast_radius
        return radius is None or distance(a, b) <= radius * self.config.spatial_unit

    def _send(self, msg: AgentMessage) -> None:
        self.bus.append(msg)
        self.message_ledger[msg.cycle]["sent"] += 1
        self._sent += 1

    def _broadcast(self, sender: FactualAgent, msg: AgentMessage) -> None:
        for other_id, other in self.agents.items():
            if other_id != sender.id and self._in_range(sender.current_fsf, other.current_fsf):
                self._send(AgentMessage(msg.kind, msg.sender, msg.payload, self.cycle, other_id))

    def _deliver(self) -> None:
        pending, self.bus = self.bus, []
        for msg in pending:
            recipient = self.agents.get(msg.recipient)
            if recipient is None:
                self.message_ledger[msg.cycle]["dropped"] += 1
            else:
                recipient.inbox.append(msg)
                self.message_ledger[msg.cycle]["delivered"] += 1

    # -- per-agent pipeline ----------------------------------------------

    def _process(self, agent: FactualAgent) -> tuple[bool, bool]:
        cfg = self.config
        agent.received_net = 0.0
        for msg in agent.inbox:
            effect = handle_message(agent, msg, self.graph, self.scales)
            if (
                agent.kind is AgentKind.BRIGADE
                and effect.first_contact
                and classify(self.graph, msg.payload.key) is TaxonomyClass.PHENOMENON
                and distance(agent.current_fsf, msg.payload) <= cfg.brigade_radius * cfg.spatial_unit
            ):
                agent.discoveries.append(self.cycle)
        agent.inbox.clear()
        if agent.fsf_changed:
            refresh_acquaintances(agent, self.graph, self.scales)
            agent.fsf_changed = False

        ai = compute_ai(agent, self.graph, self.scales, agent.received_net)
        if agent.kind is AgentKind.FIRE:
            inputs = fire_pi_inputs(
                agent, self.graph, self.cycle,
                cfg.neighbor_radius * cfg.spatial_unit, cfg.brigade_radius * cfg.spatial_unit,
            )
            pi = compute_pi_fire(*inputs)
            observables = {"fieryness": inputs[1]}
        else:
            while agent.discoveries and self.cycle - agent.discoveries[0] >= cfg.pi_window:
                agent.discoveries.popleft()
            pi = compute_pi_brigade(len(agent.discoveries), cfg.pi_window)
            observables = {"hp": qualifier_int(agent.current_fsf, "hp", default=1)}
        vector = IndicatorVector(ai, pi)
        varied = vector.moved(agent.indicators)
        agent.indicators = vector
        agent.indicator_history.append(vector)

        new_state, actions = step(self.atns[agent.kind], agent.atn_state, vector, observables, self.cycle)
        changed = new_state != agent.atn_state
        agent.atn_state = new_state
        for action in actions:
            if action.kind is ActionKind.SEND_AID:
                for other in sorted(agent.acquaintances.close):
                    self._send(AgentMessage(MessageKind.AID, agent.id, action.magnitude, self.cycle, other))
            elif action.kind is ActionKind.SEND_AGRESSION:
                for other in sorted(agent.acquaintances.opposite):
                    self._send(AgentMessage(MessageKind.AGRESSION, agent.id, -action.magnitude, self.cycle, other))
            else:
                self._broadcast(agent, AgentMessage(MessageKind.FSF, agent.id, agent.current_fsf, self.cycle))
        return changed, varied

    def _retire(self) -> None:
        dead = [aid for aid, a in self.agents.items() if a.atn_state == END]
        for aid in dead:
            agent = self.agents.pop(aid)
            self.retired[aid] = agent
            self._identity.pop(self._route_key(agent), None)
        for aid in dead:
            for other in self.agents.values():
                forget_peer(other, aid)

    def _route_key(self, agent: FactualAgent) -> tuple[str, str]:
        return agent.current_fsf.key, agent.current_fsf.get(self.identity_qualifier[agent.kind])

    # -- public API ------------------------------------------------------

    def run_cycle(self, incoming: Iterable[FSF] = ()) -> CycleMetrics:
        if self._poisoned is not None:
            raise EnginePoisoned(f"engine stopped after an earlier fault: {self._poisoned!r}")
        incoming = list(incoming)
        for fsf in incoming:
            self._route(fsf)  # reject bad input before anything mutates
        try:
            self._sent = 0
            for fsf in incoming:
                self.ingest(fsf)
            self._deliver()
            state_changes = variations = 0
            for aid in sorted(self.agents):
                changed, varied = self._process(self.agents[aid])
                state_changes += changed
                variations += varied
            self._retire()
            fires = sum(1 for a in self.agents.values() if a.kind is AgentKind.FIRE)
            metrics = CycleMetrics(
                cycle=self.cycle,
                state_changes=state_changes,
                indicator_variations=variations,
                messages_sent=self._sent,
                activity=state_changes + variations + self._sent,
                perceived_fires=fires,
                alive_agents=len(self.agents),
            )
            self.metrics_log.append(metrics)
            self.cycle += 1
            return metrics
        except Exception as exc:
            self._poisoned = exc
            raise

    def snapshot(self) -> Snapshot:
        records = []
        everyone = {**self.retired, **self.agents}
        for aid in sorted(everyone):
            a = everyone[aid]
            records.append(AgentRecord(
                id=a.id,
                kind=a.kind.value,
                atn_state=a.atn_state,
                alive=aid in self.agents,
                ai=None if a.indicators is None else a.indicators.ai,
                pi=None if a.indicators is None else a.indicators.pi,
                fsf=a.current_fsf,
                close=tuple(sorted(a.acquaintances.close)),
                opposite=tuple(sorted(a.acquaintances.opposite)),
            ))
        return Snapshot(self.cycle - 1 if self.metrics_log else None, tuple(records))

    def activity_series(self) -> list[CycleMetrics]:
        return list(self.metrics_log)


def snapshot(engine: Engine) -> Snapshot:
    return engine.snapshot()


def activity_series(engine: Engine) -> list[CycleMetrics]:
    return engine.activity_series()
