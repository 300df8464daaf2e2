"""Factual agents: indicators, acquaintance networks and message handling."""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

from factnet.atn import CREATION, END, IndicatorVector
from factnet.fsf import FSF, ProximityScales, distance, proximity
from factnet.ontology import OntologyGraph, TaxonomyClass, classify


class AgentKind(str, enum.Enum):
    FIRE = "fire"
    BRIGADE = "fireBrigade"

    @property
    def taxonomy_class(self) -> TaxonomyClass:
        return TaxonomyClass.PHENOMENON if self is AgentKind.FIRE else TaxonomyClass.PERSON


class MessageKind(str, enum.Enum):
    FSF = "FSFMessage"
    AID = "AidMessage"
    AGRESSION = "AgressionMessage"


@dataclass(frozen=True)
class AgentMessage:
    """One ``inform`` message. ``recipient`` None means broadcast (expanded by the engine)."""

    kind: MessageKind
    sender: int
    payload: FSF | float
    cycle: int
    recipient: int | None = None

    def __post_init__(self):
        if self.kind is MessageKind.FSF:
            if not isinstance(self.payload, FSF):
                raise ValueError("FSFMessage payload must be an FSF")
        elif self.kind is MessageKind.AID:
            if not self.payload > 0:
                raise ValueError(f"AidMessage payload must be positive, got {self.payload!r}")
        elif not self.payload < 0:
            raise ValueError(f"AgressionMessage payload must be negative, got {self.payload!r}")


class Relation(str, enum.Enum):
    CLOSE = "close"
    OPPOSITE = "opposite"
    NEUTRAL = "neutral"


@dataclass
class AcquaintanceNetwork:
    close: dict[int, float] = field(default_factory=dict)
    opposite: dict[int, float] = field(default_factory=dict)

    def record(self, other: int, p: float) -> Relation:
        self.close.pop(other, None)
        self.opposite.pop(other, None)
        if p > 0:
            self.close[other] = p
            return Relation.CLOSE
        if p < 0:
            self.opposite[other] = p
            return Relation.OPPOSITE
        return Relation.NEUTRAL

    def forget(self, other: int) -> None:
        self.close.pop(other, None)
        self.opposite.pop(other, None)


@dataclass
class FactualAgent:
    id: int
    kind: AgentKind
    current_fsf: FSF
    alive_since: int
    previous_fsf: FSF | None = None
    atn_state: int = CREATION
    indicators: IndicatorVector | None = None
    indicator_history: list[IndicatorVector] = field(default_factory=list)
    acquaintances: AcquaintanceNetwork = field(default_factory=AcquaintanceNetwork)
    inbox: list[AgentMessage] = field(default_factory=list)
    # last FSF received from each peer; the acquaintance cache is derived from it
    peer_fsfs: dict[int, FSF] = field(default_factory=dict)
    received_net: float = 0.0
    discoveries: deque = field(default_factory=deque)
    fsf_changed: bool = True

    @property
    def alive(self) -> bool:
        return self.atn_state != END


def update_fsf(agent: FactualAgent, fsf: FSF) -> list[AgentMessage]:
    if fsf.key != agent.current_fsf.key:
        raise ValueError(f"agent {agent.id} carries {agent.current_fsf.key!r}, got FSF for {fsf.key!r}")
    if fsf.timestamp < agent.current_fsf.timestamp:
        raise ValueError(
            f"timestamp regression for agent {agent.id}: {fsf.timestamp} < {agent.current_fsf.timestamp}"
        )
    agent.previous_fsf = agent.current_fsf
    agent.current_fsf = fsf
    agent.fsf_changed = True
    return [AgentMessage(MessageKind.FSF, agent.id, fsf, fsf.timestamp)]


def compute_ai(
    agent: FactualAgent,
    graph: OntologyGraph,
    scales: ProximityScales,
    received_net: float = 0.0,
) -> float:
    """Self-consistency of the agent's last two FSFs, shifted by this cycle's aid and agression."""
    if agent.previous_fsf is None:
        base = 1.0
    else:
        base = proximity(agent.previous_fsf, agent.current_fsf, graph, scales)
    return min(1.0, max(-1.0, base + received_net))


def compute_pi_fire(burning_neighbors: int, fieryness: int, lifetime: int, nb_fire_brigades: int) -> float:
    if not 0 <= fieryness <= 8:
        raise ValueError(f"fieryness must lie in 0..8, got {fieryness!r}")
    if min(burning_neighbors, lifetime, nb_fire_brigades) < 0:
        raise ValueError("counts must be non-negative")
    y = (burning_neighbors + fieryness + lifetime) - nb_fire_brigades
    return 10.0 * math.exp(-0.05 * y)


def compute_pi_brigade(discovered: int, window: int) -> float:
    if window < 1:
        raise ValueError(f"window length must be >= 1, got {window!r}")
    return min(10.0, max(0.0, 10.0 * discovered / window))


def update_acquaintances(
    agent: FactualAgent,
    other: int,
    other_fsf: FSF,
    graph: OntologyGraph,
    scales: ProximityScales,
) -> Relation:
    if other == agent.id:
        raise ValueError("an agent is not its own acquaintance")
    return agent.acquaintances.record(other, proximity(agent.current_fsf, other_fsf, graph, scales))


def refresh_acquaintances(agent: FactualAgent, graph: OntologyGraph, scales: ProximityScales) -> None:
    """Recompute every cached entry after the agent's own FSF changed."""
    for other, fsf in agent.peer_fsfs.items():
        update_acquaintances(agent, other, fsf, graph, scales)


@dataclass(frozen=True)
class MessageEffect:
    kind: MessageKind
    sender: int
    relation: Relation | None = None
    first_contact: bool = False
    net_delta: float = 0.0


def handle_message(
    agent: FactualAgent,
    msg: AgentMessage,
    graph: OntologyGraph,
    scales: ProximityScales,
) -> MessageEffect:
    if msg.kind is MessageKind.FSF:
        first = msg.sender not in agent.peer_fsfs
        agent.peer_fsfs[msg.sender] = msg.payload
        relation = update_acquaintances(agent, msg.sender, msg.payload, graph, scales)
        return MessageEffect(msg.kind, msg.sender, relation, first_contact=first)
    value = float(msg.payload)
    if (msg.kind is MessageKind.AID) != (value > 0) or value == 0:
        raise ValueError(f"{msg.kind.value} with payload of wrong sign: {value!r}")
    agent.received_net += value
    return MessageEffect(msg.kind, msg.sender, net_delta=value)


def forget_peer(agent: FactualAgent, other: int) -> None:
    agent.peer_fsfs.pop(other, None)
    agent.acquaintances.forget(other)


def qualifier_int(fsf: FSF, name: str, default: int = 0) -> int:
    raw = fsf.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"qualifier {name}={raw!r} is not an integer") from None


def fire_pi_inputs(
    agent: FactualAgent,
    graph: OntologyGraph,
    cycle: int,
    neighbor_distance: float,
    brigade_distance: float,
) -> tuple[int, int, int, int]:
    """``(burningNeighbors, fieryness, lifeTime, nbFireBrigades)`` from what the agent knows."""
    burning = brigades = 0
    for fsf in agent.peer_fsfs.values():
        d = distance(agent.current_fsf, fsf)
        cls = classify(graph, fsf.key)
        if cls is TaxonomyClass.PHENOMENON and d <= neighbor_distance:
            if 0 < qualifier_int(fsf, "fieryness") < 8:
                burning += 1
        elif cls is TaxonomyClass.PERSON and d <= brigade_distance:
            brigades += 1
    fieryness = qualifier_int(agent.current_fsf, "fieryness")
    return burning, fieryness, cycle - agent.alive_since, brigades
