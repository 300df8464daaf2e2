"""Augmented transition networks driving factual-agent behaviour.

A network is a list of numbered states and guarded transitions. Each
transition carries a list of actions that are emitted atomically when it
fires. Outgoing transitions are tried in declaration order and the first
whose condition holds wins; templates declare progress (including death)
before regress.
"""
from __future__ import annotations

import enum
import math
import operator
from dataclasses import dataclass, field
from typing import Callable, Mapping

CREATION, ACTIVE, STRONG, END = 1, 2, 3, 4


@dataclass(frozen=True)
class IndicatorVector:
    ai: float
    pi: float

    def __post_init__(self):
        if not (math.isfinite(self.ai) and math.isfinite(self.pi)):
            raise ValueError(f"indicators must be finite, got {self!r}")

    def moved(self, other: IndicatorVector | None, tol: float = 1e-9) -> bool:
        if other is None:
            return True
        return abs(self.ai - other.ai) > tol or abs(self.pi - other.pi) > tol


class ActionKind(str, enum.Enum):
    SEND_AID = "SendAid"
    SEND_AGRESSION = "SendAgression"
    EMIT_NOTIFICATION = "EmitNotification"


@dataclass(frozen=True)
class ActionSpec:
    kind: ActionKind
    magnitude: float = 1.0

    def __post_init__(self):
        if not self.magnitude > 0:
            raise ValueError(f"action magnitude must be > 0, got {self.magnitude!r}")


class Always:
    def __call__(self, values: Mapping[str, float], cycle: int) -> bool:
        return True

    def __repr__(self) -> str:
        return "Always()"


_COMPARATORS: dict[str, Callable[[float, float], bool]] = {
    ">=": operator.ge,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    "==": operator.eq,
}


@dataclass(frozen=True)
class ThresholdCondition:
    """``values[indicator] <comparator> threshold``.

    ``indicator`` is ``"AI"``, ``"PI"`` or any observable the caller supplies
    (``fieryness``, ``hp``). ``schedule`` optionally maps the cycle number to the
    threshold in force, which is how time-varying thresholds plug in.
    """

    indicator: str
    comparator: str
    threshold: float
    schedule: Callable[[int], float] | None = None

    def __post_init__(self):
        if self.comparator not in _COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if not math.isfinite(self.threshold):
            raise ValueError(f"threshold must be finite, got {self.threshold!r}")

    def threshold_at(self, cycle: int) -> float:
        return self.threshold if self.schedule is None else self.schedule(cycle)

    def __call__(self, values: Mapping[str, float], cycle: int) -> bool:
        if self.indicator not in values:
            return False
        return _COMPARATORS[self.comparator](values[self.indicator], self.threshold_at(cycle))


@dataclass(frozen=True)
class AnyOf:
    conditions: tuple

    def __call__(self, values: Mapping[str, float], cycle: int) -> bool:
        return any(c(values, cycle) for c in self.conditions)


class TransitionKind(str, enum.Enum):
    PROGRESS = "progress"
    REGRESS = "regress"
    DEATH = "death"


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    condition: Callable[[Mapping[str, float], int], bool]
    actions: tuple[ActionSpec, ...] = ()
    kind: TransitionKind = TransitionKind.PROGRESS


@dataclass(frozen=True)
class ATN:
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial_state: int = CREATION
    _outgoing: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.states)
        if self.initial_state != 1:
            raise ValueError("initial state must be state 1 (Creation)")
        outgoing: dict[int, list[Transition]] = {i: [] for i in range(1, n + 1)}
        for t in self.transitions:
            if not (1 <= t.source <= n and 1 <= t.target <= n):
                raise ValueError(f"transition {t.source}->{t.target} references a missing state")
            outgoing[t.source].append(t)
        object.__setattr__(self, "_outgoing", {k: tuple(v) for k, v in outgoing.items()})

    def outgoing(self, state: int) -> tuple[Transition, ...]:
        try:
            return self._outgoing[state]
        except KeyError:
            raise ValueError(f"invalid state index {state!r}") from None


def step(
    atn: ATN,
    current: int,
    indicators: IndicatorVector,
    observables: Mapping[str, float] | None = None,
    cycle: int = 0,
) -> tuple[int, list[ActionSpec]]:
    values = {"AI": indicators.ai, "PI": indicators.pi}
    if observables:
        values.update(observables)
    for transition in atn.outgoing(current):
        if transition.condition(values, cycle):
            return transition.target, list(transition.actions)
    return current, []


@dataclass(frozen=True)
class ThresholdConfig:
    progress_ai: float
    regress_ai: float
    aid_magnitude: float = 0.1
    agression_magnitude: float = 0.1
    # cycle -> (progress, regress); None keeps the thresholds constant
    schedule: Callable[[int], tuple[float, float]] | None = None

    def __post_init__(self):
        for name in ("progress_ai", "regress_ai"):
            value = getattr(self, name)
            # AI is clamped to [-1, 1]; a threshold outside it could never fire
            if not (math.isfinite(value) and -1.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [-1, 1], got {value!r}")
        if self.regress_ai > self.progress_ai:
            raise ValueError("regress_ai must not exceed progress_ai")


FIRE_DEFAULTS = ThresholdConfig(progress_ai=0.6, regress_ai=0.3)
BRIGADE_DEFAULTS = ThresholdConfig(progress_ai=0.5, regress_ai=0.25)

STATE_NAMES = ("Creation", "Active", "Strong", "End")


def _four_state(config: ThresholdConfig, death) -> ATN:
    progress_schedule = regress_schedule = None
    if config.schedule is not None:
        sched = config.schedule
        progress_schedule = lambda cycle: sched(cycle)[0]  # noqa: E731
        regress_schedule = lambda cycle: sched(cycle)[1]  # noqa: E731
    progress = ThresholdCondition("AI", ">=", config.progress_ai, progress_schedule)
    regress = ThresholdCondition("AI", "<", config.regress_ai, regress_schedule)
    strike = (
        ActionSpec(ActionKind.SEND_AID, config.aid_magnitude),
        ActionSpec(ActionKind.SEND_AGRESSION, config.agression_magnitude),
    )
    return ATN(
        STATE_NAMES,
        (
            Transition(CREATION, ACTIVE, Always()),
            Transition(ACTIVE, END, death, kind=TransitionKind.DEATH),
            Transition(ACTIVE, STRONG, progress, strike),
            Transition(STRONG, END, death, kind=TransitionKind.DEATH),
            Transition(STRONG, ACTIVE, regress, kind=TransitionKind.REGRESS),
        ),
    )


def build_fire_atn(config: ThresholdConfig = FIRE_DEFAULTS) -> ATN:
    """Fire template: dies once the fire is extinguished (0) or burned out (8)."""
    dead = AnyOf((ThresholdCondition("fieryness", "<=", 0), ThresholdCondition("fieryness", ">=", 8)))
    return _four_state(config, dead)


def build_brigade_atn(config: ThresholdConfig = BRIGADE_DEFAULTS) -> ATN:
    """Fire-brigade template: dies when its hit points reach 0."""
    return _four_state(config, ThresholdCondition("hp", "<=", 0))

