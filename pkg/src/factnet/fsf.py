"""Factual semantic features: the record of one observed fact and its proximity measure."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from factnet.ontology import OntologyGraph, semantic_proximity

_LINE = re.compile(
    r"^fsf\s+(?P<key>\S+)\s+t=(?P<t>\S+)\s+loc=\((?P<x>[^,()\s]+),(?P<y>[^,()\s]+)\)(?P<rest>.*)$"
)
_TOKEN = re.compile(r"^[^\s=]+$")


@dataclass(frozen=True)
class FSF:
    """``<key, (qualifier, value)+>`` stamped with a cycle and a 2-D location."""

    key: str
    qualifiers: tuple[tuple[str, str], ...]
    timestamp: int
    location: tuple[float, float]

    def __post_init__(self):
        if not _TOKEN.match(self.key or ""):
            raise ValueError(f"invalid FSF key {self.key!r}")
        if not self.qualifiers:
            raise ValueError("FSF needs at least one qualifier")
        for name, value in self.qualifiers:
            if not _TOKEN.match(name) or not value or any(ch.isspace() for ch in value):
                raise ValueError(f"invalid qualifier {name!r}={value!r}")
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int) or self.timestamp < 0:
            raise ValueError(f"timestamp must be a non-negative integer, got {self.timestamp!r}")
        x, y = self.location
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"location must be finite, got {self.location!r}")
        object.__setattr__(self, "location", (float(x), float(y)))

    def get(self, name: str, default: str | None = None) -> str | None:
        for qname, value in self.qualifiers:
            if qname == name:
                return value
        return default


@dataclass(frozen=True)
class ProximityScales:
    time_decay: float = 0.2
    space_decay: float = 0.2
    spatial_unit: float = 1.0

    def __post_init__(self):
        for name in ("time_decay", "space_decay", "spatial_unit"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")


def _bell(decay: float, delta: float) -> float:
    x = math.exp(-decay * delta)
    return 4.0 * x / (1.0 + x) ** 2


def temporal_proximity(dt: float, scales: ProximityScales = ProximityScales()) -> float:
    if dt < 0:
        raise ValueError(f"time difference must be non-negative, got {dt!r}")
    return _bell(scales.time_decay, dt)


def spatial_proximity(de: float, scales: ProximityScales = ProximityScales()) -> float:
    if de < 0:
        raise ValueError(f"distance must be non-negative, got {de!r}")
    return _bell(scales.space_decay, de / scales.spatial_unit)


def distance(a: FSF, b: FSF) -> float:
    return math.hypot(a.location[0] - b.location[0], a.location[1] - b.location[1])


def proximity(a: FSF, b: FSF, graph: OntologyGraph, scales: ProximityScales = ProximityScales()) -> float:
    """Semantic x temporal x spatial proximity; symmetric, sign of the semantic term."""
    ps = semantic_proximity(graph, a.key, b.key)
    pt = temporal_proximity(abs(a.timestamp - b.timestamp), scales)
    pe = spatial_proximity(distance(a, b), scales)
    return ps * pt * pe


def parse_fsf(text: str) -> FSF:
    """Parse ``fsf <key> t=<int> loc=(<x>,<y>) (<qualifier>=<value>)+``."""
    m = _LINE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed FSF line: {text.strip()!r}")
    try:
        timestamp = int(m["t"])
    except ValueError:
        raise ValueError(f"malformed timestamp {m['t']!r}") from None
    try:
        location = (float(m["x"]), float(m["y"]))
    except ValueError:
        raise ValueError(f"malformed coordinates ({m['x']},{m['y']})") from None
    qualifiers = []
    for token in m["rest"].split():
        name, sep, value = token.partition("=")
        if not sep or not name or not value:
            raise ValueError(f"malformed qualifier {token!r}")
        qualifiers.append((name, value))
    if not qualifiers:
        raise ValueError("FSF needs at least one qualifier")
    return FSF(m["key"], tuple(qualifiers), timestamp, location)


def serialize_fsf(fsf: FSF) -> str:
    quals = " ".join(f"{n}={v}" for n, v in fsf.qualifiers)
    x, y = fsf.location
    return f"fsf {fsf.key} t={fsf.timestamp} loc=({x!r},{y!r}) {quals}"
