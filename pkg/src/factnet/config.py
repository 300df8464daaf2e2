"""Engine tunables and the ``engine-v1`` config document.

Precedence, lowest to highest: built-in defaults, the config document,
``--set key=value`` overrides on the command line.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

from factnet.atn import ThresholdConfig
from factnet.documents import Diagnostic, DocumentError, expect_header
from factnet.fsf import ProximityScales

HEADER = "engine-v1"


@dataclass(frozen=True)
class EngineConfig:
    time_decay: float = 0.2
    space_decay: float = 0.2
    # one city-block grid cell of the bundled scenario
    spatial_unit: float = 10.0
    fire_progress_ai: float = 0.6
    fire_regress_ai: float = 0.3
    brigade_progress_ai: float = 0.5
    brigade_regress_ai: float = 0.25
    aid_magnitude: float = 0.1
    agression_magnitude: float = 0.1
    # radii below are in spatial units (grid cells)
    neighbor_radius: float = 1.0
    brigade_radius: float = 3.0
    broadcast_radius: float | None = None
    pi_window: int = 10
    lateness_window: int = 5
    fire_identity: str = "site"
    brigade_identity: str = "unit"
    seed: int = 0

    def __post_init__(self):
        self.scales  # validates decays and unit
        for prefix in ("fire", "brigade"):
            try:
                getattr(self, f"{prefix}_thresholds")
            except ValueError as exc:
                raise ValueError(f"{prefix}_{exc}") from None
        for name in ("aid_magnitude", "agression_magnitude", "neighbor_radius", "brigade_radius"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.broadcast_radius is not None and not self.broadcast_radius > 0:
            raise ValueError("broadcast_radius must be positive or none")
        if self.pi_window < 1:
            raise ValueError("pi_window must be >= 1")
        if self.lateness_window < 0:
            raise ValueError("lateness_window must be >= 0")

    @property
    def scales(self) -> ProximityScales:
        return ProximityScales(self.time_decay, self.space_decay, self.spatial_unit)

    @property
    def fire_thresholds(self) -> ThresholdConfig:
        return ThresholdConfig(
            self.fire_progress_ai, self.fire_regress_ai, self.aid_magnitude, self.agression_magnitude
        )

    @property
    def brigade_thresholds(self) -> ThresholdConfig:
        return ThresholdConfig(
            self.brigade_progress_ai, self.brigade_regress_ai, self.aid_magnitude, self.agression_magnitude
        )


_SCALAR_FIELDS = {f.name: f for f in fields(EngineConfig)}


def _coerce(name: str, raw: str):
    f = _SCALAR_FIELDS.get(name)
    if f is None:
        raise ValueError(f"unknown config key {name!r}")
    target = f.type.replace(" ", "")
    try:
        if target == "int":
            return int(raw)
        if target == "float":
            return float(raw)
        if target == "float|None":
            return None if raw.lower() == "none" else float(raw)
    except ValueError:
        raise ValueError(f"{name}: expected {target}, got {raw!r}") from None
    return raw


def apply_overrides(config: EngineConfig, overrides: dict[str, str]) -> EngineConfig:
    """Return a copy of ``config`` with string-valued overrides type-checked and applied."""
    changes = {name: _coerce(name, raw) for name, raw in overrides.items()}
    try:
        return dataclasses.replace(config, **changes)
    except ValueError as exc:
        raise ValueError(str(exc)) from None


def parse_assignment(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise ValueError(f"override must look like key=value, got {text!r}")
    return name.strip(), value.strip()


def parse_engine_config(text: str) -> EngineConfig:
    lines = expect_header(text, HEADER)
    values: dict[str, str] = {}
    problems: list[Diagnostic] = []
    for number, line in lines:
        parts = line.split(None, 1)
        if len(parts) != 2:
            problems.append(Diagnostic(number, "expected '<key> <value>'"))
            continue
        try:
            _coerce(parts[0], parts[1])
        except ValueError as exc:
            problems.append(Diagnostic(number, str(exc)))
            continue
        values[parts[0]] = parts[1]
    if problems:
        raise DocumentError(problems)
    try:
        return apply_overrides(EngineConfig(), values)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


def serialize_engine_config(config: EngineConfig) -> str:
    out = [HEADER]
    for name in _SCALAR_FIELDS:
        value = getattr(config, name)
        out.append(f"{name} {'none' if value is None else value}")
    return "\n".join(out) + "\n"


def load_engine_config(path: str | Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    return parse_engine_config(Path(path).read_text(encoding="utf-8"))
