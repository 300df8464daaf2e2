"""A small fire / fire-brigade world that emits FSF event streams.

The grid stands in for a city: each cell is a building, some flammable.
Fires carry an integer fieryness (1-7 burning, 0 extinguished, 8 burned
out) and spread to flammable 4-neighbours with a fixed probability per
burning neighbour per cycle. Brigades greedily head for the nearest burning
fire, ties broken by lowest cell index, and knock its fieryness down once
adjacent.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from factnet.documents import Diagnostic, DocumentError, expect_header
from factnet.fsf import FSF, parse_fsf, serialize_fsf

SCENARIO_HEADER = "scenario-v1"
STREAM_HEADER = "fsf-stream-v1"
BURNED_OUT = 8

Cell = tuple[int, int]


@dataclass(frozen=True)
class ScriptedEvent:
    cycle: int
    action: str
    cell: Cell


@dataclass(frozen=True)
class ScenarioConfig:
    width: int = 24
    height: int = 24
    cell_size: float = 10.0
    flammable_fraction: float = 0.8
    spread_probability: float = 0.1
    growth_period: int = 4
    ignitions: tuple[Cell, ...] = ((6, 6),)
    brigades: int = 6
    station: Cell = (12, 12)
    brigade_speed: int = 1
    extinguish_power: int = 2
    hit_points: int = 40
    hp_loss: int = 1
    total_cycles: int = 100
    events: tuple[ScriptedEvent, ...] = ()
    seed: int = 0

    def validate(self) -> None:
        def fail(name, rule):
            raise ValueError(f"{name}: {rule}")

        if self.width < 1 or self.height < 1:
            fail("width" if self.width < 1 else "height", "must be >= 1")
        if not self.cell_size > 0:
            fail("cell_size", "must be > 0")
        for name in ("flammable_fraction", "spread_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                fail(name, f"must lie in [0, 1], got {getattr(self, name)!r}")
        for name in ("growth_period", "brigade_speed", "extinguish_power"):
            if getattr(self, name) < 1:
                fail(name, "must be >= 1")
        for name in ("brigades", "hit_points", "hp_loss", "total_cycles"):
            if getattr(self, name) < 0:
                fail(name, "must be >= 0")
        for cell in (*self.ignitions, self.station):
            if not self.in_grid(cell):
                fail("ignite" if cell in self.ignitions else "station", f"cell {cell} outside the grid")
        for ev in self.events:
            if ev.action != "ignite":
                fail("event", f"unknown action {ev.action!r}")
            if not 0 <= ev.cycle < self.total_cycles:
                fail("event", f"cycle {ev.cycle} outside the run length {self.total_cycles}")
            if not self.in_grid(ev.cell):
                fail("event", f"cell {ev.cell} outside the grid")

    def in_grid(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def index(self, cell: Cell) -> int:
        return cell[1] * self.width + cell[0]


@dataclass
class Fire:
    fieryness: int = 1
    clock: int = 0

    @property
    def burning(self) -> bool:
        return 0 < self.fieryness < BURNED_OUT


@dataclass
class Brigade:
    unit: str
    position: Cell
    hit_points: int
    action: str = "idle"
    target: Cell | None = None


@dataclass
class WorldState:
    config: ScenarioConfig
    flammable: list[list[bool]]
    fires: dict[Cell, Fire]
    brigades: dict[str, Brigade]
    rng: random.Random
    cycle: int = 0
    emitted: dict = field(default_factory=dict)

    def burning_cells(self) -> list[Cell]:
        return sorted((c for c, f in self.fires.items() if f.burning), key=self.config.index)


def new_world(config: ScenarioConfig) -> WorldState:
    config.validate()
    rng = random.Random(config.seed)
    flammable = [[rng.random() < config.flammable_fraction for _ in range(config.width)]
                 for _ in range(config.height)]
    fires = {}
    for cell in config.ignitions:
        flammable[cell[1]][cell[0]] = True
        fires[cell] = Fire()
    brigades = {
        f"fb{i}": Brigade(f"fb{i}", config.station, config.hit_points)
        for i in range(1, config.brigades + 1)
    }
    return WorldState(config, flammable, fires, brigades, rng)


def _chebyshev(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _toward(src: Cell, dst: Cell) -> Cell:
    dx = (dst[0] > src[0]) - (dst[0] < src[0])
    dy = (dst[1] > src[1]) - (dst[1] < src[1])
    return src[0] + dx, src[1] + dy


def _act_brigades(world: WorldState) -> None:
    cfg = world.config
    for unit in sorted(world.brigades, key=lambda u: int(u[2:])):
        b = world.brigades[unit]
        if b.hit_points == 0:
            b.action, b.target = "dead", None
            continue
        burning = world.burning_cells()
        if not burning:
            b.action, b.target = "idle", None
            continue
        target = min(burning, key=lambda c: (abs(c[0] - b.position[0]) + abs(c[1] - b.position[1]), cfg.index(c)))
        b.target = target
        if _chebyshev(b.position, target) <= 1:
            fire = world.fires[target]
            fire.fieryness = max(0, fire.fieryness - cfg.extinguish_power)
            b.action = "extinguish"
            continue
        for _ in range(cfg.brigade_speed):
            if _chebyshev(b.position, target) <= 1:
                break
            b.position = _toward(b.position, target)
        b.action = "move"
    for b in world.brigades.values():
        if b.hit_points == 0:
            continue
        hot = any(
            f.fieryness >= 5 and f.burning and _chebyshev(b.position, c) <= 1
            for c, f in world.fires.items()
        )
        if hot:
            b.hit_points = max(0, b.hit_points - cfg.hp_loss)


def _grow_and_spread(world: WorldState) -> None:
    cfg = world.config
    for cell in world.burning_cells():
        fire = world.fires[cell]
        fire.clock += 1
        if fire.clock >= cfg.growth_period:
            fire.fieryness += 1
            fire.clock = 0
    lit: list[Cell] = []
    for cell in world.burning_cells():
        x, y = cell
        for nb in ((x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)):
            if not cfg.in_grid(nb) or nb in world.fires or nb in lit or not world.flammable[nb[1]][nb[0]]:
                continue
            if world.rng.random() < cfg.spread_probability:
                lit.append(nb)
    for nb in lit:
        world.fires[nb] = Fire()


def _location(cfg: ScenarioConfig, cell: Cell) -> tuple[float, float]:
    return float(cell[0] * cfg.cell_size), float(cell[1] * cfg.cell_size)


def _emit(world: WorldState) -> list[FSF]:
    cfg = world.config
    out: list[FSF] = []
    for cell in sorted(world.fires, key=cfg.index):
        f = world.fires[cell].fieryness
        if world.emitted.get(("fire", cell)) != f:
            world.emitted[("fire", cell)] = f
            quals = (("fieryness", str(f)), ("site", f"building#{cfg.index(cell)}"))
            out.append(FSF("fire", quals, world.cycle, _location(cfg, cell)))
    for unit in sorted(world.brigades, key=lambda u: int(u[2:])):
        b = world.brigades[unit]
        observed = (b.position, b.action, b.hit_points, b.target)
        if world.emitted.get(("brigade", unit)) != observed:
            world.emitted[("brigade", unit)] = observed
            target = "none" if b.target is None else f"building#{cfg.index(b.target)}"
            quals = (("unit", unit), ("action", b.action), ("hp", str(b.hit_points)), ("target", target))
            out.append(FSF("fireBrigade", quals, world.cycle, _location(cfg, b.position)))
    return out


def step_world(world: WorldState, config: ScenarioConfig | None = None) -> list[FSF]:
    """Advance one cycle and return the FSFs describing what changed."""
    cfg = config or world.config
    if world.cycle >= cfg.total_cycles:
        raise ValueError(f"cannot step past total_cycles={cfg.total_cycles}")
    if world.cycle > 0:
        _act_brigades(world)
        _grow_and_spread(world)
    for ev in cfg.events:
        if ev.cycle == world.cycle:
            world.flammable[ev.cell[1]][ev.cell[0]] = True
            world.fires[ev.cell] = Fire()
    emitted = _emit(world)
    world.cycle += 1
    return emitted


def run_scenario(config: ScenarioConfig) -> list[tuple[int, list[FSF]]]:
    world = new_world(config)
    return [(world.cycle, step_world(world)) for _ in range(config.total_cycles)]


def generate_scenario(config: ScenarioConfig) -> str:
    return serialize_stream(run_scenario(config))


def serialize_stream(cycles: list[tuple[int, list[FSF]]]) -> str:
    out = [STREAM_HEADER]
    for cycle, fsfs in cycles:
        out.append(f"cycle {cycle}")
        out.extend(serialize_fsf(f) for f in fsfs)
    return "\n".join(out) + "\n"


def parse_stream(text: str) -> list[tuple[int, list[FSF]]]:
    cycles: list[tuple[int, list[FSF]]] = []
    problems: list[Diagnostic] = []
    for number, line in expect_header(text, STREAM_HEADER):
        if line.startswith("cycle"):
            parts = line.split()
            try:
                if len(parts) != 2:
                    raise ValueError
                k = int(parts[1])
            except ValueError:
                problems.append(Diagnostic(number, f"malformed cycle marker {line!r}"))
                continue
            if cycles and k <= cycles[-1][0]:
                problems.append(Diagnostic(number, f"cycle {k} does not follow cycle {cycles[-1][0]}"))
                continue
            cycles.append((k, []))
        elif line.startswith("fsf"):
            if not cycles:
                problems.append(Diagnostic(number, "FSF line before the first cycle marker"))
                continue
            try:
                cycles[-1][1].append(parse_fsf(line))
            except ValueError as exc:
                problems.append(Diagnostic(number, str(exc)))
        else:
            problems.append(Diagnostic(number, f"unrecognized line {line!r}"))
    if problems:
        raise DocumentError(problems)
    return cycles


def _cell(text: str) -> Cell:
    x, sep, y = text.partition(",")
    if not sep:
        raise ValueError(f"expected a cell 'x,y', got {text!r}")
    return int(x), int(y)


_INT_FIELDS = ("width", "height", "growth_period", "brigades", "brigade_speed", "extinguish_power",
               "hit_points", "hp_loss", "total_cycles", "seed")
_FLOAT_FIELDS = ("cell_size", "flammable_fraction", "spread_probability")


def parse_scenario_config(text: str) -> ScenarioConfig:
    values: dict = {}
    ignitions: list[Cell] = []
    events: list[ScriptedEvent] = []
    problems: list[Diagnostic] = []
    for number, line in expect_header(text, SCENARIO_HEADER):
        parts = line.split()
        name, args = parts[0], parts[1:]
        try:
            if name in _INT_FIELDS or name in _FLOAT_FIELDS:
                if len(args) != 1:
                    raise ValueError(f"{name}: expected exactly one value")
                conv = int if name in _INT_FIELDS else float
                try:
                    values[name] = conv(args[0])
                except ValueError:
                    raise ValueError(f"{name}: expected {conv.__name__}, got {args[0]!r}") from None
            elif name == "ignite":
                ignitions.extend(_cell(a) for a in args)
            elif name == "station":
                values["station"] = _cell(args[0])
            elif name == "event":
                if len(args) != 3:
                    raise ValueError("event: expected 'event <cycle> ignite <x,y>'")
                events.append(ScriptedEvent(int(args[0]), args[1], _cell(args[2])))
            else:
                raise ValueError(f"unknown field {name!r}")
        except (ValueError, IndexError) as exc:
            problems.append(Diagnostic(number, str(exc) or f"malformed line {line!r}"))
    if problems:
        raise DocumentError(problems)
    if ignitions:
        values["ignitions"] = tuple(ignitions)
    config = ScenarioConfig(**values, events=tuple(events))
    try:
        config.validate()
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    return config


def serialize_scenario_config(config: ScenarioConfig) -> str:
    out = [SCENARIO_HEADER]
    for name in ("width", "height", "cell_size", "flammable_fraction", "spread_probability", "growth_period"):
        out.append(f"{name} {getattr(config, name)}")
    out.extend(f"ignite {x},{y}" for x, y in config.ignitions)
    out.append(f"station {config.station[0]},{config.station[1]}")
    for name in ("brigades", "brigade_speed", "extinguish_power", "hit_points", "hp_loss", "total_cycles", "seed"):
        out.append(f"{name} {getattr(config, name)}")
    out.extend(f"event {e.cycle} {e.action} {e.cell[0]},{e.cell[1]}" for e in config.events)
    return "\n".join(out) + "\n"


def load_scenario_config(path: str | Path | None = None) -> ScenarioConfig:
    if path is None:
        text = resources.files("factnet.data").joinpath("fire.scenario").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_scenario_config(text)


def fire_counts(cycles: list[tuple[int, list[FSF]]]) -> list[int]:
    """Burning-fire count per cycle, reconstructed from the stream alone."""
    state: dict[str, int] = {}
    counts = []
    for _, fsfs in cycles:
        for f in fsfs:
            if f.key == "fire":
                state[f.get("site")] = int(f.get("fieryness"))
        counts.append(sum(1 for v in state.values() if 0 < v < BURNED_OUT))
    return counts
