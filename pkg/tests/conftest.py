import random

import pytest

from factnet.engine import Engine
from factnet.fsf import FSF
from factnet.ontology import load_ontology


@pytest.fixture(scope="session")
def graph():
    return load_ontology()


def fire(t, x=0.0, y=0.0, fieryness=2, site="building#1"):
    return FSF("fire", (("fieryness", str(fieryness)), ("site", site)), t, (x, y))


def brigade(t, x=0.0, y=0.0, unit="fb1", hp=10, action="move"):
    return FSF("fireBrigade", (("unit", unit), ("action", action), ("hp", str(hp)), ("target", "none")), t, (x, y))


KEYS = [("fire", "site"), ("explosion", "site"), ("flood", "site"), ("fireBrigade", "unit"), ("civilian", "unit")]


def random_population(graph, seed, cycles=100, max_agents=50, config=None):
    """Drive an engine with a random mixed stream, yielding it after every cycle.

    At most ``max_agents`` distinct objects are ever observed, so the live
    population never exceeds that bound.
    """
    rng = random.Random(seed)
    engine = Engine(graph, config) if config else Engine(graph)
    objects = []
    where = {}
    for t in range(cycles):
        batch = []
        if len(objects) < max_agents and rng.random() < 0.5:
            key, qual = rng.choice(KEYS)
            objects.append((key, f"o{len(objects)}", qual))
        for key, ident, qual in objects:
            if rng.random() >= 0.3:
                continue
            x, y = where.get(ident, (rng.uniform(0, 200), rng.uniform(0, 200)))
            x, y = x + rng.uniform(-15, 15), y + rng.uniform(-15, 15)
            where[ident] = (x, y)
            if qual == "site":
                extra = ("fieryness", str(rng.choice([1, 2, 3, 4, 5, 6, 7, 7, 0, 8])))
            else:
                extra = ("hp", str(0 if rng.random() < 0.05 else rng.choice([3, 5, 10])))
            batch.append(FSF(key, ((qual, ident), extra), t, (x, y)))
        engine.run_cycle(batch)
        yield engine


_VERDICTS: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict; failures are recorded before re-raising."""

    class Recorder:
        def __call__(self, number, title, detail=""):
            self.number, self.title, self.detail = number, title, detail
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            note = self.detail if exc_type is None else f"{exc_type.__name__}: {exc}".splitlines()[0]
            line = f"criterion {self.number} {verdict}: {self.title}" + (f" ({note})" if note else "")
            _VERDICTS.append(line)
            print(line)
            return False

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
