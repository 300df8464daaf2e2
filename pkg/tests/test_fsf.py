import math
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import fire
from factnet.fsf import (
    FSF,
    ProximityScales,
    parse_fsf,
    proximity,
    serialize_fsf,
    spatial_proximity,
    temporal_proximity,
)
from factnet.ontology import semantic_proximity

# mpmath, 40 digits: 4 e^-2 / (1 + e^-2)^2
P_T_10 = 0.4199743416140260694
UNIT = ProximityScales()


def test_temporal_identity_and_reference():
    assert temporal_proximity(0) == 1.0
    assert temporal_proximity(10) == pytest.approx(P_T_10, rel=0, abs=1e-12)
    assert temporal_proximity(1000) < 1e-8


def test_spatial_matches_temporal_and_normalises():
    assert spatial_proximity(0) == 1.0
    assert spatial_proximity(10, UNIT) == temporal_proximity(10, UNIT)
    assert spatial_proximity(5, ProximityScales(spatial_unit=5)) == spatial_proximity(1, UNIT)


def test_negative_differences_rejected():
    with pytest.raises(ValueError):
        temporal_proximity(-1)
    with pytest.raises(ValueError):
        spatial_proximity(-0.5)


@pytest.mark.parametrize("kwargs", [{"time_decay": 0}, {"space_decay": -1}, {"spatial_unit": 0}])
def test_scales_must_be_positive(kwargs):
    with pytest.raises(ValueError):
        ProximityScales(**kwargs)


def test_proximity_examples(graph):
    a = fire(0)
    assert proximity(a, a, graph) == 1.0
    b = fire(10)
    assert proximity(a, b, graph) == pytest.approx(P_T_10, abs=1e-9)
    road = FSF("road", (("id", "r1"),), 0, (0, 0))
    assert proximity(a, road, graph) == 0.0


def test_proximity_unknown_key(graph):
    with pytest.raises(KeyError):
        proximity(fire(0), FSF("tsunami", (("x", "y"),), 0, (0, 0)), graph)


def test_formula_matches_high_precision_oracle(graph):
    rng = random.Random(7)
    keys = list(graph.concepts)
    for _ in range(1000):
        dt = rng.uniform(0, 80)
        assert oracles.relative_error(temporal_proximity(dt), oracles.bell(0.2, dt)) <= 1e-9
        scales = ProximityScales(rng.uniform(0.01, 1), rng.uniform(0.01, 1), rng.uniform(0.5, 20))
        a = FSF(rng.choice(keys), (("q", "v"),), rng.randrange(0, 200), (rng.uniform(-50, 50), rng.uniform(-50, 50)))
        b = FSF(rng.choice(keys), (("q", "v"),), rng.randrange(0, 200), (rng.uniform(-50, 50), rng.uniform(-50, 50)))
        ref = oracles.proximity(semantic_proximity(graph, a.key, b.key), a.timestamp, b.timestamp, a.location,
                                b.location, scales.time_decay, scales.space_decay, scales.spatial_unit)
        assert oracles.relative_error(proximity(a, b, graph, scales), ref) <= 1e-9


grid = st.integers(0, 10_000).map(lambda i: i / 100)
nonneg = st.floats(0, 1e4, allow_nan=False)


@given(grid, grid)
def test_bells_strictly_decreasing(x, y):
    if x == y:
        return
    lo, hi = sorted((x, y))
    assert temporal_proximity(hi) < temporal_proximity(lo)
    assert spatial_proximity(hi) < spatial_proximity(lo)
    assert 0 < temporal_proximity(hi) <= 1


@given(nonneg, nonneg)
def test_bells_never_increase(x, y):
    lo, hi = sorted((x, y))
    assert temporal_proximity(hi) <= temporal_proximity(lo) <= 1.0
    assert (temporal_proximity(lo) == 1.0) <= (lo < 1e-6)


coords = st.floats(-200, 200, allow_nan=False)
fsfs = st.builds(
    lambda key, t, x, y: FSF(key, (("q", "v"),), t, (x, y)),
    st.sampled_from(["fire", "explosion", "flood", "fireBrigade", "civilian", "building", "road"]),
    st.integers(0, 500), coords, coords,
)


@given(fsfs, fsfs)
def test_symmetry_and_attenuation(graph, a, b):
    p = proximity(a, b, graph)
    assert p == proximity(b, a, graph)
    assert -1 <= p <= 1
    assert abs(p) <= abs(semantic_proximity(graph, a.key, b.key))


def test_parse_example():
    f = parse_fsf("fsf fire t=600 loc=(12.0,34.0) intensity=strong site=building#12")
    assert f == FSF("fire", (("intensity", "strong"), ("site", "building#12")), 600, (12.0, 34.0))


@pytest.mark.parametrize(
    "line",
    [
        "fsf fire t=600 loc=(0,0)",
        "fsf t=600 loc=(0,0) a=b",
        "fsf fire t=ten loc=(0,0) a=b",
        "fsf fire t=-3 loc=(0,0) a=b",
        "fsf fire t=1 loc=(0;0) a=b",
        "fsf fire t=1 loc=(x,0) a=b",
        "fsf fire t=1 loc=(0,0) a=",
        "fsf fire t=1 loc=(0,0) novalue",
        "event fire t=1 loc=(0,0) a=b",
    ],
)
def test_parse_rejects(line):
    with pytest.raises(ValueError):
        parse_fsf(line)


token = st.text(st.characters(min_codepoint=33, max_codepoint=126, blacklist_characters="=()"), min_size=1,
                max_size=8)
finite = st.floats(allow_nan=False, allow_infinity=False)
any_fsf = st.builds(
    lambda key, quals, t, x, y: FSF(key, tuple(quals), t, (x, y)),
    token,
    st.lists(st.tuples(token, st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=8)),
             min_size=1, max_size=4),
    st.integers(0, 10**6), finite, finite,
)


@given(any_fsf)
def test_serialize_parse_round_trip(f):
    line = serialize_fsf(f)
    assert parse_fsf(line) == f
    assert serialize_fsf(parse_fsf(line)) == line


def test_qualifier_lookup():
    f = fire(3, fieryness=5)
    assert f.get("fieryness") == "5"
    assert f.get("missing") is None
    assert math.isclose(f.location[0], 0.0)
