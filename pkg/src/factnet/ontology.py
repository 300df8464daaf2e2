"""Taxonomy of observable objects and the ontological proximity graph."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from factnet.documents import Diagnostic, DocumentError, expect_header

HEADER = "ontology-v1"


class Family(str, enum.Enum):
    CONCRETE = "concrete"
    VIRTUAL = "virtual"


class TaxonomyClass(str, enum.Enum):
    ELEMENT = "Element"
    PERSON = "Person"
    GROUP = "Group"
    PHENOMENON = "Phenomenon"
    ACTION = "Action"
    MESSAGE = "Message"

    @property
    def family(self) -> Family:
        if self in (TaxonomyClass.ELEMENT, TaxonomyClass.PERSON, TaxonomyClass.GROUP):
            return Family.CONCRETE
        return Family.VIRTUAL


@dataclass(frozen=True)
class Concept:
    id: str
    taxonomy_class: TaxonomyClass
    label: str = ""


def _pair(a: str, b: str) -> frozenset[str]:
    return frozenset((a, b))


@dataclass(frozen=True)
class OntologyGraph:
    """Concepts plus signed, symmetric, pre-fixed proximities in ``[-1, 1]``.

    Only stored edges are consulted. Nothing here assumes the values form a
    metric, so triangle-inequality violations are legal.
    """

    concepts: dict[str, Concept]
    # insertion-ordered so serialisation reproduces the source document
    edges: dict[frozenset[str], tuple[str, str, float]] = field(default_factory=dict)

    def __contains__(self, concept_id: object) -> bool:
        return concept_id in self.concepts

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise KeyError(f"unknown concept {concept_id!r}") from None

    def pairs(self):
        """Iterate every unordered pair of concept ids, including self pairs."""
        ids = list(self.concepts)
        for i, a in enumerate(ids):
            for b in ids[i:]:
                yield a, b


def build_graph(concepts, edges=()) -> OntologyGraph:
    """Construct a validated graph from ``Concept`` objects and ``(a, b, value)`` triples."""
    by_id: dict[str, Concept] = {}
    for c in concepts:
        if c.id in by_id:
            raise ValueError(f"duplicate concept id {c.id!r}")
        by_id[c.id] = c
    stored: dict[frozenset[str], tuple[str, str, float]] = {}
    for a, b, value in edges:
        _check_edge(by_id, stored, a, b, float(value))
        stored[_pair(a, b)] = (a, b, float(value))
    return OntologyGraph(by_id, stored)


def _check_edge(concepts, stored, a: str, b: str, value: float) -> None:
    for cid in (a, b):
        if cid not in concepts:
            raise ValueError(f"edge references unknown concept {cid!r}")
    if not math.isfinite(value) or not -1.0 <= value <= 1.0:
        raise ValueError(f"proximity out of range [-1, 1]: {value!r}")
    if a == b and value != 1.0:
        raise ValueError(f"self-proximity of {a!r} must be 1, got {value!r}")
    if _pair(a, b) in stored:
        raise ValueError(f"duplicate proximity entry for ({a}, {b})")


def semantic_proximity(graph: OntologyGraph, a: str, b: str) -> float:
    graph.concept(a)
    graph.concept(b)
    if a == b:
        return 1.0
    edge = graph.edges.get(_pair(a, b))
    return 0.0 if edge is None else edge[2]


def classify(graph: OntologyGraph, key: str) -> TaxonomyClass:
    return graph.concept(key).taxonomy_class


def parse_ontology(text: str) -> OntologyGraph:
    """Parse an ``ontology-v1`` document, collecting every line-level problem."""
    lines = expect_header(text, HEADER)
    concepts: dict[str, Concept] = {}
    edges: dict[frozenset[str], tuple[str, str, float]] = {}
    problems: list[Diagnostic] = []
    for number, line in lines:
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "concept":
                if len(parts) < 3:
                    raise ValueError("concept line needs: concept <id> <TaxonomyClass> [label]")
                cid, cls = parts[1], parts[2]
                try:
                    taxonomy_class = TaxonomyClass(cls)
                except ValueError:
                    raise ValueError(f"unknown taxonomy class {cls!r}") from None
                if cid in concepts:
                    raise ValueError(f"duplicate concept id {cid!r}")
                concepts[cid] = Concept(cid, taxonomy_class, " ".join(parts[3:]))
            elif kind == "prox":
                if len(parts) != 4:
                    raise ValueError("prox line needs: prox <idA> <idB> <value>")
                a, b = parts[1], parts[2]
                try:
                    value = float(parts[3])
                except ValueError:
                    raise ValueError(f"proximity value {parts[3]!r} is not a number") from None
                _check_edge(concepts, edges, a, b, value)
                edges[_pair(a, b)] = (a, b, value)
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except ValueError as exc:
            problems.append(Diagnostic(number, str(exc)))
    if problems:
        raise DocumentError(problems)
    return OntologyGraph(concepts, edges)


def serialize_ontology(graph: OntologyGraph) -> str:
    out = [HEADER]
    for c in graph.concepts.values():
        out.append(" ".join(filter(None, ["concept", c.id, c.taxonomy_class.value, c.label])))
    for a, b, value in graph.edges.values():
        out.append(f"prox {a} {b} {value!r}")
    return "\n".join(out) + "\n"


def load_ontology(source: str | Path | None = None) -> OntologyGraph:
    """Load an ontology from a path, or the bundled crisis ontology when ``source`` is None."""
    if source is None:
        text = resources.files("factnet.data").joinpath("crisis.ont").read_text(encoding="utf-8")
    else:
        text = Path(source).read_text(encoding="utf-8")
    return parse_ontology(text)
