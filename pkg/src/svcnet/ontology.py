"""Concept hierarchies, subsumption queries and degrees of match.

An ontology is a DAG of ``(child, parent)`` subclass edges over a set of
named concepts.  Its reflexive-transitive closure is computed once at load
time and stored as one ancestor bitset (a Python int) per concept, so that
subsumption tests during network construction are a shift and a mask.

Concepts from different ontologies are never comparable: any cross-ontology
pair has degree of match ``FAIL``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Any, Iterable, Iterator, Mapping

from svcnet.errors import OntologyError, UnresolvedConceptError

__all__ = [
    "ConceptRef",
    "MatchDegree",
    "Ontology",
    "OntologyRegistry",
    "dump_ontology",
    "is_subconcept",
    "load_ontology",
    "match_degree",
    "satisfies",
]


@dataclass(frozen=True, order=True)
class ConceptRef:
    """Globally unique concept key, serialized as ``ontology_id#local_name``."""

    ontology_id: str
    local_name: str

    def __post_init__(self) -> None:
        if not self.ontology_id or not self.local_name:
            raise OntologyError(f"concept reference needs a non-empty ontology id and name: {self!s}")

    @classmethod
    def parse(cls, key: str) -> ConceptRef:
        """Split on the last ``#``; both halves must be non-empty."""
        ontology_id, sep, local_name = key.rpartition("#")
        if not sep or not ontology_id or not local_name:
            raise OntologyError(f"malformed concept reference {key!r} (expected 'ontology_id#local_name')")
        return cls(ontology_id, local_name)

    def __str__(self) -> str:
        return f"{self.ontology_id}#{self.local_name}"


class MatchDegree(enum.IntEnum):
    """Degree of match between an output concept and an input concept.

    Integer values follow the relevance ranking
    ``EXACT > FITIN > PLUGIN > SUBSUME > FAIL``.
    """

    FAIL = 0
    SUBSUME = 1
    PLUGIN = 2
    FITIN = 3
    EXACT = 4

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> MatchDegree:
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown match level {label!r}") from None


#: Levels a network or a composition request can be built at.
LEVELS = (MatchDegree.EXACT, MatchDegree.PLUGIN, MatchDegree.SUBSUME, MatchDegree.FITIN)


def satisfies(degree_found: MatchDegree, level_requested: MatchDegree) -> bool:
    """Whether a pairwise degree of match is accepted at a network level.

    FITIN accepts EXACT or PLUGIN; every other level accepts only itself.
    FAIL satisfies nothing.
    """
    if degree_found is MatchDegree.FAIL:
        return False
    if level_requested is MatchDegree.FITIN:
        return degree_found in (MatchDegree.EXACT, MatchDegree.PLUGIN)
    return degree_found is level_requested


class Ontology:
    """One concept hierarchy with its precomputed subsumption closure."""

    def __init__(self, id: str, concepts: Iterable[str], subclass_edges: Iterable[tuple[str, str]] = ()) -> None:
        if not id:
            raise OntologyError("ontology id must be non-empty")
        self.id = id
        names: list[str] = []
        seen: set[str] = set()
        for name in concepts:
            if not isinstance(name, str) or not name:
                raise OntologyError(f"ontology {id!r}: concept names must be non-empty strings, got {name!r}")
            if name in seen:
                raise OntologyError(f"ontology {id!r}: duplicate concept {name!r}")
            seen.add(name)
            names.append(name)
        self.concepts: tuple[str, ...] = tuple(names)
        self._index = {name: i for i, name in enumerate(self.concepts)}

        edges: set[tuple[str, str]] = set()
        for child, parent in subclass_edges:
            for end in (child, parent):
                if end not in self._index:
                    raise OntologyError(f"ontology {id!r}: edge ({child!r}, {parent!r}) uses undeclared concept {end!r}")
            edges.add((child, parent))
        self.subclass_edges: frozenset[tuple[str, str]] = frozenset(edges)
        self._ancestors, self._descendants = self._close()

    def _close(self) -> tuple[list[int], list[int]]:
        parents: dict[str, set[str]] = {name: set() for name in self.concepts}
        for child, parent in self.subclass_edges:
            parents[child].add(parent)
        try:
            order = list(TopologicalSorter(parents).static_order())
        except CycleError as exc:
            cycle = " -> ".join(exc.args[1]) if len(exc.args) > 1 else "?"
            raise OntologyError(f"ontology {self.id!r}: subclass cycle {cycle}") from None

        anc = [0] * len(self.concepts)
        # static_order yields every parent before its children.
        for name in order:
            i = self._index[name]
            bits = 1 << i
            for parent in parents[name]:
                bits |= anc[self._index[parent]]
            anc[i] = bits
        desc = [0] * len(self.concepts)
        for i, bits in enumerate(anc):
            for j in _bits(bits):
                desc[j] |= 1 << i
        return anc, desc

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.concepts)

    def __repr__(self) -> str:
        return f"Ontology({self.id!r}, {len(self.concepts)} concepts, {len(self.subclass_edges)} edges)"

    def subsumed_by(self, a: str, b: str) -> bool:
        """Reflexive-transitive ``a`` is-a ``b``."""
        return bool(self._ancestors[self._pos(a)] >> self._pos(b) & 1)

    def ancestors(self, name: str) -> frozenset[str]:
        """All concepts subsuming ``name``, itself included."""
        return frozenset(self.concepts[j] for j in _bits(self._ancestors[self._pos(name)]))

    def descendants(self, name: str) -> frozenset[str]:
        """All concepts subsumed by ``name``, itself included."""
        return frozenset(self.concepts[j] for j in _bits(self._descendants[self._pos(name)]))

    def closure(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (self.concepts[i], self.concepts[j]) for i, bits in enumerate(self._ancestors) for j in _bits(bits)
        )

    def depth(self) -> int:
        """Number of edges on the longest subclass chain."""
        parents: dict[str, list[str]] = {name: [] for name in self.concepts}
        for child, parent in self.subclass_edges:
            parents[child].append(parent)
        memo: dict[str, int] = {}
        for name in TopologicalSorter(parents).static_order():
            memo[name] = max((memo[p] + 1 for p in parents[name]), default=0)
        return max(memo.values(), default=0)

    def to_document(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "concepts": list(self.concepts),
            "subclass_of": [list(edge) for edge in sorted(self.subclass_edges)],
        }

    def _pos(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnresolvedConceptError(f"{self.id}#{name}", "unknown concept") from None


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def load_ontology(document: str | bytes | Mapping[str, Any]) -> Ontology:
    """Parse the JSON ontology file format into an :class:`Ontology`."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise OntologyError(f"ontology document is not valid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise OntologyError("ontology document must be a JSON object")
    try:
        ont_id = document["id"]
        concepts = document["concepts"]
    except KeyError as exc:
        raise OntologyError(f"ontology document missing field {exc.args[0]!r}") from None
    if not isinstance(ont_id, str):
        raise OntologyError("ontology field 'id' must be a string")
    if not isinstance(concepts, list):
        raise OntologyError("ontology field 'concepts' must be a list")
    edges = []
    for pair in document.get("subclass_of", []):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise OntologyError(f"ontology {ont_id!r}: 'subclass_of' entries must be [child, parent], got {pair!r}")
        edges.append((pair[0], pair[1]))
    return Ontology(ont_id, concepts, edges)


def dump_ontology(ontology: Ontology) -> str:
    return json.dumps(ontology.to_document(), indent=2, ensure_ascii=False) + "\n"


@dataclass
class OntologyRegistry:
    """The set of loaded ontologies, keyed by id.

    Read-only once the collection has been validated against it.
    """

    ontologies: dict[str, Ontology] = field(default_factory=dict)
    _cache: dict[tuple[ConceptRef, MatchDegree], frozenset[ConceptRef]] = field(
        default_factory=dict, init=False, repr=False
    )

    @classmethod
    def of(cls, *ontologies: Ontology) -> OntologyRegistry:
        reg = cls()
        for ont in ontologies:
            reg.register(ont)
        return reg

    def register(self, ontology: Ontology) -> None:
        if ontology.id in self.ontologies:
            raise OntologyError(f"duplicate ontology id {ontology.id!r}")
        self.ontologies[ontology.id] = ontology
        self._cache.clear()

    def __contains__(self, ref: object) -> bool:
        return (
            isinstance(ref, ConceptRef)
            and ref.ontology_id in self.ontologies
            and ref.local_name in self.ontologies[ref.ontology_id]
        )

    def resolve(self, ref: ConceptRef) -> Ontology:
        ont = self.ontologies.get(ref.ontology_id)
        if ont is None:
            raise UnresolvedConceptError(ref, "unknown ontology")
        if ref.local_name not in ont:
            raise UnresolvedConceptError(ref, "unknown concept")
        return ont

    def is_subconcept(self, a: ConceptRef, b: ConceptRef) -> bool:
        ont = self.resolve(a)
        self.resolve(b)
        return a.ontology_id == b.ontology_id and ont.subsumed_by(a.local_name, b.local_name)

    def match_degree(self, c_out: ConceptRef, c_in: ConceptRef) -> MatchDegree:
        """EXACT, PLUGIN, SUBSUME or FAIL; never FITIN."""
        ont = self.resolve(c_out)
        self.resolve(c_in)
        if c_out.ontology_id != c_in.ontology_id:
            return MatchDegree.FAIL
        if c_out.local_name == c_in.local_name:
            return MatchDegree.EXACT
        if ont.subsumed_by(c_out.local_name, c_in.local_name):
            return MatchDegree.PLUGIN
        if ont.subsumed_by(c_in.local_name, c_out.local_name):
            return MatchDegree.SUBSUME
        return MatchDegree.FAIL

    def satisfying_outputs(self, c_in: ConceptRef, level: MatchDegree) -> frozenset[ConceptRef]:
        """Every output concept ``c`` with ``satisfies(match_degree(c, c_in), level)``."""
        key = (c_in, level)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        ont = self.resolve(c_in)
        name = c_in.local_name
        if level is MatchDegree.EXACT:
            names = {name}
        elif level is MatchDegree.PLUGIN:
            names = ont.descendants(name) - {name}
        elif level is MatchDegree.SUBSUME:
            names = ont.ancestors(name) - {name}
        elif level is MatchDegree.FITIN:
            names = set(ont.descendants(name))
        else:
            raise ValueError(f"not a network level: {level!r}")
        result = frozenset(ConceptRef(ont.id, n) for n in names)
        self._cache[key] = result
        return result


def is_subconcept(onts: OntologyRegistry, a: ConceptRef, b: ConceptRef) -> bool:
    return onts.is_subconcept(a, b)


def match_degree(onts: OntologyRegistry, c_out: ConceptRef, c_in: ConceptRef) -> MatchDegree:
    return onts.match_degree(c_out, c_in)
