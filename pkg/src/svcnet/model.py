"""Services, operations and collections, plus the canonical JSON format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping

from svcnet.errors import CollectionError, OntologyError
from svcnet.ontology import ConceptRef, OntologyRegistry

__all__ = ["Collection", "Operation", "Service", "dump_collection", "load_collection"]


@dataclass(frozen=True)
class Operation:
    """An invocable operation with its input and output concept lists.

    ``inputs`` and ``outputs`` keep duplicates and file order; network
    construction only looks at :attr:`input_set` / :attr:`output_set`.
    """

    service: str
    name: str
    inputs: tuple[ConceptRef, ...] = ()
    outputs: tuple[ConceptRef, ...] = ()

    @property
    def id(self) -> str:
        return f"{self.service}.{self.name}"

    @cached_property
    def input_set(self) -> frozenset[ConceptRef]:
        return frozenset(self.inputs)

    @cached_property
    def output_set(self) -> frozenset[ConceptRef]:
        return frozenset(self.outputs)


@dataclass(frozen=True)
class Service:
    name: str
    operations: tuple[Operation, ...] = ()


@dataclass(frozen=True)
class Collection:
    services: tuple[Service, ...] = ()

    def __post_init__(self) -> None:
        names: set[str] = set()
        ids: set[str] = set()
        for svc in self.services:
            if not svc.name:
                raise CollectionError("service name must be non-empty")
            if svc.name in names:
                raise CollectionError(f"duplicate service name {svc.name!r}")
            names.add(svc.name)
            for op in svc.operations:
                if not op.name:
                    raise CollectionError(f"service {svc.name!r}: operation name must be non-empty")
                if op.service != svc.name:
                    raise CollectionError(f"operation {op.id!r} filed under service {svc.name!r}")
                if op.id in ids:
                    raise CollectionError(f"duplicate operation id {op.id!r}")
                ids.add(op.id)

    @cached_property
    def operations(self) -> tuple[Operation, ...]:
        """All operations in file order."""
        return tuple(op for svc in self.services for op in svc.operations)

    @cached_property
    def index(self) -> dict[str, int]:
        return {op.id: i for i, op in enumerate(self.operations)}

    def operation(self, op_id: str) -> Operation:
        return self.operations[self.index[op_id]]

    def concept_refs(self) -> list[ConceptRef]:
        """Distinct concept refs in order of first appearance (inputs before outputs)."""
        seen: dict[ConceptRef, None] = {}
        for op in self.operations:
            for ref in (*op.inputs, *op.outputs):
                seen.setdefault(ref, None)
        return list(seen)

    @property
    def ontology_ids_referenced(self) -> frozenset[str]:
        return frozenset(ref.ontology_id for ref in self.concept_refs())

    @property
    def parameter_instances(self) -> int:
        return sum(len(op.inputs) + len(op.outputs) for op in self.operations)

    def validate(self, onts: OntologyRegistry) -> None:
        """Raise :class:`UnresolvedConceptError` for the first unresolvable reference."""
        for ref in self.concept_refs():
            onts.resolve(ref)

    def to_document(self) -> dict[str, Any]:
        return {
            "services": [
                {
                    "name": svc.name,
                    "operations": [
                        {
                            "name": op.name,
                            "inputs": [str(c) for c in op.inputs],
                            "outputs": [str(c) for c in op.outputs],
                        }
                        for op in svc.operations
                    ],
                }
                for svc in self.services
            ]
        }


def _refs(values: Any, where: str) -> tuple[ConceptRef, ...]:
    if not isinstance(values, list):
        raise CollectionError(f"{where}: expected a list of concept references")
    out = []
    for v in values:
        if not isinstance(v, str):
            raise CollectionError(f"{where}: concept reference must be a string, got {v!r}")
        try:
            out.append(ConceptRef.parse(v))
        except OntologyError as exc:
            raise CollectionError(f"{where}: {exc}") from None
    return tuple(out)


def load_collection(document: str | bytes | Mapping[str, Any]) -> Collection:
    """Parse the canonical collection format; operation order is file order."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CollectionError(f"collection document is not valid JSON: {exc}") from None
    if not isinstance(document, Mapping) or not isinstance(document.get("services"), list):
        raise CollectionError("collection document must be an object with a 'services' list")
    services = []
    for s, raw in enumerate(document["services"]):
        if not isinstance(raw, Mapping) or not isinstance(raw.get("name"), str):
            raise CollectionError(f"services[{s}]: missing string field 'name'")
        name = raw["name"]
        ops = []
        for o, raw_op in enumerate(raw.get("operations", [])):
            if not isinstance(raw_op, Mapping) or not isinstance(raw_op.get("name"), str):
                raise CollectionError(f"services[{s}].operations[{o}]: missing string field 'name'")
            where = f"{name}.{raw_op['name']}"
            ops.append(
                Operation(
                    service=name,
                    name=raw_op["name"],
                    inputs=_refs(raw_op.get("inputs", []), f"{where} inputs"),
                    outputs=_refs(raw_op.get("outputs", []), f"{where} outputs"),
                )
            )
        services.append(Service(name, tuple(ops)))
    return Collection(tuple(services))


def dump_collection(coll: Collection) -> str:
    return json.dumps(coll.to_document(), indent=2, ensure_ascii=False) + "\n"


def collection_of(services: Iterable[tuple[str, Iterable[tuple[str, Iterable[str], Iterable[str]]]]]) -> Collection:
    """Shorthand constructor: ``[(service, [(op, inputs, outputs), ...]), ...]`` with string keys."""
    return Collection(
        tuple(
            Service(
                svc,
                tuple(
                    Operation(svc, op, tuple(map(ConceptRef.parse, ins)), tuple(map(ConceptRef.parse, outs)))
                    for op, ins, outs in ops
                ),
            )
            for svc, ops in services
        )
    )
