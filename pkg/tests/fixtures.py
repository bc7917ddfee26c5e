"""Shared test fixtures: the four-operation example, the book ontology, file writers."""

from __future__ import annotations

import json
from pathlib import Path

from svcnet.generator import GeneratorParams, generate_collection
from svcnet.model import collection_of, dump_collection
from svcnet.ontology import Ontology, OntologyRegistry, dump_ontology

FOUR_OP_ONT = "urn:four-ops"
BOOKS = "books"


def four_op_ontology() -> Ontology:
    return Ontology(FOUR_OP_ONT, "abcdefghi")


def four_op_collection():
    """Three services, four operations, nine concepts a..i.

    Operation 1 consumes {a, b} and yields {d}; 2 turns {c} into {e, f};
    3 turns {f} into {g, h}; 4 consumes {g, h} and yields {i}.
    """

    def c(*names):
        return [f"{FOUR_OP_ONT}#{n}" for n in names]

    return collection_of(
        [
            ("α", [("1", c("a", "b"), c("d")), ("2", c("c"), c("e", "f"))]),
            ("β", [("3", c("f"), c("g", "h"))]),
            ("γ", [("4", c("g", "h"), c("i"))]),
        ]
    )


def book_ontologies() -> tuple[Ontology, Ontology]:
    books = Ontology(
        BOOKS,
        ["Textbook", "BiologyTextbook", "ChemistryTextbook", "AnatomyTextbook", "SchoolLevel", "Price"],
        [
            ("BiologyTextbook", "Textbook"),
            ("ChemistryTextbook", "Textbook"),
            ("AnatomyTextbook", "BiologyTextbook"),
        ],
    )
    vehicles = Ontology("vehicles", ["Vehicle", "Car", "Price"], [("Car", "Vehicle")])
    return books, vehicles




def write_generated(tmp_path: Path, params: GeneratorParams) -> tuple[Path, Path]:
    coll, ont = generate_collection(params)
    c, o = tmp_path / "collection.json", tmp_path / "ontology.json"
    c.write_text(dump_collection(coll), encoding="utf-8")
    o.write_text(dump_ontology(ont), encoding="utf-8")
    return c, o


def write_json(path: Path, doc) -> Path:
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def oracle_for(*ontologies: Ontology):
    from oracles import OracleOntologies

    return OracleOntologies({o.id: (list(o.concepts), [tuple(e) for e in o.to_document()["subclass_of"]]) for o in ontologies})


def random_case(seed: int, max_ops: int = 20, max_concepts: int = 15, allow_empty_inputs: bool = False):
    """A small seeded collection with its registry: ``(collection, registry, ontology)``."""
    import numpy as np

    rng = np.random.default_rng([7919, seed])
    n_ops = int(rng.integers(2, max_ops + 1))
    per_service = int(rng.integers(1, 3))
    params = GeneratorParams(
        n_services=-(-n_ops // per_service),
        ops_per_service=per_service,
        n_concepts=int(rng.integers(3, max_concepts + 1)),
        concept_reuse_skew=float(rng.uniform(0.0, 1.5)),
        seed=seed,
        min_inputs=0 if allow_empty_inputs else 1,
        max_inputs=int(rng.integers(1, 4)),
        max_outputs=int(rng.integers(1, 3)),
        max_depth=3,
        root_prob=float(rng.uniform(0.05, 0.5)),
        second_parent_prob=0.2,
    )
    coll, ont = generate_collection(params)
    return coll, OntologyRegistry.of(ont), ont
