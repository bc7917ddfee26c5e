"""Seeded synthetic collections and their ontology.

Concept usage follows a Zipf-like law: the concept of reuse rank ``r``
(ranks are a random permutation of the concepts) is drawn with probability
proportional to ``(r + 1) ** -skew``.  ``skew = 0`` gives uniform usage;
larger values make a few hub parameters appear in many operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from svcnet.model import Collection, Operation, Service
from svcnet.ontology import ConceptRef, Ontology

__all__ = ["GeneratorParams", "concept_weights", "generate_collection"]


@dataclass(frozen=True)
class GeneratorParams:
    n_services: int
    ops_per_service: int
    n_concepts: int
    concept_reuse_skew: float = 1.0
    seed: int = 1
    min_inputs: int = 1
    max_inputs: int = 3
    min_outputs: int = 1
    max_outputs: int = 2
    max_depth: int = 3
    root_prob: float = 0.2
    second_parent_prob: float = 0.1
    ontology_id: str = "urn:svcnet:generated"

    def validate(self) -> None:
        for name in ("n_services", "ops_per_service", "n_concepts", "min_inputs", "min_outputs", "max_depth"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.max_inputs < self.min_inputs or self.max_outputs < self.min_outputs:
            raise ValueError("max_inputs/max_outputs must not be below their minimum")
        if self.concept_reuse_skew < 0:
            raise ValueError("concept_reuse_skew must be >= 0")
        n_ops = self.n_services * self.ops_per_service
        if n_ops and self.n_concepts == 0 and (self.max_inputs or self.max_outputs):
            raise ValueError("cannot generate operations with parameters from zero concepts")


def concept_weights(n_concepts: int, skew: float, rng: np.random.Generator) -> np.ndarray:
    """Probability of drawing each concept index."""
    ranks = rng.permutation(n_concepts)
    w = (ranks + 1.0) ** -skew
    return w / w.sum()


def _ontology(p: GeneratorParams, rng: np.random.Generator) -> Ontology:
    width = max(3, len(str(max(p.n_concepts - 1, 0))))
    names = [f"C{i:0{width}d}" for i in range(p.n_concepts)]
    depth = [0] * p.n_concepts
    edges: list[tuple[str, str]] = []
    for i in range(1, p.n_concepts):
        eligible = [j for j in range(i) if depth[j] < p.max_depth]
        if not eligible or rng.random() < p.root_prob:
            continue
        parents = [eligible[rng.integers(len(eligible))]]
        if len(eligible) > 1 and rng.random() < p.second_parent_prob:
            other = eligible[rng.integers(len(eligible))]
            if other != parents[0]:
                parents.append(other)
        depth[i] = 1 + max(depth[j] for j in parents)
        edges.extend((names[i], names[j]) for j in parents)
    return Ontology(p.ontology_id, names, edges)


def generate_collection(params: GeneratorParams) -> tuple[Collection, Ontology]:
    """Build a deterministic (collection, ontology) pair from ``params``."""
    params.validate()
    rng = np.random.default_rng(params.seed)
    ontology = _ontology(params, rng)
    refs = [ConceptRef(ontology.id, name) for name in ontology.concepts]
    weights = concept_weights(params.n_concepts, params.concept_reuse_skew, rng) if refs else None

    def draw(lo: int, hi: int) -> tuple[ConceptRef, ...]:
        k = int(rng.integers(lo, hi + 1))
        if k == 0 or not refs:
            return ()
        picked = rng.choice(len(refs), size=k, p=weights)
        return tuple(refs[i] for i in dict.fromkeys(picked.tolist()))

    width = len(str(max(params.n_services, 1)))
    services = []
    for s in range(params.n_services):
        svc = f"s{s + 1:0{width}d}"
        ops = []
        for o in range(params.ops_per_service):
            inputs = draw(params.min_inputs, params.max_inputs)
            outputs = draw(params.min_outputs, params.max_outputs)
            ops.append(Operation(svc, f"op{o + 1}", inputs, outputs))
        services.append(Service(svc, tuple(ops)))
    return Collection(tuple(services)), ontology
