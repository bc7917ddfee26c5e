"""Operation and parameter interaction networks.

An operation network links ``i -> j`` when the outputs of ``i`` can feed the
inputs of ``j`` at a given match level: all of ``j``'s inputs for full
invocation, at least one for partial invocation.  A parameter network has
one node per distinct concept and links every input concept of an
operation to each of its output concepts; each link remembers the
operations it stands for.
"""

from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from svcnet.model import Collection
from svcnet.ontology import ConceptRef, MatchDegree, OntologyRegistry

__all__ = [
    "ComponentDecomposition",
    "Invocation",
    "InteractionNetwork",
    "NetworkKind",
    "build_operation_network",
    "build_parameter_network",
    "decompose",
    "export",
    "hubs_and_authorities",
    "network_from_json",
]


class NetworkKind(str, enum.Enum):
    OPERATION = "operation"
    PARAMETER = "parameter"


class Invocation(str, enum.Enum):
    FULL = "full"
    PARTIAL = "partial"


Edge = tuple[int, int]


@dataclass(frozen=True)
class InteractionNetwork:
    """Directed simple graph over labelled nodes.

    ``edges`` is sorted and holds neither self-loops nor duplicates.
    ``provenance`` maps each parameter-network edge to the ids of the
    operations it materializes; it is empty for operation networks.
    """

    kind: NetworkKind
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    match_level: MatchDegree | None = MatchDegree.EXACT
    invocation: Invocation | None = None
    provenance: dict[Edge, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.nodes)
        prev = None
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a missing node")
            if u == v:
                raise ValueError(f"self-loop on node {self.nodes[u]!r}")
            if prev is not None and (u, v) <= prev:
                raise ValueError("edges must be sorted and unique")
            prev = (u, v)
        if self.kind is NetworkKind.PARAMETER:
            for e in self.edges:
                if not self.provenance.get(e):
                    raise ValueError(f"parameter edge {e} has no provenance")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def out_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for u, _ in self.edges:
            deg[u] += 1
        return deg

    def in_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for _, v in self.edges:
            deg[v] += 1
        return deg

    def successors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.nodes]
        for u, v in self.edges:
            adj[u].append(v)
        return adj

    def undirected_edges(self) -> list[Edge]:
        """Edges of the undirected simple projection as sorted ``(min, max)`` pairs."""
        return sorted({(min(u, v), max(u, v)) for u, v in self.edges})

    def neighbors(self) -> list[set[int]]:
        """Adjacency of the undirected projection."""
        adj: list[set[int]] = [set() for _ in self.nodes]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def subgraph(self, keep: Iterable[int]) -> InteractionNetwork:
        """Induced subnetwork on ``keep``; node order and provenance preserved."""
        keep = sorted(set(keep))
        new = {old: i for i, old in enumerate(keep)}
        edges = tuple((new[u], new[v]) for u, v in self.edges if u in new and v in new)
        prov = {(new[u], new[v]): ops for (u, v), ops in self.provenance.items() if u in new and v in new}
        return InteractionNetwork(
            self.kind, tuple(self.nodes[i] for i in keep), edges, self.match_level, self.invocation, prov
        )

    def edge_labels(self) -> set[tuple[str, str]]:
        return {(self.nodes[u], self.nodes[v]) for u, v in self.edges}


def build_operation_network(
    coll: Collection,
    onts: OntologyRegistry,
    level: MatchDegree,
    invocation: Invocation = Invocation.FULL,
    *,
    allow_vacuous: bool = False,
) -> InteractionNetwork:
    """Operation network of ``coll`` at one match level.

    Operations without inputs get no incoming links unless ``allow_vacuous``
    is set, in which case (full invocation only) every other operation
    links to them.
    """
    if level is MatchDegree.FAIL:
        raise ValueError("FAIL is not a network level")
    invocation = Invocation(invocation)
    coll.validate(onts)
    ops = coll.operations

    producers: dict[ConceptRef, set[int]] = defaultdict(set)
    for i, op in enumerate(ops):
        for c in op.output_set:
            producers[c].add(i)

    def sources_for(c_in: ConceptRef) -> set[int]:
        found: set[int] = set()
        for c_out in onts.satisfying_outputs(c_in, level):
            found |= producers.get(c_out, set())
        return found

    edges: list[Edge] = []
    everyone = set(range(len(ops)))
    for j, op in enumerate(ops):
        if not op.input_set:
            if allow_vacuous and invocation is Invocation.FULL:
                edges.extend((i, j) for i in everyone - {j})
            continue
        per_input = [sources_for(c) for c in sorted(op.input_set)]
        if invocation is Invocation.FULL:
            srcs = set.intersection(*per_input)
        else:
            srcs = set.union(*per_input)
        srcs.discard(j)
        edges.extend((i, j) for i in srcs)
    return InteractionNetwork(
        NetworkKind.OPERATION,
        tuple(op.id for op in ops),
        tuple(sorted(edges)),
        level,
        invocation,
    )


def build_parameter_network(coll: Collection, onts: OntologyRegistry) -> InteractionNetwork:
    """Exact-merge parameter network with per-link operation provenance."""
    coll.validate(onts)
    refs = coll.concept_refs()
    index = {c: i for i, c in enumerate(refs)}
    prov: dict[Edge, list[str]] = defaultdict(list)
    for op in coll.operations:
        for c_in in sorted(op.input_set):
            for c_out in sorted(op.output_set):
                if c_in != c_out:
                    prov[(index[c_in], index[c_out])].append(op.id)
    return InteractionNetwork(
        NetworkKind.PARAMETER,
        tuple(str(c) for c in refs),
        tuple(sorted(prov)),
        MatchDegree.EXACT,
        None,
        {e: tuple(ops) for e, ops in prov.items()},
    )


@dataclass(frozen=True)
class ComponentDecomposition:
    """Weak components, largest first (ties: smallest minimum node index first)."""

    n_nodes: int
    components: tuple[tuple[int, ...], ...]

    @property
    def giant(self) -> tuple[int, ...] | None:
        if self.components and len(self.components[0]) >= 2:
            return self.components[0]
        return None

    @property
    def small(self) -> tuple[tuple[int, ...], ...]:
        return tuple(c for c in self.components[1:] if len(c) >= 2)

    @property
    def isolated(self) -> tuple[int, ...]:
        return tuple(sorted(c[0] for c in self.components if len(c) == 1))

    def fractions(self) -> dict[str, float]:
        """Share of nodes that are isolated, in small components, in the giant component."""
        if not self.n_nodes:
            return {"isolated": 0.0, "small": 0.0, "giant": 0.0}
        giant = len(self.giant or ())
        small = sum(len(c) for c in self.small)
        return {
            "isolated": len(self.isolated) / self.n_nodes,
            "small": small / self.n_nodes,
            "giant": giant / self.n_nodes,
        }

    def summary(self) -> dict[str, Any]:
        f = self.fractions()
        return {
            "n_nodes": self.n_nodes,
            "n_components": len(self.components),
            "giant_size": len(self.giant or ()),
            "n_small": len(self.small),
            "small_sizes": [len(c) for c in self.small],
            "n_isolated": len(self.isolated),
            **{f"{k}_fraction": round(v, 4) for k, v in f.items()},
        }


def decompose(net: InteractionNetwork) -> ComponentDecomposition:
    parent = list(range(net.n_nodes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in net.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = defaultdict(list)
    for x in range(net.n_nodes):
        groups[find(x)].append(x)
    comps = sorted((tuple(g) for g in groups.values()), key=lambda c: (-len(c), c[0]))
    return ComponentDecomposition(net.n_nodes, tuple(comps))


def giant_component(net: InteractionNetwork) -> InteractionNetwork | None:
    giant = decompose(net).giant
    return net.subgraph(giant) if giant is not None else None


def hubs_and_authorities(
    net: InteractionNetwork, k: int
) -> tuple[list[tuple[str, int]], list[tuple[str, int]]]:
    """Top-``k`` nodes by out-degree (hubs) and by in-degree (authorities).

    Nodes of degree zero are never listed.  Ties go to the smaller label.
    """
    if k < 0:
        raise ValueError("k must be >= 0")

    def top(deg: np.ndarray) -> list[tuple[str, int]]:
        ranked = sorted(((net.nodes[i], int(d)) for i, d in enumerate(deg) if d > 0), key=lambda x: (-x[1], x[0]))
        return ranked[:k]

    return top(net.out_degrees()), top(net.in_degrees())


def _sorted_label_edges(net: InteractionNetwork) -> list[Edge]:
    return sorted(net.edges, key=lambda e: (net.nodes[e[0]], net.nodes[e[1]]))


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_json_document(net: InteractionNetwork) -> dict[str, Any]:
    edges = []
    for u, v in _sorted_label_edges(net):
        e: dict[str, Any] = {"src": u, "dst": v}
        if net.kind is NetworkKind.PARAMETER:
            e["ops"] = list(net.provenance[(u, v)])
        edges.append(e)
    return {
        "kind": net.kind.value,
        "match_level": net.match_level.label if net.match_level is not None else None,
        "invocation": net.invocation.value if net.invocation is not None else None,
        "nodes": list(net.nodes),
        "edges": edges,
    }


def export(net: InteractionNetwork, format: str) -> str:
    """Serialize as ``tsv`` (edge list), ``dot`` or ``json``; edges sorted by (src, dst) label."""
    if format == "tsv":
        return "".join(f"{net.nodes[u]}\t{net.nodes[v]}\n" for u, v in _sorted_label_edges(net))
    if format == "dot":
        lines = ["digraph interaction {"]
        lines += [f"  {_dot_quote(label)};" for label in net.nodes]
        lines += [f"  {_dot_quote(net.nodes[u])} -> {_dot_quote(net.nodes[v])};" for u, v in _sorted_label_edges(net)]
        lines.append("}")
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps(to_json_document(net), indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown export format {format!r}")


def network_from_json(document: str | bytes | dict[str, Any]) -> InteractionNetwork:
    """Inverse of ``export(net, "json")``."""
    if not isinstance(document, dict):
        document = json.loads(document)
    kind = NetworkKind(document["kind"])
    level = document.get("match_level")
    inv = document.get("invocation")
    edges: list[Edge] = []
    prov: dict[Edge, tuple[str, ...]] = {}
    for e in document["edges"]:
        edge = (int(e["src"]), int(e["dst"]))
        edges.append(edge)
        if "ops" in e:
            prov[edge] = tuple(e["ops"])
    return InteractionNetwork(
        kind,
        tuple(document["nodes"]),
        tuple(sorted(set(edges))),
        MatchDegree.from_label(level) if level else None,
        Invocation(inv) if inv else None,
        prov,
    )


def network_from_edges(labels: Sequence[str], edges: Iterable[tuple[str, str]]) -> InteractionNetwork:
    """Operation-kind network from labelled edges (self-loops and duplicates dropped)."""
    index = {label: i for i, label in enumerate(labels)}
    pairs = {(index[a], index[b]) for a, b in edges if a != b}
    return InteractionNetwork(NetworkKind.OPERATION, tuple(labels), tuple(sorted(pairs)), None, None)
