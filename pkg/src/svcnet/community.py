"""Walktrap community detection and Newman–Girvan modularity.

Both work on the undirected simple projection of a network.  Walktrap
(Pons & Latapy) compares nodes by their ``t``-step random-walk
distributions and merges adjacent communities greedily, always taking the
pair whose merge least increases the mean squared walk distance to
community centres.  The dendrogram is cut where modularity peaks.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from svcnet.errors import MetricUndefined
from svcnet.network import InteractionNetwork

__all__ = [
    "DomainMixing",
    "Merge",
    "Partition",
    "community_domain_mixing",
    "community_size_distribution",
    "modularity",
    "partition_from_communities",
    "walktrap",
]


@dataclass(frozen=True)
class Merge:
    a: int
    b: int
    merged: int
    delta_sigma: float
    modularity: float


@dataclass(frozen=True)
class Partition:
    """Communities (node-index tuples) sorted by size descending, ties by smallest node."""

    nodes: tuple[str, ...]
    communities: tuple[tuple[int, ...], ...]
    modularity: float | None
    dendrogram: tuple[Merge, ...] = field(default=(), repr=False)
    cut_step: int | None = None

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.communities]

    @property
    def assignment(self) -> list[int]:
        out = [-1] * len(self.nodes)
        for ci, members in enumerate(self.communities):
            for v in members:
                out[v] = ci
        return out

    def labelled(self) -> list[list[str]]:
        return [[self.nodes[v] for v in c] for c in self.communities]

    def to_json(self) -> str:
        doc = {"modularity": self.modularity, "communities": self.labelled()}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    def membership_csv(self) -> str:
        assignment = self.assignment
        return "node,community\n" + "".join(f"{label},{assignment[i]}\n" for i, label in enumerate(self.nodes))


def _sort_communities(groups) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(g)) for g in groups if g), key=lambda c: (-len(c), c[0])))


def partition_from_communities(net: InteractionNetwork, groups: Sequence[Sequence[int]]) -> Partition:
    """Partition from explicit node-index groups, scored with :func:`modularity`."""
    comms = _sort_communities(groups)
    assignment = [-1] * net.n_nodes
    for ci, members in enumerate(comms):
        for v in members:
            if assignment[v] != -1:
                raise ValueError(f"node {v} appears in two communities")
            assignment[v] = ci
    try:
        q = modularity(net, assignment)
    except MetricUndefined:
        q = None
    return Partition(net.nodes, comms, q)


def modularity(net: InteractionNetwork, partition: Partition | Sequence[int]) -> float:
    """``Q = sum_c (e_cc - a_c**2)`` on the undirected projection.

    ``e_cc`` is the fraction of edges inside community ``c`` and ``a_c`` the
    fraction of edge endpoints attached to it.  ``partition`` is a
    :class:`Partition` or a per-node community index.
    """
    assignment = partition.assignment if isinstance(partition, Partition) else list(partition)
    if len(assignment) != net.n_nodes or any(c is None or c < 0 for c in assignment):
        raise ValueError("partition must assign every node to a community")
    edges = net.undirected_edges()
    if not edges:
        raise MetricUndefined("modularity is undefined without edges")
    m = len(edges)
    inside: Counter[int] = Counter()
    ends: Counter[int] = Counter()
    for u, v in edges:
        cu, cv = assignment[u], assignment[v]
        if cu == cv:
            inside[cu] += 1
        ends[cu] += 1
        ends[cv] += 1
    return sum(inside[c] / m - (ends[c] / (2 * m)) ** 2 for c in set(assignment))


def walktrap(net: InteractionNetwork, t: int = 4) -> Partition:
    """Walktrap partition cut at maximum modularity.

    Disconnected graphs are handled as they are: merges only join adjacent
    communities, so every component ends up in its own subtree.  Ties in
    the merge criterion go to the smallest pair of community ids (original
    nodes keep their index, merged communities get ``n, n+1, ...``).
    """
    if t < 1:
        raise ValueError("walk length t must be >= 1")
    n = net.n_nodes
    if n == 0:
        raise ValueError("walktrap needs a non-empty graph")
    edges = net.undirected_edges()
    if not edges:
        raise MetricUndefined("walktrap needs at least one edge")
    m = len(edges)

    adj = np.zeros((n, n))
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1.0
    deg = adj.sum(axis=1)
    inv_deg = np.divide(1.0, deg, out=np.zeros(n), where=deg > 0)
    walk = np.linalg.matrix_power(adj * inv_deg[:, None], t)
    scale = np.sqrt(inv_deg)  # distance weights 1/d(k); 0 for isolated nodes

    size = {i: 1 for i in range(n)}
    vec = {i: walk[i] * scale for i in range(n)}
    internal = {i: 0 for i in range(n)}
    total = {i: float(deg[i]) for i in range(n)}
    links: dict[int, dict[int, int]] = {i: {} for i in range(n)}
    for u, v in edges:
        links[u][v] = 1
        links[v][u] = 1

    def delta_sigma(a: int, b: int) -> float:
        diff = vec[a] - vec[b]
        return float(size[a] * size[b] / (size[a] + size[b]) * diff.dot(diff) / n)

    heap = [(delta_sigma(u, v), u, v) for u, v in edges]
    heapq.heapify(heap)

    q = sum(-((total[i] / (2 * m)) ** 2) for i in range(n))
    q_trace = [q]
    merges: list[Merge] = []
    next_id = n
    while heap:
        ds, a, b = heapq.heappop(heap)
        if a not in size or b not in size:
            continue
        c = next_id
        next_id += 1
        size[c] = size[a] + size[b]
        vec[c] = (size[a] * vec[a] + size[b] * vec[b]) / size[c]
        between = links[a].get(b, 0)
        internal[c] = internal[a] + internal[b] + between
        total[c] = total[a] + total[b]
        merged_links: dict[int, int] = {}
        for old in (a, b):
            for other, w in links[old].items():
                if other not in (a, b):
                    merged_links[other] = merged_links.get(other, 0) + w
        q += (
            between / m
            - (total[c] / (2 * m)) ** 2
            + (total[a] / (2 * m)) ** 2
            + (total[b] / (2 * m)) ** 2
        )
        for old in (a, b):
            for other in links.pop(old):
                if other not in (a, b):
                    del links[other][old]
            del size[old], vec[old], internal[old], total[old]
        links[c] = merged_links
        for other, w in sorted(merged_links.items()):
            links[other][c] = w
            heapq.heappush(heap, (delta_sigma(other, c), other, c))
        merges.append(Merge(a, b, c, ds, q))
        q_trace.append(q)

    best = int(np.argmax(q_trace))
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for step in merges[:best]:
        members[step.merged] = members.pop(step.a) + members.pop(step.b)
    return Partition(net.nodes, _sort_communities(members.values()), q_trace[best], tuple(merges), best)


def community_size_distribution(partition: Partition) -> list[tuple[int, int]]:
    """``[(rank, size)]`` with the largest community at rank 1."""
    return [(rank, size) for rank, size in enumerate(sorted(partition.sizes, reverse=True), start=1)]


def top_share(partition: Partition, k: int = 3) -> float:
    """Fraction of nodes held by the ``k`` largest communities."""
    n = sum(partition.sizes)
    return sum(sorted(partition.sizes, reverse=True)[:k]) / n if n else 0.0


@dataclass(frozen=True)
class DomainMixing:
    domains: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # one row per community
    purity: float

    def to_csv(self) -> str:
        head = "community," + ",".join(self.domains) + "\n"
        return head + "".join(f"{i}," + ",".join(map(str, row)) + "\n" for i, row in enumerate(self.counts))

    def to_dict(self) -> dict[str, Any]:
        return {"domains": list(self.domains), "counts": [list(r) for r in self.counts], "purity": self.purity}


def community_domain_mixing(partition: Partition, labels: Mapping[str, str]) -> DomainMixing:
    """Community x domain contingency table and size-weighted purity.

    Nodes missing from ``labels`` count as ``"unclassified"``.
    """
    node_domain = [labels.get(label) or "unclassified" for label in partition.nodes]
    domains = tuple(sorted(set(node_domain)))
    col = {d: i for i, d in enumerate(domains)}
    rows = []
    for members in partition.communities:
        row = [0] * len(domains)
        for v in members:
            row[col[node_domain[v]]] += 1
        rows.append(tuple(row))
    n = sum(partition.sizes)
    purity = sum(max(r) for r in rows) / n if n else 0.0
    return DomainMixing(domains, tuple(rows), purity)
