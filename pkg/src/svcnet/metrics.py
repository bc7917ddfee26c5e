"""Global topology metrics and Erdős–Rényi baselines.

Distances follow link direction; clustering and assortativity are taken on
the undirected simple projection.  Metrics with no defined value raise
:class:`MetricUndefined`; :func:`topology_report` turns those into ``None``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from svcnet.errors import MetricUndefined
from svcnet.network import InteractionNetwork, NetworkKind
from svcnet.util import ordered_map

__all__ = [
    "ERBaseline",
    "TopologyReport",
    "assortativity",
    "avg_distance",
    "clustering",
    "density",
    "diameter",
    "edge_density",
    "er_baseline",
    "er_graph",
    "topology_report",
]


def edge_density(n_nodes: int, n_edges: int) -> float:
    """``M / (N (N - 1))`` for a directed simple graph."""
    if n_nodes < 2:
        raise MetricUndefined("density needs at least 2 nodes")
    return n_edges / (n_nodes * (n_nodes - 1))


def density(net: InteractionNetwork) -> float:
    return edge_density(net.n_nodes, net.n_edges)


def _adjacency(n: int, edges: Any, symmetric: bool = False) -> csr_matrix:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    rows, cols = e[:, 0], e[:, 1]
    if symmetric:
        rows, cols = np.concatenate([rows, cols]), np.concatenate([cols, rows])
    a = csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))
    if symmetric:
        a.data[:] = 1  # reciprocal links collapse to one undirected edge
    return a


def distance_stats(net: InteractionNetwork) -> tuple[float, int]:
    """(average distance, diameter) over ordered pairs ``u != v`` with ``v`` reachable from ``u``."""
    n = net.n_nodes
    if n < 2 or not net.edges:
        raise MetricUndefined("no reachable pair of distinct nodes")
    d = shortest_path(_adjacency(n, net.edges), method="D", directed=True, unweighted=True)
    np.fill_diagonal(d, np.inf)
    reach = np.isfinite(d)
    count = int(reach.sum())
    lengths = d[reach].astype(np.int64)
    return int(lengths.sum()) / count, int(lengths.max())


def avg_distance(net: InteractionNetwork) -> float:
    return distance_stats(net)[0]


def diameter(net: InteractionNetwork) -> int:
    return distance_stats(net)[1]


def clustering(net: InteractionNetwork) -> float:
    """Global transitivity ``3 * triangles / connected triples`` of the undirected projection."""
    und = net.undirected_edges()
    if not und:
        raise MetricUndefined("no connected triple")
    a = _adjacency(net.n_nodes, und, symmetric=True)
    deg = np.asarray(a.sum(axis=1)).ravel()
    triples2 = int((deg * (deg - 1)).sum())  # twice the number of connected triples
    if triples2 == 0:
        raise MetricUndefined("no connected triple")
    closed6 = int((a @ a).multiply(a).sum())  # six times the number of triangles
    return closed6 / triples2


def assortativity(net: InteractionNetwork) -> float:
    """Pearson correlation of endpoint degrees over undirected edges, both orientations counted."""
    und = net.undirected_edges()
    if not und:
        raise MetricUndefined("no edges")
    e = np.asarray(und, dtype=np.int64)
    deg = np.bincount(e.ravel(), minlength=net.n_nodes).astype(float)
    x = np.concatenate([deg[e[:, 0]], deg[e[:, 1]]])
    y = np.concatenate([deg[e[:, 1]], deg[e[:, 0]]])
    xc, yc = x - x.mean(), y - y.mean()
    var = float((xc * xc).sum())
    if var <= 1e-12 * max(1.0, float((x * x).sum())):
        raise MetricUndefined("zero degree variance over edge endpoints")
    return float((xc * yc).sum()) / var


def er_graph(n: int, m: int, rng: np.random.Generator) -> InteractionNetwork:
    """Uniform directed G(n, M): ``m`` distinct ordered pairs, no self-loops."""
    pairs = n * (n - 1)
    if m < 0 or m > pairs:
        raise ValueError(f"cannot place {m} links on {n} nodes")
    idx = np.sort(rng.choice(pairs, size=m, replace=False)) if m else np.zeros(0, dtype=np.int64)
    u = idx // max(n - 1, 1)
    r = idx % max(n - 1, 1)
    v = r + (r >= u)
    edges = tuple(sorted(zip(u.tolist(), v.tolist())))
    return InteractionNetwork(NetworkKind.OPERATION, tuple(str(i) for i in range(n)), edges, None, None)


@dataclass(frozen=True)
class ERBaseline:
    avg_distance: float
    clustering: float | None
    samples: int
    distance_samples: int
    clustering_samples: int
    seed: int


def _er_sample(args: tuple[int, int, int, int]) -> tuple[float | None, float | None]:
    n, m, seed, index = args
    g = er_graph(n, m, np.random.default_rng([seed, index]))
    try:
        L = avg_distance(g)
    except MetricUndefined:
        L = None
    try:
        C = clustering(g)
    except MetricUndefined:
        C = None
    return L, C


def er_baseline(n: int, m: int, samples: int, seed: int) -> ERBaseline:
    """Mean distance and clustering over ``samples`` G(n, M) draws.

    Sample ``i`` uses the RNG stream ``(seed, i)``, so results do not depend
    on how samples are scheduled.  Undefined samples are skipped and the
    number of defined ones reported.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if m < 0 or m > n * (n - 1):
        raise ValueError(f"infeasible link count {m} for {n} nodes")
    results = ordered_map(_er_sample, [(n, m, seed, i) for i in range(samples)])
    Ls = [L for L, _ in results if L is not None]
    Cs = [C for _, C in results if C is not None]
    if not Ls:
        raise MetricUndefined("no sampled ER graph has a reachable pair")
    return ERBaseline(
        avg_distance=float(np.mean(Ls)),
        clustering=float(np.mean(Cs)) if Cs else None,
        samples=samples,
        distance_samples=len(Ls),
        clustering_samples=len(Cs),
        seed=seed,
    )


@dataclass(frozen=True)
class TopologyReport:
    n_nodes: int
    n_edges: int
    density: float | None
    avg_distance: float | None
    diameter: int | None
    clustering: float | None
    assortativity: float | None
    avg_distance_er: float | None
    clustering_er: float | None
    distance_ratio: float | None
    clustering_ratio: float | None
    er_samples: int
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _maybe(fn, *args):
    try:
        return fn(*args)
    except MetricUndefined:
        return None


def topology_report(net: InteractionNetwork, er_samples: int = 32, seed: int = 0) -> TopologyReport:
    """All scalar metrics of ``net`` plus ratios to a same-size G(n, M) baseline."""
    dist = _maybe(distance_stats, net)
    L, diam = dist if dist is not None else (None, None)
    C = _maybe(clustering, net)
    base = None
    if er_samples > 0 and net.n_nodes >= 2:
        base = _maybe(er_baseline, net.n_nodes, net.n_edges, er_samples, seed)
    L_er = base.avg_distance if base else None
    C_er = base.clustering if base else None
    return TopologyReport(
        n_nodes=net.n_nodes,
        n_edges=net.n_edges,
        density=_maybe(density, net),
        avg_distance=L,
        diameter=diam,
        clustering=C,
        assortativity=_maybe(assortativity, net),
        avg_distance_er=L_er,
        clustering_er=C_er,
        distance_ratio=L / L_er if L is not None and L_er else None,
        clustering_ratio=C / C_er if C is not None and C_er else None,
        er_samples=er_samples,
        seed=seed,
    )
