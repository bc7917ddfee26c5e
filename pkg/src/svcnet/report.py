"""Analysis bundles: every network of a collection measured and rendered as tables.

One :class:`NetworkAnalysis` per network holds the component shares, the
giant component's size and density, its topology metrics, its Walktrap
partition and its degree-distribution fits.  :class:`AnalysisBundle`
renders them as JSON, markdown tables and CSV series; identical inputs and
seed give byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Sequence

from svcnet.community import Partition, community_size_distribution, walktrap
from svcnet.errors import MetricUndefined
from svcnet.metrics import TopologyReport, edge_density, topology_report
from svcnet.model import Collection
from svcnet.network import (
    InteractionNetwork,
    Invocation,
    NetworkKind,
    build_operation_network,
    build_parameter_network,
    decompose,
)
from svcnet.ontology import LEVELS, MatchDegree, OntologyRegistry
from svcnet.powerlaw import DegreeDistributionFit, fit_degree_distribution, series_csv
from svcnet.util import derive_seed

__all__ = [
    "AnalysisBundle",
    "AnalysisSettings",
    "NetworkAnalysis",
    "analyze_collection",
    "analyze_network",
    "check_containment",
    "network_name",
]

NA = "n/a"


@dataclass(frozen=True)
class AnalysisSettings:
    er_samples: int = 32
    bootstrap: int = 100
    seed: int = 0
    walk_length: int = 4
    xmin: int | None = 1  # None: choose by KS minimization
    degree: str = "total"


def network_name(net: InteractionNetwork) -> str:
    if net.kind is NetworkKind.PARAMETER:
        return "parameter"
    if net.match_level is None:
        return "operation"
    return f"operation-{net.match_level.label}-{net.invocation.value}"


@dataclass
class NetworkAnalysis:
    name: str
    network: InteractionNetwork = field(repr=False)
    components: dict[str, Any]
    structure: dict[str, Any]
    topology: TopologyReport | None
    partition: Partition | None
    degrees: DegreeDistributionFit | None
    notes: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        part = None
        if self.partition is not None:
            part = {
                "n_communities": len(self.partition.communities),
                "modularity": self.partition.modularity,
                "sizes": self.partition.sizes,
            }
        return {
            "name": self.name,
            "kind": self.network.kind.value,
            "match_level": self.network.match_level.label if self.network.match_level is not None else None,
            "invocation": self.network.invocation.value if self.network.invocation else None,
            "components": self.components,
            "giant_structure": self.structure,
            "topology": self.topology.to_dict() if self.topology else None,
            "communities": part,
            "degree_distribution": self.degrees.to_dict() if self.degrees else None,
            "notes": dict(sorted(self.notes.items())),
        }


def analyze_network(net: InteractionNetwork, settings: AnalysisSettings, name: str | None = None) -> NetworkAnalysis:
    """Measure one network; metrics are taken on its giant component."""
    name = name or network_name(net)
    dec = decompose(net)
    notes: dict[str, str] = {}
    giant = net.subgraph(dec.giant) if dec.giant is not None else None
    if giant is None:
        notes["giant"] = "no component with two or more nodes"
        structure = {"nodes": 0, "links": 0, "link_proportion": None, "density": None}
        return NetworkAnalysis(name, net, dec.summary(), structure, None, None, None, notes)

    structure = {
        "nodes": giant.n_nodes,
        "links": giant.n_edges,
        # isolated nodes carry no links, so this is also the share of the isolate-free network
        "link_proportion": giant.n_edges / net.n_edges,
        "density": edge_density(giant.n_nodes, giant.n_edges),
    }
    topo = topology_report(giant, settings.er_samples, derive_seed(settings.seed, f"er:{name}"))
    try:
        part = walktrap(giant, settings.walk_length)
    except MetricUndefined as exc:
        part, notes["communities"] = None, str(exc)
    fits = fit_degree_distribution(
        giant, settings.degree, settings.xmin, settings.bootstrap, derive_seed(settings.seed, f"bootstrap:{name}")
    )
    return NetworkAnalysis(name, net, dec.summary(), structure, topo, part, fits, notes)


def check_containment(nets: dict[MatchDegree, InteractionNetwork]) -> None:
    """Raise if an exact or plugin link is missing from the fitin network."""
    fitin = nets[MatchDegree.FITIN].edge_labels()
    for level in (MatchDegree.EXACT, MatchDegree.PLUGIN):
        missing = nets[level].edge_labels() - fitin
        if missing:
            raise AssertionError(f"{len(missing)} {level.label} links absent from the fitin network, e.g. {min(missing)}")


def isolated_overlap(analyses: Sequence[NetworkAnalysis]) -> list[dict[str, Any]]:
    """Pairwise overlap (shared count and Jaccard index) of isolated-node sets."""
    sets = {}
    for a in analyses:
        iso = decompose(a.network).isolated
        sets[a.name] = {a.network.nodes[i] for i in iso}
    rows = []
    for x, y in combinations(sets, 2):
        union = sets[x] | sets[y]
        shared = len(sets[x] & sets[y])
        rows.append(
            {
                "a": x,
                "b": y,
                "isolated_a": len(sets[x]),
                "isolated_b": len(sets[y]),
                "shared": shared,
                "jaccard": shared / len(union) if union else None,
            }
        )
    return rows


def analyze_collection(
    coll: Collection,
    onts: OntologyRegistry,
    settings: AnalysisSettings,
    *,
    all_levels: bool = False,
    level: MatchDegree = MatchDegree.EXACT,
    invocation: Invocation = Invocation.FULL,
    network: NetworkKind = NetworkKind.OPERATION,
) -> AnalysisBundle:
    """Analyze one network, or with ``all_levels`` the four operation networks and the parameter network."""
    if all_levels:
        ops = {lv: build_operation_network(coll, onts, lv, invocation) for lv in LEVELS}
        check_containment(ops)
        nets = [*ops.values(), build_parameter_network(coll, onts)]
    elif network is NetworkKind.PARAMETER:
        nets = [build_parameter_network(coll, onts)]
    else:
        nets = [build_operation_network(coll, onts, level, invocation)]
    analyses = [analyze_network(n, settings) for n in nets]
    op_analyses = [a for a in analyses if a.network.kind is NetworkKind.OPERATION]
    overlap = isolated_overlap(op_analyses) if len(op_analyses) > 1 else []
    return AnalysisBundle(settings, analyses, overlap)


# -- rendering -------------------------------------------------------------


def _num(x: float | None, digits: int = 2) -> str:
    return NA if x is None else f"{x:.{digits}f}"


def _pct(x: float | None) -> str:
    return NA if x is None else f"{100 * x:.2f}%"


def _table(head: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(head) + " |", "|" + "|".join("---" for _ in head) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


@dataclass
class AnalysisBundle:
    settings: AnalysisSettings
    analyses: list[NetworkAnalysis]
    isolated_overlap: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        s = self.settings
        return {
            "settings": {
                "er_samples": s.er_samples,
                "bootstrap": s.bootstrap,
                "seed": s.seed,
                "walk_length": s.walk_length,
                "xmin": s.xmin,
                "degree": s.degree,
            },
            "networks": [a.to_dict() for a in self.analyses],
            "isolated_overlap": self.isolated_overlap,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def table_components(self) -> list[list[str]]:
        rows = []
        for a in self.analyses:
            f = decompose(a.network).fractions()  # exact, not the rounded summary
            rows.append(
                [a.name, _pct(f["isolated"]), _pct(f["small"]), _pct(f["giant"]), _pct(f["small"] + f["giant"])]
            )
        return rows

    def to_markdown(self) -> str:
        out = ["# Network analysis\n"]
        out.append("\n## Components\n\n")
        out.append(
            _table(["Network", "Isolated nodes", "Small components", "Giant component", "Small + giant"],
                   self.table_components())
        )
        out.append("\n## Giant component structure\n\n")
        out.append(
            _table(
                ["Network", "Nodes", "Links", "Link proportion", "Density"],
                [
                    [a.name, str(a.structure["nodes"]), str(a.structure["links"]),
                     _pct(a.structure["link_proportion"]), _num(a.structure["density"], 4)]
                    for a in self.analyses
                ],
            )
        )
        out.append("\n## Distance, clustering and assortativity (giant component)\n\n")
        rows = []
        for a in self.analyses:
            t = a.topology
            if t is None:
                rows.append([a.name] + [NA] * 6)
                continue
            rows.append(
                [a.name, _num(t.avg_distance), _num(t.distance_ratio), NA if t.diameter is None else str(t.diameter),
                 _num(t.clustering), _num(t.clustering_ratio), _num(t.assortativity)]
            )
        out.append(_table(["Network", "L", "L/L_ER", "Diameter", "C", "C/C_ER", "r"], rows))
        out.append("\n## Communities (giant component)\n\n")
        out.append(
            _table(
                ["Network", "Communities", "Modularity"],
                [
                    [a.name, NA if a.partition is None else str(len(a.partition.communities)),
                     NA if a.partition is None else _num(a.partition.modularity)]
                    for a in self.analyses
                ],
            )
        )
        out.append("\n## Degree distribution (giant component)\n\n")
        rows = []
        for a in self.analyses:
            pl = a.degrees.power_law if a.degrees else None
            ex = a.degrees.exponential if a.degrees else None
            rows.append(
                [a.name,
                 _num(pl.gamma) if pl else NA, str(pl.xmin) if pl else NA,
                 _num(pl.ks_statistic, 3) if pl else NA,
                 _num(pl.ks_p_value) if pl and pl.ks_p_value is not None else NA,
                 _num(ex.rate, 3) if ex else NA, _num(ex.ks_statistic, 3) if ex else NA]
            )
        out.append(_table(["Network", "gamma", "xmin", "KS", "p", "lambda", "KS (exp)"], rows))
        if self.isolated_overlap:
            out.append("\n## Isolated-node overlap\n\n")
            out.append(
                _table(
                    ["Network A", "Network B", "Isolated A", "Isolated B", "Shared", "Jaccard"],
                    [[r["a"], r["b"], str(r["isolated_a"]), str(r["isolated_b"]), str(r["shared"]),
                      _num(r["jaccard"])] for r in self.isolated_overlap],
                )
            )
        return "".join(out)

    def csv_files(self) -> dict[str, str]:
        files = {}
        for a in self.analyses:
            if a.degrees is not None and a.degrees.cumulative:
                files[f"degree_{a.name}.csv"] = series_csv(a.degrees.cumulative)
            if a.partition is not None:
                dist = community_size_distribution(a.partition)
                files[f"community_sizes_{a.name}.csv"] = "rank,size\n" + "".join(f"{r},{s}\n" for r, s in dist)
        return files

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {"analysis.json": self.to_json(), "report.md": self.to_markdown(), **self.csv_files()}
        written = []
        for name, text in files.items():
            path = out / name
            path.write_text(text, encoding="utf-8")
            written.append(path)
        return written
