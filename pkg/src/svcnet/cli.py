"""``svcnet`` command line.

Exit status: 0 success, 1 no composition found, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from svcnet.community import community_domain_mixing, community_size_distribution, walktrap
from svcnet.composition import CompositionRequest, Strategy, compose
from svcnet.errors import InputError, MetricUndefined
from svcnet.generator import GeneratorParams, generate_collection
from svcnet.model import Collection, dump_collection, load_collection
from svcnet.network import (
    InteractionNetwork,
    Invocation,
    NetworkKind,
    build_operation_network,
    build_parameter_network,
    export,
    giant_component,
    network_from_json,
)
from svcnet.ontology import ConceptRef, MatchDegree, OntologyRegistry, dump_ontology, load_ontology
from svcnet.report import AnalysisSettings, analyze_collection
from svcnet.wsdl import import_wsdl_dir

LEVEL_CHOICES = ["exact", "plugin", "subsume", "fitin"]


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: cannot read: {exc}") from None


def _write(path: str | Path, text: str) -> None:
    p = Path(path)
    if p.parent != Path("."):
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _load_inputs(args: argparse.Namespace) -> tuple[Collection, OntologyRegistry]:
    onts = OntologyRegistry()
    for path in args.ontology:
        try:
            onts.register(load_ontology(_read(path)))
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None
    try:
        coll = load_collection(_read(args.collection))
        coll.validate(onts)
    except InputError as exc:
        raise InputError(f"{args.collection}: {exc}") from None
    return coll, onts


def _build(args: argparse.Namespace, coll: Collection, onts: OntologyRegistry) -> InteractionNetwork:
    if args.network == "parameter":
        return build_parameter_network(coll, onts)
    return build_operation_network(
        coll, onts, MatchDegree.from_label(args.match), Invocation(args.invocation), allow_vacuous=args.allow_vacuous
    )


def _network_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", choices=["operation", "parameter"], default="operation")
    p.add_argument("--match", choices=LEVEL_CHOICES, default="exact")
    p.add_argument("--invocation", choices=["full", "partial"], default="full")
    p.add_argument(
        "--allow-vacuous", action="store_true", help="let operations without inputs be invoked by every other operation"
    )


def _inputs(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--collection", required=required, help="canonical collection JSON")
    p.add_argument("--ontology", action="append", default=[], help="ontology JSON (repeatable)")


def _warn_parameter(args: argparse.Namespace) -> None:
    if args.network == "parameter" and (args.match != "exact" or args.invocation != "full" or args.allow_vacuous):
        print("svcnet: warning: --match/--invocation/--allow-vacuous do not apply to parameter networks", file=sys.stderr)


def cmd_extract(args: argparse.Namespace) -> int:
    _warn_parameter(args)
    coll, onts = _load_inputs(args)
    text = export(_build(args, coll, onts), args.format)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _xmin(value: str) -> int | None:
    if value == "auto":
        return None
    try:
        x = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("xmin must be a positive integer or 'auto'") from None
    if x < 1:
        raise argparse.ArgumentTypeError("xmin must be >= 1")
    return x


def cmd_analyze(args: argparse.Namespace) -> int:
    _warn_parameter(args)
    coll, onts = _load_inputs(args)
    settings = AnalysisSettings(
        er_samples=args.er_samples,
        bootstrap=args.bootstrap,
        seed=args.seed,
        walk_length=args.walk_length,
        xmin=args.xmin,
        degree=args.degree,
    )
    bundle = analyze_collection(
        coll,
        onts,
        settings,
        all_levels=args.all_levels,
        level=MatchDegree.from_label(args.match),
        invocation=Invocation(args.invocation),
        network=NetworkKind(args.network),
    )
    bundle.write(args.out_dir)
    sys.stdout.write(bundle.to_markdown())
    return 0


def _read_domains(path: str) -> dict[str, str]:
    reader = csv.reader(io.StringIO(_read(path)))
    rows = [r for r in reader if r]
    if rows and [c.strip().lower() for c in rows[0][:2]] == ["node", "domain"]:
        rows = rows[1:]
    labels = {}
    for n, row in enumerate(rows, start=1):
        if len(row) < 2:
            raise InputError(f"{path}: row {n}: expected 'node,domain'")
        labels[row[0].strip()] = row[1].strip()
    return labels


def cmd_communities(args: argparse.Namespace) -> int:
    if args.input_network:
        try:
            net = network_from_json(_read(args.input_network))
        except (InputError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{args.input_network}: not a network document: {exc}") from None
    elif args.collection:
        _warn_parameter(args)
        coll, onts = _load_inputs(args)
        net = _build(args, coll, onts)
    else:
        raise InputError("one of --collection or --input-network is required")
    target = net if args.whole_network else giant_component(net)
    if target is None:
        raise InputError("network has no links; nothing to partition")
    try:
        part = walktrap(target, args.walk_length)
    except MetricUndefined as exc:
        raise InputError(str(exc)) from None
    out = Path(args.out_dir)
    _write(out / "partition.json", part.to_json())
    _write(out / "membership.csv", part.membership_csv())
    _write(
        out / "community_sizes.csv",
        "rank,size\n" + "".join(f"{r},{s}\n" for r, s in community_size_distribution(part)),
    )
    if args.domains:
        mixing = community_domain_mixing(part, _read_domains(args.domains))
        _write(out / "domain_mixing.csv", mixing.to_csv())
        _write(out / "domain_mixing.json", json.dumps(mixing.to_dict(), indent=2) + "\n")
    q = "n/a" if part.modularity is None else f"{part.modularity:.4f}"
    print(f"{len(part.communities)} communities, modularity {q}")
    return 0


def _concepts(value: str, flag: str) -> frozenset[ConceptRef]:
    items = [v.strip() for v in value.split(",") if v.strip()] if value else []
    try:
        return frozenset(ConceptRef.parse(v) for v in items)
    except InputError as exc:
        raise InputError(f"{flag}: {exc}") from None


def cmd_compose(args: argparse.Namespace) -> int:
    coll, onts = _load_inputs(args)
    try:
        req = CompositionRequest(
            provided=_concepts(args.provided, "--provided"),
            goals=_concepts(args.goal, "--goal"),
            level=MatchDegree.from_label(args.level),
            max_depth=args.max_depth,
            strategy=Strategy(args.strategy),
        )
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None
    plan = compose(req, coll, onts, walk_length=args.walk_length)
    sys.stdout.write(plan.to_json())
    return 0 if plan.solvable else 1


def cmd_generate(args: argparse.Namespace) -> int:
    params = GeneratorParams(
        n_services=args.services,
        ops_per_service=args.ops_per_service,
        n_concepts=args.concepts,
        concept_reuse_skew=args.skew,
        seed=args.seed,
        min_inputs=args.min_inputs,
        max_inputs=args.max_inputs,
        min_outputs=args.min_outputs,
        max_outputs=args.max_outputs,
        max_depth=args.max_ontology_depth,
    )
    try:
        coll, ont = generate_collection(params)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"generator parameters: {exc}") from None
    _write(args.out_collection, dump_collection(coll))
    _write(args.out_ontology, dump_ontology(ont))
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    if not Path(args.wsdl_dir).is_dir():
        raise InputError(f"{args.wsdl_dir}: not a directory")
    coll, report = import_wsdl_dir(args.wsdl_dir)
    _write(args.out, dump_collection(coll))
    _write(f"{args.out}.report.json", json.dumps(report.to_dict(), indent=2) + "\n")
    print(f"{report.services} services, {report.operations} operations from {report.files} files")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svcnet", description="Interaction networks of semantic Web services.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="build and export an interaction network")
    _inputs(p)
    _network_options(p)
    p.add_argument("--format", choices=["tsv", "dot", "json"], default="tsv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("analyze", help="topology, community and degree-distribution report")
    _inputs(p)
    _network_options(p)
    p.add_argument("--all-levels", action="store_true", help="all four operation networks plus the parameter network")
    p.add_argument("--er-samples", type=int, default=32, help="random graphs per baseline (default 32)")
    p.add_argument(
        "--bootstrap",
        type=int,
        default=100,
        help="KS bootstrap replicates (default 100; the p-value resolution is 1/B, 0 skips it)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--walk-length", type=int, default=4)
    p.add_argument("--xmin", type=_xmin, default=1, help="power-law lower cutoff, or 'auto' (default 1)")
    p.add_argument("--degree", choices=["in", "out", "total"], default="total")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("communities", help="Walktrap communities of a network's giant component")
    _inputs(p, required=False)
    _network_options(p)
    p.add_argument("--input-network", help="network JSON written by 'extract --format json'")
    p.add_argument("--walk-length", type=int, default=4)
    p.add_argument("--whole-network", action="store_true", help="partition every node, not only the giant component")
    p.add_argument("--domains", help="CSV of node,domain labels")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("compose", help="search a composition plan; JSON on stdout")
    _inputs(p)
    p.add_argument("--provided", default="", help="comma-separated concept references")
    p.add_argument("--goal", required=True, help="comma-separated concept references")
    p.add_argument("--level", choices=LEVEL_CHOICES, default="exact")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="forward")
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--walk-length", type=int, default=4, help="Walktrap walk length for community-pruned search")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("generate", help="write a synthetic collection and its ontology")
    p.add_argument("--services", type=int, required=True)
    p.add_argument("--ops-per-service", type=int, default=1)
    p.add_argument("--concepts", type=int, required=True)
    p.add_argument("--skew", type=float, default=1.0, help="Zipf exponent of concept reuse")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--min-inputs", type=int, default=1)
    p.add_argument("--max-inputs", type=int, default=3)
    p.add_argument("--min-outputs", type=int, default=1)
    p.add_argument("--max-outputs", type=int, default=2)
    p.add_argument("--max-ontology-depth", type=int, default=3)
    p.add_argument("--out-collection", required=True)
    p.add_argument("--out-ontology", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("import", help="convert a directory of SAWSDL files to a collection")
    p.add_argument("--wsdl-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_import)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"svcnet: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
