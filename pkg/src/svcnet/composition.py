"""Composition search over a collection.

Every strategy shares one invocation rule: an operation can run once each
of its inputs is satisfied, at the request's match level, by a concept
already available (provided, or output by an earlier step).  Searches
proceed in rounds; all operations invocable in a round fire together, so
the first round that covers every goal gives the minimal plan depth.

Strategies differ in which operations they consider and in what order:

``forward``           every operation, collection order
``hub-seeded``        every operation, by descending out-degree
``backward``          operations found by goal regression, by descending in-degree
``community-pruned``  goal communities plus their neighbours, with fallback
``two-phase``         parameter-network reachability first, then the
                      operations on provided-to-goal paths
"""

from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from svcnet.community import Partition, walktrap
from svcnet.model import Collection
from svcnet.network import (
    InteractionNetwork,
    Invocation,
    build_operation_network,
    build_parameter_network,
    giant_component,
)
from svcnet.ontology import LEVELS, ConceptRef, MatchDegree, OntologyRegistry, satisfies

__all__ = [
    "Binding",
    "CompositionPlan",
    "CompositionRequest",
    "Strategy",
    "backward_search",
    "community_pruned_search",
    "compose",
    "forward_search",
    "hub_seeded_search",
    "two_phase_search",
    "validate_plan",
]

PROVIDED = "provided"


class Strategy(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    HUB_SEEDED = "hub-seeded"
    COMMUNITY_PRUNED = "community-pruned"
    TWO_PHASE = "two-phase"


@dataclass(frozen=True)
class CompositionRequest:
    provided: frozenset[ConceptRef]
    goals: frozenset[ConceptRef]
    level: MatchDegree = MatchDegree.EXACT
    max_depth: int = 8
    strategy: Strategy = Strategy.FORWARD

    def __post_init__(self) -> None:
        object.__setattr__(self, "provided", frozenset(self.provided))
        object.__setattr__(self, "goals", frozenset(self.goals))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not self.goals:
            raise ValueError("a composition request needs at least one goal")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.level not in LEVELS:
            raise ValueError(f"{self.level!r} is not a match level")

    def validate(self, onts: OntologyRegistry) -> None:
        for ref in sorted(self.provided | self.goals):
            onts.resolve(ref)


@dataclass(frozen=True)
class Binding:
    concept: str  # the available concept used
    source: str  # "provided" or the id of the producing step


@dataclass
class CompositionPlan:
    solvable: bool
    steps: tuple[str, ...] = ()
    bindings: dict[str, dict[str, Binding]] = field(default_factory=dict)
    goal_bindings: dict[str, Binding] = field(default_factory=dict)
    depth: int = 0
    stats: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        def b(x: Binding) -> dict[str, str]:
            return {"concept": x.concept, "source": x.source}

        return {
            "solvable": self.solvable,
            "steps": list(self.steps),
            "bindings": {s: {c: b(x) for c, x in sorted(m.items())} for s, m in self.bindings.items()},
            "goals": {g: b(x) for g, x in sorted(self.goal_bindings.items())},
            "depth": self.depth,
            "stats": dict(self.stats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _stats(**extra: Any) -> dict[str, Any]:
    return {"candidates_examined": 0, "phase1_only": False, **extra}


def _rounds(
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    candidates: Sequence[int],
    stats: dict[str, Any],
) -> CompositionPlan | None:
    """Round-by-round forward chaining restricted to ``candidates`` (in priority order)."""
    ops = coll.operations
    rank = {i: r for r, i in enumerate(candidates)}
    # concept -> (round it became available, producing op or -1 for provided)
    avail: dict[ConceptRef, tuple[int, int]] = {c: (0, -1) for c in sorted(req.provided)}

    def satisfier(c_in: ConceptRef) -> ConceptRef | None:
        hits = onts.satisfying_outputs(c_in, req.level) & avail.keys()
        if not hits:
            return None
        return min(hits, key=lambda c: (avail[c][0], rank.get(avail[c][1], -1), c))

    def done() -> bool:
        return all(satisfier(g) is not None for g in req.goals)

    fired_in: dict[int, int] = {}
    rnd = 0
    while not done():
        if rnd == req.max_depth:
            return None
        rnd += 1
        fired = []
        for i in candidates:
            if i in fired_in:
                continue
            stats["candidates_examined"] += 1
            if all(satisfier(c) is not None for c in ops[i].input_set):
                fired.append(i)
        if not fired:
            return None
        for i in fired:
            fired_in[i] = rnd
            for c in ops[i].outputs:
                avail.setdefault(c, (rnd, i))

    chosen: set[int] = set()
    bindings: dict[int, dict[str, Binding]] = {}

    def bind(c_in: ConceptRef) -> Binding:
        c = satisfier(c_in)
        producer = avail[c][1]
        if producer >= 0:
            take(producer)
            return Binding(str(c), ops[producer].id)
        return Binding(str(c), PROVIDED)

    def take(i: int) -> None:
        if i in chosen:
            return
        chosen.add(i)
        bindings[i] = {str(c): bind(c) for c in sorted(ops[i].input_set)}

    goal_bindings = {str(g): bind(g) for g in sorted(req.goals)}
    order = sorted(chosen, key=lambda i: (fired_in[i], rank[i]))
    return CompositionPlan(
        solvable=True,
        steps=tuple(ops[i].id for i in order),
        bindings={ops[i].id: bindings[i] for i in order},
        goal_bindings=goal_bindings,
        depth=max((fired_in[i] for i in chosen), default=0),
        stats=stats,
    )


def _run(req, coll, onts, candidates, stats) -> CompositionPlan:
    req.validate(onts)
    plan = _rounds(req, coll, onts, candidates, stats)
    return plan if plan is not None else CompositionPlan(False, stats=stats)


def _by_degree(coll: Collection, degrees: Iterable[int], pool: Iterable[int] | None = None) -> list[int]:
    deg = list(degrees)
    pool = range(len(coll.operations)) if pool is None else pool
    return sorted(pool, key=lambda i: (-deg[i], i))


def forward_search(
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    *,
    hub_network: InteractionNetwork | None = None,
) -> CompositionPlan:
    """Minimal-depth forward chaining.

    With ``hub_network`` (an operation network at the request's level) the
    candidates are tried hubs first, which decides between equally early
    producers of a concept.
    """
    if hub_network is not None:
        candidates = _by_degree(coll, hub_network.out_degrees())
    else:
        candidates = list(range(len(coll.operations)))
    return _run(req, coll, onts, candidates, _stats())


def hub_seeded_search(req, coll, onts, network: InteractionNetwork | None = None) -> CompositionPlan:
    if network is None:
        network = build_operation_network(coll, onts, req.level, Invocation.FULL)
    return forward_search(req, coll, onts, hub_network=network)


def backward_search(
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    network: InteractionNetwork | None = None,
) -> CompositionPlan:
    """Goal regression, then forward assembly of the plan.

    Starting from the goals, repeatedly collect the operations with an
    output satisfying an open subgoal and open their inputs (those no
    provided concept satisfies) as new subgoals, for at most ``max_depth``
    levels.  The plan is then assembled and checked by forward chaining over
    the collected operations only, authorities (high in-degree) first.
    """
    req.validate(onts)
    if network is None:
        network = build_operation_network(coll, onts, req.level, Invocation.FULL)
    ops = coll.operations
    stats = _stats()
    producers: dict[ConceptRef, list[int]] = defaultdict(list)
    for i, op in enumerate(ops):
        for c in op.output_set:
            producers[c].append(i)

    def covered(c: ConceptRef) -> bool:
        return bool(onts.satisfying_outputs(c, req.level) & req.provided)

    relevant: set[int] = set()
    opened: set[ConceptRef] = set()
    frontier = {g for g in req.goals if not covered(g)}
    for _ in range(req.max_depth):
        opened |= frontier
        found: set[int] = set()
        for sub in sorted(frontier):
            for c_out in onts.satisfying_outputs(sub, req.level):
                for i in producers.get(c_out, ()):
                    stats["candidates_examined"] += 1
                    if i not in relevant:
                        found.add(i)
        if not found:
            break
        relevant |= found
        frontier = {c for i in found for c in ops[i].input_set if not covered(c)} - opened
    stats["regressed_operations"] = len(relevant)
    candidates = _by_degree(coll, network.in_degrees(), relevant)
    plan = _rounds(req, coll, onts, candidates, stats)
    return plan if plan is not None else CompositionPlan(False, stats=stats)


def community_pruned_search(
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    partition: Partition | None,
    network: InteractionNetwork | None = None,
) -> CompositionPlan:
    """Search the communities holding goal producers and their neighbours first.

    ``partition`` labels nodes with operation ids.  When the pruned search
    fails (or the partition is empty) the unpruned forward search is run
    and its work added to the counters.
    """
    req.validate(onts)
    n = len(coll.operations)
    stats = _stats(total_candidates=n, pruned_candidates=n, fallback=False)
    if partition is None or not partition.communities:
        plan = _rounds(req, coll, onts, list(range(n)), stats)
        return plan if plan is not None else CompositionPlan(False, stats=stats)
    if network is None:
        network = build_operation_network(coll, onts, req.level, Invocation.FULL)

    community_of: dict[int, int] = {}
    for ci, members in enumerate(partition.communities):
        for v in members:
            community_of[coll.index[partition.nodes[v]]] = ci
    goal_outputs = set().union(*(onts.satisfying_outputs(g, req.level) for g in req.goals))
    seeds = {community_of[i] for i, op in enumerate(coll.operations) if i in community_of and op.output_set & goal_outputs}
    ring = set(seeds)
    for u, v in network.edges:
        cu, cv = community_of.get(u), community_of.get(v)
        if cu is not None and cv is not None and (cu in seeds or cv in seeds):
            ring.update((cu, cv))
    pool = sorted(i for i, c in community_of.items() if c in ring)
    stats["pruned_candidates"] = len(pool)
    plan = _rounds(req, coll, onts, pool, stats)
    if plan is None:
        stats["fallback"] = True
        plan = _rounds(req, coll, onts, list(range(n)), stats)
    return plan if plan is not None else CompositionPlan(False, stats=stats)


def _phase1(
    req: CompositionRequest, coll: Collection, onts: OntologyRegistry, pnet: InteractionNetwork
) -> tuple[bool, set[int]]:
    """Reachability on the parameter network; returns (goals reachable, phase-2 candidates)."""
    level = req.level
    concept = [ConceptRef.parse(label) for label in pnet.nodes]
    succ: dict[int, list[int]] = defaultdict(list)
    for u, v in pnet.edges:
        succ[u].append(v)
    input_nodes = sorted(succ)
    accepts = {u: onts.satisfying_outputs(concept[u], level) for u in input_nodes}

    # Forward: concepts obtainable from what is provided (zero-input operations need nothing).
    avail: set[ConceptRef] = set(req.provided)
    for op in coll.operations:
        if not op.input_set:
            avail |= op.output_set
    usable: set[int] = set()
    changed = True
    while changed:
        changed = False
        for u in input_nodes:
            if u not in usable and accepts[u] & avail:
                usable.add(u)
                avail.update(concept[v] for v in succ[u])
                changed = True
    if not all(onts.satisfying_outputs(g, level) & avail for g in req.goals):
        return False, set()

    # Backward: nodes from which some goal is obtainable.
    goal_outputs = set().union(*(onts.satisfying_outputs(g, level) for g in req.goals))
    useful: set[ConceptRef] = set(goal_outputs)
    leading: set[int] = set()  # input nodes with a link into `useful`
    changed = True
    while changed:
        changed = False
        for u in input_nodes:
            if u in leading or not any(concept[v] in useful for v in succ[u]):
                continue
            leading.add(u)
            useful |= accepts[u]
            changed = True

    ops: set[str] = set()
    for (u, v), prov in pnet.provenance.items():
        if u in usable and concept[v] in useful:
            ops.update(prov)
    candidates = {coll.index[o] for o in ops}
    for i, op in enumerate(coll.operations):
        if not op.input_set and op.output_set & useful:
            candidates.add(i)
    return True, candidates


def two_phase_search(
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    parameter_network: InteractionNetwork | None = None,
) -> CompositionPlan:
    """Decide solvability on the parameter network, then search only the operations on the way.

    Links between concepts that match at the request's level are followed
    too, so plugin/subsume/fitin requests are handled.  An unreachable goal
    returns at once with ``phase1_only`` set and no operation examined.
    """
    req.validate(onts)
    stats = _stats()
    if all(onts.satisfying_outputs(g, req.level) & req.provided for g in req.goals):
        return _rounds(req, coll, onts, [], stats)
    pnet = parameter_network if parameter_network is not None else build_parameter_network(coll, onts)
    reachable, candidates = _phase1(req, coll, onts, pnet)
    if not reachable:
        stats["phase1_only"] = True
        return CompositionPlan(False, stats=stats)
    stats["phase2_candidates"] = len(candidates)
    plan = _rounds(req, coll, onts, sorted(candidates), stats)
    return plan if plan is not None else CompositionPlan(False, stats=stats)


def compose(
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    *,
    network: InteractionNetwork | None = None,
    partition: Partition | None = None,
    walk_length: int = 4,
) -> CompositionPlan:
    """Run ``req.strategy``.

    ``network`` is the full-invocation operation network at ``req.level``;
    it is built when a strategy needs it.  Community pruning without an
    explicit ``partition`` runs Walktrap on the network's giant component.
    """
    s = req.strategy
    if s is Strategy.FORWARD:
        return forward_search(req, coll, onts)
    if s is Strategy.TWO_PHASE:
        return two_phase_search(req, coll, onts)
    req.validate(onts)
    if network is None:
        network = build_operation_network(coll, onts, req.level, Invocation.FULL)
    if s is Strategy.HUB_SEEDED:
        return hub_seeded_search(req, coll, onts, network)
    if s is Strategy.BACKWARD:
        return backward_search(req, coll, onts, network)
    if partition is None:
        giant = giant_component(network)
        partition = walktrap(giant, walk_length) if giant is not None else None
    return community_pruned_search(req, coll, onts, partition, network)


def validate_plan(
    plan: CompositionPlan,
    req: CompositionRequest,
    coll: Collection,
    onts: OntologyRegistry,
    *,
    allow_partial: bool = False,
) -> list[str]:
    """Problems found by replaying ``plan`` from the provided concepts (empty list: valid).

    Uses only :meth:`OntologyRegistry.match_degree`, not the search code.
    ``allow_partial`` accepts steps with at least one satisfied input.
    """
    problems: list[str] = []
    if not plan.solvable:
        return ["plan is marked unsolvable"]
    if len(set(plan.steps)) != len(plan.steps):
        problems.append("a step occurs twice")
    if plan.depth > req.max_depth:
        problems.append(f"depth {plan.depth} exceeds max_depth {req.max_depth}")

    def ok(have: ConceptRef, want: ConceptRef) -> bool:
        return satisfies(onts.match_degree(have, want), req.level)

    available: dict[ConceptRef, int] = {c: 0 for c in req.provided}
    produced_by: dict[str, int] = {}
    chain: dict[str, int] = {}
    for pos, step in enumerate(plan.steps):
        if step not in coll.index:
            problems.append(f"unknown step {step}")
            continue
        op = coll.operation(step)
        met = 0
        longest = 0
        for c_in in op.input_set:
            sources = [c for c in available if ok(c, c_in)]
            if sources:
                met += 1
                longest = max(longest, min(available[c] for c in sources))
            elif not allow_partial:
                problems.append(f"{step}: input {c_in} not available")
        if allow_partial and op.input_set and not met:
            problems.append(f"{step}: no input available")
        binds = plan.bindings.get(step, {})
        for c_in in op.input_set:
            b = binds.get(str(c_in))
            if b is None:
                if not allow_partial:
                    problems.append(f"{step}: input {c_in} unbound")
                continue
            bound = ConceptRef.parse(b.concept)
            if not ok(bound, c_in):
                problems.append(f"{step}: binding {b.concept} does not satisfy {c_in}")
            if b.source == PROVIDED:
                if bound not in req.provided:
                    problems.append(f"{step}: {b.concept} is not provided")
            elif produced_by.get(b.source) is None or bound not in coll.operation(b.source).output_set:
                problems.append(f"{step}: {b.concept} not produced by an earlier step {b.source}")
        chain[step] = longest + 1
        produced_by[step] = pos
        for c in op.output_set:
            if c not in available or available[c] > chain[step]:
                available[c] = chain[step]
    for g in req.goals:
        if not any(ok(c, g) for c in available):
            problems.append(f"goal {g} not reached")
    if plan.steps and max(chain.values(), default=0) > req.max_depth:
        problems.append("replayed chain longer than max_depth")
    return problems
