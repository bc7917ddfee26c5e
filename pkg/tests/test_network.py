from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import oracle_for, random_case
from oracles import LEVEL_NAMES, operation_edges, parameter_edges, weak_components
from svcnet.errors import UnresolvedConceptError
from svcnet.model import collection_of
from svcnet.network import (
    Invocation,
    NetworkKind,
    build_operation_network,
    build_parameter_network,
    decompose,
    export,
    giant_component,
    hubs_and_authorities,
    network_from_edges,
    network_from_json,
)
from svcnet.ontology import LEVELS, MatchDegree, Ontology, OntologyRegistry

E, P, S, FI = MatchDegree.EXACT, MatchDegree.PLUGIN, MatchDegree.SUBSUME, MatchDegree.FITIN
FULL, PARTIAL = Invocation.FULL, Invocation.PARTIAL


def test_four_op_operation_network(four_ops):
    coll, onts = four_ops
    net = build_operation_network(coll, onts, E, FULL)
    assert net.nodes == ("α.1", "α.2", "β.3", "γ.4")
    assert net.edge_labels() == {("α.2", "β.3"), ("β.3", "γ.4")}


def test_four_op_parameter_network(four_ops):
    coll, onts = four_ops
    net = build_parameter_network(coll, onts)
    assert net.n_nodes == 9
    assert sorted(n[-1] for n in net.nodes) == list("abcdefghi")
    # each of f, g, h is one node even though two operations use it
    prov = {(net.nodes[u][-1], net.nodes[v][-1]): ops for (u, v), ops in net.provenance.items()}
    assert prov[("f", "g")] == ("β.3",)
    assert prov[("g", "i")] == ("γ.4",)
    assert len(net.edges) == 2 + 2 + 2 + 2  # a,b->d ; c->e,f ; f->g,h ; g,h->i


def test_plugin_only_pair_has_no_exact_link(books):
    coll = collection_of(
        [("s", [("find", ["books#SchoolLevel"], ["books#BiologyTextbook"]), ("price", ["books#Textbook"], ["books#Price"])])]
    )
    assert build_operation_network(coll, books, E).edges == ()
    assert build_operation_network(coll, books, P).edge_labels() == {("s.find", "s.price")}
    assert build_operation_network(coll, books, FI).edge_labels() == {("s.find", "s.price")}
    assert build_operation_network(coll, books, S).edges == ()


def test_full_versus_partial_invocation(books):
    coll = collection_of(
        [("s", [("A", [], ["books#AnatomyTextbook"]), ("B", ["books#Textbook", "books#SchoolLevel"], ["books#Price"])])]
    )
    assert build_operation_network(coll, books, P, FULL).edges == ()
    assert build_operation_network(coll, books, P, PARTIAL).edge_labels() == {("s.A", "s.B")}


def test_zero_input_operations_get_no_links_unless_vacuous():
    ont = Ontology("o", "xy")
    coll = collection_of([("s", [("src", [], ["o#x"]), ("other", ["o#x"], ["o#y"])])])
    reg = OntologyRegistry.of(ont)
    assert build_operation_network(coll, reg, E).edge_labels() == {("s.src", "s.other")}
    vac = build_operation_network(coll, reg, E, allow_vacuous=True)
    assert vac.edge_labels() == {("s.src", "s.other"), ("s.other", "s.src")}


def test_no_self_loops():
    reg = OntologyRegistry.of(Ontology("o", "x"))
    coll = collection_of([("s", [("loop", ["o#x"], ["o#x"])])])
    assert build_operation_network(coll, reg, E).edges == ()
    assert build_parameter_network(coll, reg).edges == ()


def test_shared_link_provenance():
    reg = OntologyRegistry.of(Ontology("o", ["_COUNTRY", "_TIMEMEASURE"]))
    coll = collection_of([(f"s{i}", [("op", ["o#_COUNTRY"], ["o#_TIMEMEASURE"])]) for i in range(3)])
    net = build_parameter_network(coll, reg)
    assert len(net.edges) == 1
    assert net.provenance[net.edges[0]] == ("s0.op", "s1.op", "s2.op")


def test_input_only_operation_adds_nodes_only():
    reg = OntologyRegistry.of(Ontology("o", "ab"))
    net = build_parameter_network(collection_of([("s", [("sink", ["o#a", "o#b"], [])])]), reg)
    assert net.n_nodes == 2 and net.edges == ()


def test_unresolved_concept_is_reported(four_ops):
    coll = collection_of([("s", [("o", ["urn:four-ops#a"], ["urn:other#z"])])])
    with pytest.raises(UnresolvedConceptError, match="urn:other#z"):
        build_operation_network(coll, four_ops[1], E)


def test_fail_is_not_a_level(four_ops):
    with pytest.raises(ValueError):
        build_operation_network(*four_ops, MatchDegree.FAIL)


# -- decomposition ---------------------------------------------------------


def test_four_op_decomposition(four_ops):
    dec = decompose(build_operation_network(*four_ops, E))
    assert dec.giant == (1, 2, 3)
    assert dec.small == ()
    assert dec.isolated == (0,)
    assert dec.summary()["isolated_fraction"] == 0.25
    assert dec.summary()["giant_fraction"] == 0.75


def test_edgeless_network_has_no_giant():
    dec = decompose(network_from_edges(list("abcde"), []))
    assert dec.giant is None
    assert len(dec.isolated) == 5
    assert dec.fractions() == {"isolated": 1.0, "small": 0.0, "giant": 0.0}


def test_tied_components_break_by_smallest_node():
    net = network_from_edges(list("abcdef"), [("d", "e"), ("e", "f"), ("f", "d"), ("a", "b"), ("b", "c"), ("c", "a")])
    dec = decompose(net)
    assert dec.giant == (0, 1, 2)
    assert dec.small == ((3, 4, 5),)


def test_empty_network():
    dec = decompose(network_from_edges([], []))
    assert dec.components == () and dec.giant is None
    assert hubs_and_authorities(network_from_edges([], []), 3) == ([], [])


def test_giant_component_subgraph(four_ops):
    g = giant_component(build_operation_network(*four_ops, E))
    assert g.nodes == ("α.2", "β.3", "γ.4")
    assert g.edge_labels() == {("α.2", "β.3"), ("β.3", "γ.4")}


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 25), st.lists(st.tuples(st.integers(0, 24), st.integers(0, 24)), max_size=40))
def test_decomposition_matches_bfs(n, raw):
    labels = [f"n{i:02d}" for i in range(n)]
    edges = [(labels[u % n], labels[v % n]) for u, v in raw]
    net = network_from_edges(labels, edges)
    dec = decompose(net)
    assert sorted(map(sorted, dec.components)) == sorted(map(sorted, weak_components(n, net.edges)))
    sizes = [len(c) for c in dec.components]
    assert sizes == sorted(sizes, reverse=True)
    assert abs(sum(dec.fractions().values()) - 1.0) < 1e-9
    # direction never matters for weak components
    flipped = network_from_edges(labels, [(b, a) for a, b in edges])
    assert decompose(flipped).components == dec.components


# -- hubs, export ----------------------------------------------------------


def test_star_hubs_and_authorities():
    net = network_from_edges(list("abch"), [("h", "a"), ("h", "b"), ("h", "c")])
    hubs, auth = hubs_and_authorities(net, 1)
    assert hubs == [("h", 3)]
    assert auth == [("a", 1)]


def test_four_op_hubs(four_ops):
    hubs, auth = hubs_and_authorities(build_operation_network(*four_ops, E), 1)
    assert hubs == [("α.2", 1)]
    assert auth == [("β.3", 1)]


def test_four_op_tsv(four_ops):
    assert export(build_operation_network(*four_ops, E), "tsv") == "α.2\tβ.3\nβ.3\tγ.4\n"


def test_empty_tsv():
    assert export(network_from_edges(["a"], []), "tsv") == ""


def test_dot_export(four_ops):
    dot = export(build_operation_network(*four_ops, E), "dot")
    assert dot.startswith("digraph interaction {\n")
    assert '  "α.2" -> "β.3";\n' in dot
    assert dot.endswith("}\n")


def test_parameter_json_has_provenance(four_ops):
    net = build_parameter_network(*four_ops)
    doc = json.loads(export(net, "json"))
    assert doc["kind"] == "parameter"
    assert all(e["ops"] for e in doc["edges"])
    again = network_from_json(doc)
    assert again == net


def test_operation_json_round_trip(four_ops):
    net = build_operation_network(*four_ops, P, PARTIAL)
    doc = json.loads(export(net, "json"))
    assert doc["match_level"] == "plugin" and doc["invocation"] == "partial"
    assert "ops" not in (doc["edges"][0] if doc["edges"] else {})
    assert network_from_json(doc) == net


# -- oracle equivalence and containment ------------------------------------


@pytest.mark.parametrize("seed", range(40))
def test_builder_matches_oracle(seed):
    coll, reg, ont = random_case(seed, allow_empty_inputs=seed % 2 == 0)
    oo = oracle_for(ont)
    for level, name in zip(LEVELS, LEVEL_NAMES):
        for inv in (FULL, PARTIAL):
            net = build_operation_network(coll, reg, level, inv)
            assert net.edge_labels() == operation_edges(coll, oo, name, inv is PARTIAL), (level, inv)
    pnet = build_parameter_network(coll, reg)
    assert {(pnet.nodes[u], pnet.nodes[v]): set(ops) for (u, v), ops in pnet.provenance.items()} == parameter_edges(coll)
    assert pnet.n_nodes == len({str(c) for op in coll.operations for c in (*op.inputs, *op.outputs)})
    assert pnet.n_nodes <= coll.parameter_instances


@pytest.mark.parametrize("seed", range(40))
def test_level_containment_and_exclusivity(seed):
    coll, reg, _ = random_case(seed)
    for inv in (FULL, PARTIAL):
        e = {lv: build_operation_network(coll, reg, lv, inv).edge_labels() for lv in LEVELS}
        assert e[E] | e[P] <= e[FI]
    full = {lv: build_operation_network(coll, reg, lv, FULL).edge_labels() for lv in LEVELS}
    part = {lv: build_operation_network(coll, reg, lv, PARTIAL).edge_labels() for lv in LEVELS}
    for lv in LEVELS:
        assert full[lv] <= part[lv]
    # with one output meeting one input, a link is decided by a single match degree;
    # several outputs can satisfy the same input at different degrees
    single = {
        (a, b)
        for a, b in full[E] | full[P] | full[S]
        if len(coll.operation(a).output_set) == 1 and len(coll.operation(b).input_set) == 1
    }
    for a, b in single:
        assert sum((a, b) in full[lv] for lv in (E, P, S)) == 1


def test_network_kind_flags(four_ops):
    assert build_parameter_network(*four_ops).kind is NetworkKind.PARAMETER
    assert build_operation_network(*four_ops, E).invocation is FULL
