from __future__ import annotations

import json
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from fixtures import four_op_collection
from svcnet.errors import CollectionError, WsdlImportError
from svcnet.generator import GeneratorParams, generate_collection
from svcnet.model import Collection, collection_of, dump_collection, load_collection
from svcnet.ontology import ConceptRef, OntologyRegistry, dump_ontology
from svcnet.wsdl import ImportReport, import_wsdl, import_wsdl_dir, iri_to_concept

WSDL_DIR = Path(__file__).parent / "data" / "wsdl"


def test_four_op_collection_shape():
    coll = load_collection(dump_collection(four_op_collection()))
    assert [op.id for op in coll.operations] == ["α.1", "α.2", "β.3", "γ.4"]
    assert len(coll.concept_refs()) == 9
    assert coll.parameter_instances == 12
    assert coll.ontology_ids_referenced == {"urn:four-ops"}


def test_empty_collection():
    coll = load_collection('{"services": []}')
    assert coll.operations == ()
    assert coll.concept_refs() == []


def test_duplicate_operation_rejected():
    doc = {"services": [{"name": "α", "operations": [{"name": "op1"}, {"name": "op1"}]}]}
    with pytest.raises(CollectionError, match="α.op1"):
        load_collection(json.dumps(doc))


def test_duplicate_service_rejected():
    doc = {"services": [{"name": "s", "operations": []}, {"name": "s", "operations": []}]}
    with pytest.raises(CollectionError, match="duplicate service"):
        load_collection(json.dumps(doc))


def test_concept_without_fragment_rejected():
    doc = {"services": [{"name": "s", "operations": [{"name": "o", "inputs": ["Price"]}]}]}
    with pytest.raises(CollectionError, match="s.o inputs"):
        load_collection(json.dumps(doc))


@pytest.mark.parametrize("text", ["[", "[]", '{"services": {}}', '{"services": [{"operations": []}]}'])
def test_malformed_collection_documents(text):
    with pytest.raises(CollectionError):
        load_collection(text)


def test_operations_may_lack_inputs_or_outputs():
    coll = collection_of([("s", [("sink", ["o#a"], []), ("source", [], ["o#b"])])])
    assert coll.operation("s.sink").outputs == ()
    assert coll.operation("s.source").inputs == ()


def test_duplicates_kept_in_lists_but_not_in_sets():
    coll = collection_of([("s", [("o", ["o#a", "o#a"], ["o#b"])])])
    op = coll.operations[0]
    assert len(op.inputs) == 2
    assert op.input_set == {ConceptRef("o", "a")}
    assert coll.parameter_instances == 3


def test_validate_reports_first_unresolved(books):
    coll = collection_of([("s", [("o", ["books#Textbook"], ["books#Novel"])])])
    with pytest.raises(Exception, match="books#Novel"):
        coll.validate(books)


concept = st.builds(
    lambda o, n: f"{o}#{n}", st.sampled_from(["o", "http://x/y.owl"]), st.text("abcXYZ_ü", min_size=1, max_size=4)
)
operations = st.tuples(st.lists(concept, max_size=3), st.lists(concept, max_size=3))


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.text("stv", min_size=1, max_size=3), st.lists(operations, max_size=3), max_size=4))
def test_canonical_round_trip(layout):
    coll = collection_of([(svc, [(f"op{i}", ins, outs) for i, (ins, outs) in enumerate(ops)]) for svc, ops in layout.items()])
    text = dump_collection(coll)
    again = load_collection(text)
    assert again == coll
    assert dump_collection(again) == text


# -- WSDL ------------------------------------------------------------------


def test_iri_mapping():
    assert iri_to_concept("http://x/onto#Country") == ConceptRef("http://x/onto", "Country")
    with pytest.raises(WsdlImportError, match="fragment"):
        iri_to_concept("http://x/onto/Country")


def test_annotated_parts_become_concepts():
    report = ImportReport()
    [svc] = import_wsdl((WSDL_DIR / "country_price.wsdl").read_bytes(), source="country_price.wsdl", report=report)
    assert svc.name == "CountryPriceService"
    [op] = svc.operations
    assert op.id == "CountryPriceService.getPrice"
    assert op.inputs == (ConceptRef("http://x/onto", "Country"),)
    assert op.outputs == (ConceptRef("http://x/onto", "Price"),)
    assert report.skipped_parts == []


def test_element_annotations_and_bare_parts():
    report = ImportReport()
    [svc] = import_wsdl((WSDL_DIR / "textbook.wsdl").read_bytes(), source="textbook.wsdl", report=report)
    assert svc.name == "TextbookFinder"
    [op] = svc.operations
    books = "http://books.example/books.owl"
    assert op.inputs == (ConceptRef(books, "SchoolLevel"),)
    assert op.outputs == (ConceptRef(books, "BiologyTextbook"),)
    assert len(report.skipped_parts) == 2  # sessionToken, nonce
    assert any("ping" in s for s in report.skipped_operations)


def test_wsdl_without_operations():
    doc = '<definitions xmlns="http://schemas.xmlsoap.org/wsdl/" name="Empty"/>'
    assert import_wsdl(doc) == []


def test_wsdl2_interface():
    doc = """<description xmlns="http://www.w3.org/ns/wsdl" xmlns:sawsdl="http://www.w3.org/ns/sawsdl">
      <interface name="I"><operation name="convert">
        <input element="x" sawsdl:modelReference="http://u/o#Euro"/>
        <output element="y" sawsdl:modelReference="http://u/o#Dollar http://u/o#Money"/>
      </operation></interface>
      <service name="Converter" interface="I"/>
    </description>"""
    report = ImportReport()
    [svc] = import_wsdl(doc, source="conv.wsdl", report=report)
    assert svc.operations[0].outputs == (ConceptRef("http://u/o", "Dollar"),)
    assert len(report.warnings) == 1


def test_malformed_xml_names_file():
    with pytest.raises(WsdlImportError, match="broken.wsdl"):
        import_wsdl("<definitions", source="broken.wsdl")


def test_import_dir_and_round_trip():
    coll, report = import_wsdl_dir(WSDL_DIR)
    assert [s.name for s in coll.services] == ["CountryPriceService", "TextbookFinder"]
    assert report.files == 2 and report.services == 2 and report.operations == 2
    assert load_collection(dump_collection(coll)) == coll


def test_import_empty_dir(tmp_path):
    coll, report = import_wsdl_dir(tmp_path)
    assert coll == Collection(()) and report.files == 0


# -- generator -------------------------------------------------------------


def test_generator_is_deterministic():
    p = GeneratorParams(n_services=10, ops_per_service=1, n_concepts=20, concept_reuse_skew=1.0, seed=1)
    (c1, o1), (c2, o2) = generate_collection(p), generate_collection(p)
    assert dump_collection(c1) == dump_collection(c2)
    assert dump_ontology(o1) == dump_ontology(o2)
    c3, _ = generate_collection(GeneratorParams(10, 1, 20, 1.0, seed=2))
    assert dump_collection(c3) != dump_collection(c1)


def test_generator_output_resolves():
    coll, ont = generate_collection(GeneratorParams(30, 2, 40, seed=7))
    coll.validate(OntologyRegistry.of(ont))
    assert len(coll.operations) == 60
    assert ont.depth() <= 3


def test_generator_empty():
    coll, _ = generate_collection(GeneratorParams(0, 1, 5))
    assert coll.operations == ()


def test_generator_needs_concepts():
    with pytest.raises(ValueError, match="zero concepts"):
        generate_collection(GeneratorParams(3, 1, 0))


def _usage(skew: float) -> Counter:
    p = GeneratorParams(10_000, 1, 20, skew, seed=3, min_inputs=1, max_inputs=1, min_outputs=0, max_outputs=0)
    coll, _ = generate_collection(p)
    return Counter(op.inputs[0] for op in coll.operations)


def test_zero_skew_is_near_uniform():
    counts = _usage(0.0)
    assert len(counts) == 20
    assert chisquare(list(counts.values())).pvalue > 0.001


def test_skew_creates_hub_concepts():
    top = _usage(1.5).most_common(1)[0][1]
    assert top > 3 * 10_000 / 20
