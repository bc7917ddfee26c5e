"""Interaction networks of semantically annotated Web services.

Build operation and parameter networks from a service collection, measure
their topology, find communities and search for compositions.
"""

from svcnet.errors import (
    CollectionError,
    FitError,
    InputError,
    MetricUndefined,
    OntologyError,
    SvcnetError,
    UnresolvedConceptError,
    WsdlImportError,
)
from svcnet.model import Collection, Operation, Service, collection_of, dump_collection, load_collection
from svcnet.network import (
    InteractionNetwork,
    Invocation,
    NetworkKind,
    build_operation_network,
    build_parameter_network,
    decompose,
    export,
    giant_component,
)
from svcnet.ontology import (
    ConceptRef,
    MatchDegree,
    Ontology,
    OntologyRegistry,
    load_ontology,
    match_degree,
    satisfies,
)

__all__ = [
    "Collection",
    "CollectionError",
    "ConceptRef",
    "FitError",
    "InputError",
    "InteractionNetwork",
    "Invocation",
    "MatchDegree",
    "MetricUndefined",
    "NetworkKind",
    "Ontology",
    "OntologyError",
    "OntologyRegistry",
    "Operation",
    "Service",
    "SvcnetError",
    "UnresolvedConceptError",
    "WsdlImportError",
    "build_operation_network",
    "build_parameter_network",
    "collection_of",
    "decompose",
    "dump_collection",
    "export",
    "giant_component",
    "load_collection",
    "load_ontology",
    "match_degree",
    "satisfies",
]

__version__ = "0.1.0"
