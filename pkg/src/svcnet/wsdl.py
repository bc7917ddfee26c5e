"""Restricted WSDL 1.1 + SAWSDL importer.

Only what shapes the interaction networks is read: the operations of every
``portType`` and, for each input/output message part, the concept named by
its ``sawsdl:modelReference``.  The annotation is looked up on the part
itself first, then on the element or type declaration the part points to.
Lifting/lowering schema mappings and bindings are ignored.

A model reference IRI ``http://host/path/onto.owl#Concept`` becomes the
concept ref with ontology id ``http://host/path/onto.owl`` and local name
``Concept``.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from svcnet.errors import CollectionError, WsdlImportError
from svcnet.model import Collection, Operation, Service
from svcnet.ontology import ConceptRef

log = logging.getLogger(__name__)

WSDL_NS = "http://schemas.xmlsoap.org/wsdl/"
WSDL2_NS = "http://www.w3.org/ns/wsdl"
SAWSDL_NS = "http://www.w3.org/ns/sawsdl"
XSD_NS = "http://www.w3.org/2001/XMLSchema"

MODEL_REF = f"{{{SAWSDL_NS}}}modelReference"


@dataclass
class ImportReport:
    files: int = 0
    services: int = 0
    operations: int = 0
    skipped_parts: list[str] = field(default_factory=list)
    skipped_operations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "files": self.files,
            "services": self.services,
            "operations": self.operations,
            "skipped_parts": len(self.skipped_parts),
            "skipped_operations": len(self.skipped_operations),
            "skipped_part_details": list(self.skipped_parts),
            "skipped_operation_details": list(self.skipped_operations),
            "warnings": list(self.warnings),
        }


def iri_to_concept(iri: str) -> ConceptRef:
    base, sep, fragment = iri.strip().rpartition("#")
    if not sep or not base or not fragment:
        raise WsdlImportError(f"model reference {iri!r} has no '#' fragment")
    return ConceptRef(base, fragment)


def _local(qname: str | None) -> str | None:
    if qname is None:
        return None
    return qname.rpartition(":")[2]


class _Doc:
    def __init__(self, root: ET.Element, source: str, report: ImportReport) -> None:
        self.root = root
        self.source = source
        self.report = report
        ns = WSDL2_NS if root.tag == f"{{{WSDL2_NS}}}description" else WSDL_NS
        self.ns = ns
        # Element and type declarations by local name; global declarations win.
        self.decls: dict[str, ET.Element] = {}
        for types in root.iter(f"{{{ns}}}types"):
            for schema in types.iter(f"{{{XSD_NS}}}schema"):
                for decl in schema:
                    if decl.get("name") is not None:
                        self.decls.setdefault(decl.get("name"), decl)
                for decl in schema.iter():
                    if decl.get("name") is not None and decl.tag.startswith(f"{{{XSD_NS}}}"):
                        self.decls.setdefault(decl.get("name"), decl)
        self.messages = {m.get("name"): m for m in root.findall(f"{{{WSDL_NS}}}message")}

    def _annotation(self, node: ET.Element) -> str | None:
        ref = node.get(MODEL_REF)
        if ref:
            return ref
        for attr in ("element", "type"):
            decl = self.decls.get(_local(node.get(attr)))
            if decl is not None and decl.get(MODEL_REF):
                return decl.get(MODEL_REF)
        return None

    def concept(self, node: ET.Element, where: str) -> ConceptRef | None:
        ref = self._annotation(node)
        if ref is None:
            msg = f"{self.source}: {where} has no modelReference"
            self.report.skipped_parts.append(msg)
            log.warning(msg)
            return None
        iris = ref.split()
        if len(iris) > 1:
            self.report.warnings.append(f"{self.source}: {where} has {len(iris)} model references, using the first")
        try:
            return iri_to_concept(iris[0])
        except WsdlImportError as exc:
            raise WsdlImportError(f"{self.source}: {where}: {exc}") from None

    def message_concepts(self, io: ET.Element | None, where: str) -> list[ConceptRef]:
        if io is None:
            return []
        if self.ns == WSDL2_NS:
            c = self.concept(io, where)
            return [c] if c is not None else []
        msg = self.messages.get(_local(io.get("message")))
        if msg is None:
            if io.get("message"):
                self.report.warnings.append(f"{self.source}: {where} refers to undefined message {io.get('message')!r}")
            return []
        out = []
        for part in msg.findall(f"{{{WSDL_NS}}}part"):
            c = self.concept(part, f"{where} part {part.get('name')!r}")
            if c is not None:
                out.append(c)
        return out

    def service_name(self, fallback: str) -> str:
        svc = self.root.find(f"{{{self.ns}}}service")
        if svc is not None and svc.get("name"):
            return svc.get("name")
        return self.root.get("name") or fallback

    def operations(self) -> list[ET.Element]:
        container = "interface" if self.ns == WSDL2_NS else "portType"
        return [op for pt in self.root.findall(f"{{{self.ns}}}{container}") for op in pt.findall(f"{{{self.ns}}}operation")]


def import_wsdl(
    document: str | bytes, *, source: str = "<wsdl>", report: ImportReport | None = None
) -> list[Service]:
    """Read one WSDL document into zero or one :class:`Service`.

    Parts without a model reference are skipped and recorded in ``report``;
    operations left with no annotated part on either side are dropped and
    recorded too.  Raises :class:`WsdlImportError` on malformed XML or an
    IRI without a fragment.
    """
    report = report if report is not None else ImportReport()
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise WsdlImportError(f"{source}: malformed XML: {exc}") from None
    doc = _Doc(root, source, report)
    report.files += 1

    svc_name = doc.service_name(Path(source).stem)
    ops: list[Operation] = []
    for op_el in doc.operations():
        name = op_el.get("name")
        if not name:
            report.warnings.append(f"{source}: operation without a name ignored")
            continue
        where = f"{svc_name}.{name}"
        inputs = doc.message_concepts(op_el.find(f"{{{doc.ns}}}input"), f"{where} input")
        outputs = doc.message_concepts(op_el.find(f"{{{doc.ns}}}output"), f"{where} output")
        if not inputs and not outputs:
            report.skipped_operations.append(f"{source}: {where} has no annotated parts")
            continue
        ops.append(Operation(svc_name, name, tuple(inputs), tuple(outputs)))
    if not ops:
        return []
    report.services += 1
    report.operations += len(ops)
    return [Service(svc_name, tuple(ops))]


def import_wsdl_dir(directory: str | Path) -> tuple[Collection, ImportReport]:
    """Import every ``*.wsdl`` file of a directory (sorted by file name) into one collection."""
    report = ImportReport()
    services: list[Service] = []
    for path in sorted(Path(directory).glob("*.wsdl")):
        services.extend(import_wsdl(path.read_bytes(), source=path.name, report=report))
    try:
        return Collection(tuple(services)), report
    except CollectionError as exc:
        raise WsdlImportError(f"{directory}: {exc}") from None
