from __future__ import annotations

from pathlib import Path

import pytest

from fixtures import book_ontologies, four_op_collection, four_op_ontology
from svcnet.model import dump_collection
from svcnet.ontology import OntologyRegistry, dump_ontology


@pytest.fixture
def four_ops():
    return four_op_collection(), OntologyRegistry.of(four_op_ontology())


@pytest.fixture
def books():
    return OntologyRegistry.of(*book_ontologies())


@pytest.fixture
def four_op_files(tmp_path: Path) -> tuple[Path, Path]:
    coll = tmp_path / "four_ops.json"
    ont = tmp_path / "four_ops-ontology.json"
    coll.write_text(dump_collection(four_op_collection()), encoding="utf-8")
    ont.write_text(dump_ontology(four_op_ontology()), encoding="utf-8")
    return coll, ont


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome; lines are echoed in the terminal summary."""
    results = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        results.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
