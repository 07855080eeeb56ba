from __future__ import annotations

import json
from pathlib import Path

import pytest

from provac.dsl import parse
from provac.graph import load_graph
from provac.targets import Request

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def case_graph():
    return load_graph((FIXTURES / "case_study.pgraph.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def case_doc():
    return parse((FIXTURES / "case_study.ppol").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def case_request():
    return Request.from_json(json.loads((FIXTURES / "case_study.request.json").read_text(encoding="utf-8")))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one pass/fail line per acceptance criterion."""

    def record(criterion: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
