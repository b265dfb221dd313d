from __future__ import annotations

from pathlib import Path

import pytest

from ssiconform.catalog import load_catalog
from ssiconform.inference import saturate
from ssiconform.model import SystemModel, base_facts, build_model
from ssiconform.specl.modelfile import parse_model
from ssiconform.specl.tracefile import Trace, parse_trace

FIXTURES = Path(__file__).parent / "fixtures"
CANONICAL = FIXTURES / "models" / "canonical.dimodel"
GOLDEN_TRACES = ("issuance", "presentation", "proof-presentation", "revocation",
                 "export-import", "retrieval", "recovery")


def load_model(path: Path = CANONICAL) -> SystemModel:
    return build_model(parse_model(path.read_text(encoding="utf-8")))


def model_from_text(text: str) -> SystemModel:
    return build_model(parse_model(text))


def load_trace(name: str) -> Trace:
    return parse_trace((FIXTURES / "traces" / f"{name}.ditrace").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def canonical() -> SystemModel:
    return load_model()


@pytest.fixture(scope="session")
def canonical_saturated(canonical):
    return saturate(base_facts(canonical))


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE: list[str] = []


@pytest.fixture()
def criterion(request):
    """Record one pass/fail line per acceptance criterion, printed at the end of the run."""
    number, title = request.node.get_closest_marker("criterion").args

    def record(ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
