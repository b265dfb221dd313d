from __future__ import annotations

from ssiconform.catalog import FrEntry, RequirementSet, constraints_of
from ssiconform.conformance.coverage import BLANK, CONSTRAINT_APPLIES, LINKED, coverage_matrix, render_matrix


def test_shape(catalog):
    m = coverage_matrix(catalog.requirement_set(), catalog)
    assert len(m.rows) == 24
    assert m.columns == tuple(catalog.requirement_set().keys())


def test_consent_row_and_cost_constraint(catalog):
    m = coverage_matrix(catalog.requirement_set(), catalog)
    assert len(m.frs_with("NFR6", LINKED)) == 10
    assert len(m.frs_with("NFR8", CONSTRAINT_APPLIES)) == 10
    assert m.cell("NFR24", "FR18") == BLANK


def test_constraints_never_own_frs(catalog):
    m = coverage_matrix(catalog.requirement_set(include_superseded=True), catalog)
    for key in constraints_of(catalog):
        assert m.frs_with(key, LINKED) == []


def test_summary_and_dict(catalog):
    m = coverage_matrix(catalog.requirement_set(), catalog)
    assert m.summary()["NFR6"] == {LINKED: 10, CONSTRAINT_APPLIES: 0}
    d = m.to_dict()
    assert d["cells"]["NFR8"]["FR47"] == CONSTRAINT_APPLIES


def test_render_marks(catalog):
    reqs = RequirementSet([FrEntry("FR1", "The system shall x.", "T1", ("NFR6",), constraint_links=("NFR8",))])
    text = render_matrix(coverage_matrix(reqs, catalog))
    lines = {ln.split()[0]: ln.split()[1:] for ln in text.splitlines()[1:]}
    assert lines["NFR6"] == ["X", "1", "0"]
    assert lines["NFR8"] == ["c", "0", "1"]
    assert lines["NFR1"] == [".", "0", "0"]
