from __future__ import annotations

import pytest

from ssiconform.catalog import FrEntry, RequirementSet
from ssiconform.conformance.lint import (
    ERROR,
    STATEMENT_CRITERIA,
    WARNING,
    has_errors,
    lint_requirements,
    lint_set,
    lint_statement,
)


def fr(statement, key="FR90", template="T1", **kw):
    kw.setdefault("nfr_links", ("NFR6",))
    return FrEntry(key, statement, template, **kw)


def result(entry, catalog, criterion):
    return next(f for f in lint_statement(entry, catalog) if f.criterion == criterion)


def problems(findings):
    return {(f.target, f.criterion) for f in findings if not f.passed and f.severity == ERROR}


def test_statement_findings_in_fixed_order(catalog):
    found = lint_statement(catalog.fr("FR32"), catalog)
    assert [f.criterion for f in found] == list(STATEMENT_CRITERIA)


def test_original_set_errors(catalog):
    assert problems(lint_requirements(catalog.original_set(), catalog)) == {
        ("FR6.4", "atomic"), ("FR6.5", "verifiable")}


def test_updated_set_is_clean(catalog):
    findings = lint_requirements(catalog.requirement_set(), catalog)
    assert problems(findings) == set()
    assert not has_errors(findings)


def test_unlinked_nfrs_are_warnings(catalog):
    findings = lint_requirements(catalog.requirement_set(), catalog)
    warned = sorted(f.target for f in findings if not f.passed)
    assert len(warned) == 16 and "NFR6" not in warned
    assert all(f.severity == WARNING for f in findings if not f.passed)


def test_strict_promotes_warnings(catalog):
    findings = lint_requirements(catalog.requirement_set(), catalog, strict=True)
    assert has_errors(findings)
    assert {f.severity for f in findings} == {ERROR}


@pytest.mark.parametrize("statement, passed", [
    ("The system shall store and export the credential.", False),
    ("The system shall store the credential, verify the proof.", False),
    ("The system shall store the credential or personal data.", False),
    ("The system shall store the credential using encryption or hashing.", True),
    ("The system shall present text at grade 8 or lower.", True),
    ("The system shall store the credential.", True),
])
def test_atomic_t1(catalog, statement, passed):
    assert result(fr(statement), catalog, "atomic").passed is passed


def test_t2_alternatives_in_object_allowed(catalog):
    entry = fr("THE SYSTEM shall PROVIDE the o WITH THE ABILITY TO withdraw consent for credential or personal data.",
               template="T2")
    assert result(entry, catalog, "atomic").passed


def test_nonconforming_statement(catalog):
    entry = fr("Users can do things")
    assert not result(entry, catalog, "clear").passed
    assert not result(entry, catalog, "atomic").passed


def test_unique_against_catalog(catalog):
    clash = fr("The system shall store the credential.", key="FR32")
    assert not result(clash, catalog, "unique").passed
    same = catalog.fr("FR32")
    assert result(same, catalog, "unique").passed


def test_metadata_flags(catalog):
    assert not result(fr("The system shall store it.", feasible=False), catalog, "feasible").passed
    assert not result(fr("The system shall store it.", legal=False), catalog, "legal").passed
    assert result(fr("The system shall store it."), catalog, "legal").passed


def test_precise(catalog):
    assert not result(fr("The system shall store data in an appropriate way."), catalog, "precise").passed
    long = "The system shall store " + " ".join(["data"] * 40) + "."
    assert "limit 40" in result(fr(long), catalog, "precise").detail


def test_verifiable(catalog):
    assert result(fr("The system shall verify the credential."), catalog, "verifiable").passed
    assert result(fr("The system shall respond within 2 seconds."), catalog, "verifiable").passed
    assert not result(fr("The system shall respect the user."), catalog, "verifiable").passed


def test_abstract(catalog):
    bad = result(fr("The system shall store the credential in a blockchain."), catalog, "abstract")
    assert not bad.passed and "blockchain" in bad.detail
    # lower-case "rest" is prose, not the acronym
    assert result(fr("The system shall store the rest of the data."), catalog, "abstract").passed


def test_consistency_conflict(catalog):
    reqs = RequirementSet([
        fr("The system shall present the credential.", key="FR90", owner="o"),
        fr("The system shall not present the credential.", key="FR91", owner="o"),
    ])
    bad = [f for f in lint_set(reqs, catalog) if f.criterion == "consistent"]
    assert [(f.target, f.passed) for f in bad] == [("FR90,FR91", False)]


def test_redundancy(catalog):
    reqs = RequirementSet([fr("The system shall store it.", key="FR90"), fr("the SYSTEM shall store it", key="FR91")])
    bad = [f for f in lint_set(reqs, catalog) if f.criterion == "non-redundant"]
    assert bad[0].target == "FR90,FR91" and not bad[0].passed


def test_modularity_is_a_warning(catalog):
    reqs = RequirementSet([
        fr("The system shall store it.", key="FR1"),
        fr("The system shall verify it.", key="FR2", nfr_links=("NFR24",)),
        fr("The system shall issue it.", key="FR3"),
    ])
    mod = [f for f in lint_set(reqs, catalog) if f.criterion == "modular" and not f.passed]
    assert [(f.target, f.severity) for f in mod] == [("NFR6", WARNING)]


def test_structured_flags_wrong_declared_template(catalog):
    entry = fr("THE SYSTEM shall PROVIDE the o WITH THE ABILITY TO store it.", template="T1")
    found = [f for f in lint_set(RequirementSet([entry]), catalog) if f.criterion == "structured"]
    assert found[0].detail == "declared T1 but reads as T2"
    assert found[-1].target == "set" and not found[-1].passed


def test_qualified_needs_capabilities(catalog):
    reqs = RequirementSet([fr("The system shall verify it.", nfr_links=("NFR24",))])
    q = next(f for f in lint_set(reqs, catalog) if f.criterion == "qualified")
    assert not q.passed and "NFR24" in q.detail
