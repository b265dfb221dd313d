from __future__ import annotations

import pytest

from conftest import FIXTURES
from ssiconform.catalog import CheckSpec, builtin_text
from ssiconform.specl.lexer import ParseError
from ssiconform.specl.reqfile import (
    IntegrityError,
    parse_catalog,
    parse_check,
    parse_requirements,
    render_catalog,
    render_requirements,
    resolve_requirements,
)

REQS = FIXTURES / "requirements"


def messages(exc_info):
    return [d.message for d in exc_info.value.diagnostics]


def test_builtin_catalog_roundtrips():
    catalog = parse_catalog(builtin_text())
    rendered = render_catalog(catalog)
    assert parse_catalog(rendered) == catalog
    assert render_catalog(parse_catalog(rendered)) == rendered


@pytest.mark.parametrize("name", ["consent_original", "consent_updated"])
def test_requirement_fixtures_roundtrip(name):
    text = (REQS / f"{name}.direq").read_text(encoding="utf-8")
    reqs = parse_requirements(text)
    assert render_requirements(reqs) == text
    assert parse_requirements(render_requirements(reqs)) == reqs


def test_user_document_resolves_against_builtin(catalog):
    text = 'version 1\nfr FR99 T1 nfr=NFR24 "THE SYSTEM shall verify the credential."\n'
    cat, reqs = resolve_requirements(text)
    assert cat is catalog
    assert reqs.keys() == ["FR99"]


def test_standalone_document_uses_current_set():
    cat, reqs = resolve_requirements(builtin_text())
    assert len(reqs) == 10 and len(cat.nfrs) == 24


def test_unknown_nfr():
    with pytest.raises(IntegrityError) as info:
        parse_requirements('version 1\nfr FR1 T1 nfr=NFR99 "THE SYSTEM shall store the credential."\n')
    assert messages(info) == ["FR1: unknown NFR99"]


def test_constraint_in_wrong_slot():
    with pytest.raises(IntegrityError) as info:
        parse_requirements('version 1\nfr FR1 T1 nfr=NFR8 constraints=NFR6 "THE SYSTEM shall store it."\n')
    assert messages(info) == [
        "FR1: NFR8 is a constraint; list it under constraints=",
        "FR1: NFR6 is not a constraint",
    ]


def test_trace_chain_limited_to_one_hop():
    text = ('version 1\nfr FR90 T1 trace=FR33a nfr=NFR6 "THE SYSTEM shall store it."\n')
    with pytest.raises(IntegrityError) as info:
        parse_requirements(text)
    assert messages(info) == ["FR90: trace target FR33a is itself an updated FR"]


def test_unknown_trace_target():
    with pytest.raises(IntegrityError, match="unknown trace target FR7.7"):
        parse_requirements('version 1\nfr FR90 T1 trace=FR7.7 nfr=NFR6 "THE SYSTEM shall store it."\n')


def test_condition_must_match_its_fr():
    text = ('version 1\nfr FR90 T1 nfr=NFR6 "THE SYSTEM shall store it."\n'
            'cond C91.1 fr=FR91 "never"\n')
    with pytest.raises(IntegrityError) as info:
        parse_requirements(text)
    assert messages(info) == ["condition C91.1: unknown FR91"]


def test_catalog_records_rejected_in_requirement_documents():
    text = 'version 1\ncap 30 wallet "Shall be able to sing"\nfr FR1 T1 nfr=NFR6 "THE SYSTEM shall x."\n'
    with pytest.raises(ParseError) as info:
        parse_requirements(text)
    assert messages(info) == ["cap records belong in a catalog document"]


def test_capability_must_use_boilerplate():
    base = builtin_text().replace('"Shall be able to hold personal data"', '"Holds personal data"')
    with pytest.raises(ParseError):
        parse_catalog(base)


def test_unknown_template():
    with pytest.raises(ParseError) as info:
        parse_requirements('version 1\nfr FR1 T9 nfr=NFR6 "THE SYSTEM shall x."\n')
    assert "unknown template T9" in messages(info)


def test_statement_must_be_quoted():
    with pytest.raises(ParseError):
        parse_requirements("version 1\nfr FR1 T1 nfr=NFR6 unquoted\n")


def test_duplicate_key():
    text = 'version 1\nfr FR1 T1 nfr=NFR6 "THE SYSTEM shall x."\nfr FR1 T1 nfr=NFR6 "THE SYSTEM shall y."\n'
    with pytest.raises(ParseError):
        parse_requirements(text)


def test_parse_check():
    assert parse_check("precedes:inform:present") == CheckSpec("precedes", ("inform", "present"))
    assert str(parse_check("attr:present:metadata")) == "attr:present:metadata"
    with pytest.raises(ValueError):
        parse_check("precedes:inform")
    with pytest.raises(ValueError):
        parse_check("teleport:x")


def test_extension_fields_roundtrip():
    text = ('version 1\nfr FR90 T1 nfr=NFR6 constraints=NFR8 owner=o criteria="Clear,Atomic" '
            'feasible=yes legal=no check=precedes:inform:present "THE SYSTEM shall inform the o."\n')
    fr = parse_requirements(text).get("FR90")
    assert fr.criteria == ("Clear", "Atomic")
    assert (fr.feasible, fr.legal) == (True, False)
    assert fr.check == CheckSpec("precedes", ("inform", "present"))
    assert render_requirements(parse_requirements(text)) == text
