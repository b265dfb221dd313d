from __future__ import annotations

import pytest

from conftest import FIXTURES, model_from_text
from ssiconform.model import CREDENTIAL, DATA, PERSONAL, SERVICE, WALLET, Fact, ModelError
from ssiconform.specl.lexer import ParseError
from ssiconform.specl.modelfile import parse_model, render_model


def parse_errors(text):
    with pytest.raises(ParseError) as info:
        parse_model(text)
    return [d.message for d in info.value.diagnostics]


def test_canonical_declarations(canonical):
    assert canonical.id == "canonical"
    assert [a.id for a in canonical.actors] == ["i", "o", "s", "v", "w"]
    assert canonical.wallet_of("o").kind == WALLET
    assert canonical.resource("issuance").sort == SERVICE
    assert canonical.resource("issuance").requires == frozenset({"personal_data"})
    assert canonical.resource("credential").sort == DATA
    assert canonical.category_of("credential") == CREDENTIAL
    assert canonical.category_of("personal_data") == PERSONAL
    assert Fact("presents", "o", "credential", "v") in canonical.facts


def test_data_category_defaults_to_personal():
    m = model_from_text("version 1\nactor owner o\ndata d\n")
    assert m.category_of("d") == PERSONAL


def test_model_id_is_optional():
    assert model_from_text("version 1\nactor owner o\n").id is None


def test_render_is_canonical_and_stable(canonical):
    text = render_model(canonical)
    again = model_from_text(text)
    assert again == canonical
    assert render_model(again) == text


def test_all_errors_reported_together():
    msgs = parse_errors("version 1\nactor boss b\nfact knows o x\nservice s requires=\nwidget w\n")
    assert msgs == [
        "unknown actor kind boss",
        "unknown relation knows",
        "requires= needs at least one data id",
        "unknown keyword widget",
    ]


def test_bad_arity_points_at_extra_token():
    with pytest.raises(ParseError) as info:
        parse_model("version 1\nactor owner o extra\n")
    d = info.value.diagnostics[0]
    assert d.message.startswith("bad arity")
    assert (d.span.line, d.span.column) == (2, 15)


def test_counterparty_only_on_directed_relations():
    assert parse_errors("version 1\nfact owns o d to=v\n") == ["owns does not take a counterparty"]


def test_owner_only_for_wallets():
    assert parse_errors("version 1\nactor verifier v owner=o\n") == ["owner= is only valid for wallets"]


def test_unknown_attribute():
    assert parse_errors("version 1\ndata d colour=red\n") == ["unknown attribute 'colour' for data"]


def test_unknown_category():
    assert parse_errors("version 1\ndata d category=secret\n") == ["unknown data category secret"]


def test_undeclared_reference_is_model_error():
    with pytest.raises(ModelError) as info:
        parse_and_build((FIXTURES / "models" / "undeclared.dimodel").read_text())
    assert "undeclared resource credential" in str(info.value)


def test_duplicate_ids():
    with pytest.raises(ModelError) as info:
        parse_and_build("version 1\nactor owner o\ndata o\n")
    assert "duplicate id o" in str(info.value)


def parse_and_build(text):
    return model_from_text(text)
