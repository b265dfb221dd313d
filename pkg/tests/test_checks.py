from __future__ import annotations

import pytest

from conftest import GOLDEN_TRACES, FIXTURES, load_model, load_trace, model_from_text
from ssiconform.catalog import FrEntry
from ssiconform.conformance.checks import (
    CONSENT_SUITE,
    NOT_APPLICABLE,
    NOT_EXERCISED,
    SATISFIED,
    UNCHECKED,
    VIOLATED,
    ModelWitness,
    Verdict,
    aggregate,
    check_consent_suite,
    check_fr,
    check_traces,
    describe_witness,
)
from ssiconform.inference import ProofTree, saturate
from ssiconform.model import base_facts
from ssiconform.specl.reqfile import parse_check
from ssiconform.specl.tracefile import parse_trace


def trace(*lines):
    return parse_trace("version 1\nmodel canonical\n" + "\n".join(f"{i} {l}" for i, l in enumerate(lines, 1)) + "\n")


@pytest.fixture()
def check(canonical, canonical_saturated, catalog):
    def run(key, t=None, model=None):
        model = model or canonical
        sat = canonical_saturated if model is canonical else saturate(base_facts(model))
        return check_fr(catalog.fr(key), model, sat, t)
    return run


def statuses(verdicts):
    return {v.fr_key: v.status for v in verdicts}


def test_suite_has_ten_frs(canonical, canonical_saturated):
    assert [v.fr_key for v in check_consent_suite(canonical, canonical_saturated)] == list(CONSENT_SUITE)


@pytest.mark.parametrize("name", GOLDEN_TRACES)
def test_golden_traces_have_no_violations(canonical, canonical_saturated, name):
    verdicts = check_consent_suite(canonical, canonical_saturated, load_trace(name))
    assert VIOLATED not in statuses(verdicts).values()


def test_without_trace_pure_trace_frs_are_not_exercised(canonical, canonical_saturated):
    got = statuses(check_consent_suite(canonical, canonical_saturated))
    assert {k for k, s in got.items() if s == NOT_EXERCISED} == {"FR18", "FR32", "FR33a", "FR33b", "FR47"}
    assert {k for k, s in got.items() if s == SATISFIED} == {"FR44", "FR46", "FR52", "FR53", "FR54"}


def test_fr18_readability(check):
    ok = check("FR18", trace('consent.grant o v credential text="Is this okay?"'))
    assert ok.status == SATISFIED and ok.witnesses == (1,)
    long = ("Consent is required before processing. "
            "Additional information regarding authorization procedures is available.")
    bad = check("FR18", trace(f'consent.grant o v credential text="{long}"'))
    assert bad.status == VIOLATED and "exceeds 8" in bad.message


def test_fr18_missing_text_is_violated(check):
    v = check("FR18", trace("consent.grant o v credential"))
    assert v.status == VIOLATED and "no prompt text" in v.message


@pytest.mark.parametrize("name, status", [
    ("grade_exact_8", SATISFIED), ("grade_under_8", SATISFIED), ("grade_over_8", VIOLATED),
])
def test_fr18_boundary(check, name, status):
    assert check("FR18", load_trace(f"fr18_{name}")).status == status


def test_fr32_inform_before_present(check):
    good = trace('inform v o credential purpose="x"', "present o v credential")
    assert check("FR32", good).status == SATISFIED
    bad = trace("present o v credential", 'inform v o credential purpose="x"')
    v = check("FR32", bad)
    assert v.status == VIOLATED and v.witnesses == (1,)


def test_fr33a_consent_is_per_item(check):
    t = trace('consent.grant o v credential text="Ok?"', "present o v credential", "present o v degree")
    v = check("FR33a", t)
    assert v.status == VIOLATED and v.witnesses == (3,)


def test_fr33b_personal_data(check):
    ok = trace('consent.grant o i personal_data text="Ok?"', "present o i personal_data")
    assert check("FR33b", ok).status == SATISFIED
    assert check("FR33b", trace("present o i personal_data")).status == VIOLATED
    assert check("FR33b", trace("present o v credential")).status == NOT_EXERCISED


def test_fr33_processor_side_events_count(check):
    # the verifier verifying is processing of the owner's credential
    v = check("FR33a", trace("verify v o credential"))
    assert v.status == VIOLATED and v.witnesses == (1,)


def test_fr44_issuer_must_be_selected(check):
    assert check("FR44", trace("request o i credential")).status == SATISFIED
    v = check("FR44", trace("request o credential"))
    assert v.status == VIOLATED and "without a selected issuer" in v.message


def test_fr46_needs_wallet(check):
    m = load_model(FIXTURES / "models" / "no_wallet.dimodel")
    v = check("FR46", None, m)
    assert v.status == VIOLATED
    assert isinstance(v.witnesses[0], ModelWitness)


def test_fr46_any_prior_consent_to_the_processor(check):
    t = trace('consent.grant o v degree text="Ok?"', "present o v credential")
    assert check("FR46", t).status == SATISFIED
    assert check("FR46", trace("present o v credential")).status == VIOLATED


def test_fr47_withdrawal(check):
    ok = trace('consent.grant o v credential text="Ok?"', "present o v credential",
               "consent.withdraw o v credential")
    assert check("FR47", ok).status == SATISFIED
    late = trace('consent.grant o v credential text="Ok?"', "consent.withdraw o v credential",
                 "verify v o credential")
    v = check("FR47", late)
    assert v.status == VIOLATED and v.witnesses == (3,)
    never = check("FR47", trace("consent.withdraw o v credential"))
    assert "never given" in never.message


def test_fr47_regrant_restores_consent(check):
    t = trace('consent.grant o v credential text="Ok?"', "consent.withdraw o v credential",
              'consent.grant o v credential text="Ok?"', "present o v credential")
    assert check("FR47", t).status == SATISFIED


def test_fr52_selection_and_request(check):
    ok = trace("request i o personal_data", 'present o i personal_data attributes="name"')
    assert check("FR52", ok).status == SATISFIED
    bad = check("FR52", trace("present o i personal_data"))
    assert bad.status == VIOLATED
    assert bad.message == "event 1 was not requested by i; event 1 has no attribute selection"


def test_fr53_owner_initiated(check):
    ok = trace("request o v verification", "request v o credential", 'present o v credential metadata="m"')
    assert check("FR53", ok).status == SATISFIED
    bad = check("FR53", trace("request v o credential", 'present o v credential metadata="m"'))
    assert bad.status == VIOLATED and "not initiated by o" in bad.message


def test_fr54_generate_first(check):
    ok = trace("proof.generate o credential", "proof.present o v credential")
    assert check("FR54", ok).status == SATISFIED
    assert check("FR54", trace("proof.present o v credential")).status == VIOLATED


def test_not_applicable_without_owner(catalog):
    m = model_from_text("version 1\nactor verifier v\n")
    v = check_fr(catalog.fr("FR32"), m, saturate(base_facts(m)))
    assert v.status == NOT_APPLICABLE


def test_unregistered_fr_is_unchecked(canonical, canonical_saturated, catalog):
    assert check_fr(catalog.fr("FR6.1"), canonical, canonical_saturated).status == UNCHECKED


@pytest.mark.parametrize("spec, lines, status", [
    ("precedes:inform:present", ['inform v o credential purpose="x"', "present o v credential"], SATISFIED),
    ("precedes:inform:present", ["present o v credential"], VIOLATED),
    ("absent-after:revoke:verify", ["verify v o credential"], NOT_EXERCISED),
    ("absent-after:consent.withdraw:present",
     ["consent.withdraw o v credential", "present o v credential"], VIOLATED),
    ("attr:present:metadata", ['present o v credential metadata="x"'], SATISFIED),
    ("attr:present:metadata", ["present o v credential"], VIOLATED),
    ("attr:issue:format", [], NOT_EXERCISED),
])
def test_declarative_trace_checks(canonical, canonical_saturated, spec, lines, status):
    fr = FrEntry("FR90", "The system shall x.", "T1", ("NFR6",), check=parse_check(spec))
    assert check_fr(fr, canonical, canonical_saturated, trace(*lines)).status == status


def test_absent_after_needs_same_parties(canonical, canonical_saturated):
    # revoke i->o and verify v->o have different parties, so nothing is forbidden
    fr = FrEntry("FR90", "The system shall x.", "T1", ("NFR6",), check=parse_check("absent-after:revoke:verify"))
    t = trace("revoke i o credential", "verify v o credential")
    assert check_fr(fr, canonical, canonical_saturated, t).status == SATISFIED


@pytest.mark.parametrize("spec, status", [
    ("fact:fulfills:i", SATISFIED),
    ("fact:retrieves:v:credential", SATISFIED),
    ("fact:fulfills:v:issuance", VIOLATED),
    ("interface:storage", SATISFIED),
    ("interface:keypad", VIOLATED),
])
def test_declarative_static_checks(canonical, canonical_saturated, spec, status):
    fr = FrEntry("FR90", "The system shall x.", "T1", ("NFR6",), check=parse_check(spec))
    assert check_fr(fr, canonical, canonical_saturated).status == status


def test_aggregate_worst_wins():
    vs = [Verdict("FR1", s) for s in (NOT_APPLICABLE, NOT_EXERCISED, SATISFIED, UNCHECKED)]
    assert aggregate(vs).status == UNCHECKED
    assert aggregate(vs + [Verdict("FR1", VIOLATED)]).status == VIOLATED
    assert aggregate(vs[:2]).status == NOT_EXERCISED
    with pytest.raises(ValueError):
        aggregate([])


def test_check_traces_aggregates_across_traces(canonical, canonical_saturated, catalog):
    reqs = catalog.requirement_set()
    verdicts = check_traces(reqs, canonical, canonical_saturated,
                            [load_trace("issuance"), load_trace("present_before_consent")])
    got = statuses(verdicts)
    assert got["FR33a"] == VIOLATED and got["FR33b"] == SATISFIED


def test_witness_dicts_and_descriptions(check):
    v = check("FR44")
    d = v.to_dict()
    assert set(d) == {"fr_key", "status", "witnesses", "message"}
    assert "proof" in d["witnesses"][0]
    assert isinstance(v.witnesses[0], ProofTree)
    assert describe_witness(v.witnesses[0]) == "proof of requests o issuance to=i via base"
    assert describe_witness(3) == "event 3"
