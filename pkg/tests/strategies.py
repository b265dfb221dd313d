"""Hypothesis strategies shared by the property and acceptance tests."""

from __future__ import annotations

from hypothesis import strategies as st

from ssiconform.model import Fact, FactSet, Universe
from ssiconform.specl.tracefile import EVENT_KINDS, REQUIRED_ATTRS, Event, Trace

ACTORS = ("o", "v", "i", "s", "w")
RESOURCES = ("personal_data", "credential", "degree", "issuance", "verification")
KINDS = {"o": "data-owner", "v": "verifier", "i": "issuer", "s": "global-system", "w": "wallet"}
SORTS = {"personal_data": "data", "credential": "data", "degree": "data",
         "issuance": "service", "verification": "service"}
REQUIRES = {"issuance": frozenset({"personal_data"}), "verification": frozenset({"credential", "degree"})}
RELATIONS = ("owns", "has", "offers", "fulfills", "requests", "presents", "retrieves", "stores")

ident = st.from_regex(r"[A-Za-z_][A-Za-z0-9_.\-]{0,8}", fullmatch=True)
attr_value = st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\n"), max_size=30)


@st.composite
def events(draw, seq: int, ids=None):
    kind = draw(st.sampled_from(EVENT_KINDS))
    pick = st.sampled_from(ids) if ids else ident
    subject = draw(pick)
    obj = draw(st.sampled_from(RESOURCES) if ids else ident)
    counterparty = draw(st.none() | pick)
    attrs = draw(st.dictionaries(st.from_regex(r"[a-z_]{1,6}", fullmatch=True), attr_value, max_size=3))
    for key in REQUIRED_ATTRS.get(kind, ()):
        attrs.setdefault(key, draw(attr_value))
    return Event(seq, kind, subject, obj, counterparty, tuple(attrs.items()))


@st.composite
def traces(draw, ids=None, max_events=8):
    gaps = draw(st.lists(st.integers(1, 3), max_size=max_events))
    seq, out = 0, []
    for gap in gaps:
        seq += gap
        out.append(draw(events(seq, ids)))
    model_id = draw(st.none() | ident)
    return Trace(tuple(out), model_id)


def canonical_traces(max_events=10):
    """Traces over the canonical ids, numbered 1..n."""
    return traces(ids=ACTORS, max_events=max_events).map(lambda t: Trace(t.renumbered().events, "canonical"))


def fact_sets():
    fact = st.builds(
        lambda rel, subj, obj, cp: Fact(rel, subj, obj, cp if rel in ("presents", "requests") else None),
        st.sampled_from(RELATIONS), st.sampled_from(ACTORS), st.sampled_from(RESOURCES),
        st.none() | st.sampled_from(ACTORS),
    )
    return st.frozensets(fact, max_size=12).map(lambda fs: FactSet(fs, Universe(KINDS, SORTS, REQUIRES)))
