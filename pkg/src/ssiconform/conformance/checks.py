"""FR verdicts over a saturated model and an optional event trace.

An FR check has up to two parts. The *static* part asks whether the model
gives an actor an ability (a derived or declared fact, or a declared
resource). The *trace* part walks the events and looks for ordering or
attribute obligations. :func:`_combine` merges the parts into one status.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

from ..catalog import FrEntry, RequirementSet, load_catalog
from ..inference import Pattern, ProofTree, Var, explain, query
from ..model import (
    CREDENTIAL,
    DATA,
    DATA_OWNER,
    ISSUER,
    PERSONAL,
    ROLE_LETTERS,
    VERIFIER,
    FactSet,
    SystemModel,
)
from ..specl.tracefile import Event, Trace
from .readability import DEFAULT_THRESHOLD, ReadabilityError, grade_fraction

SATISFIED = "satisfied"
VIOLATED = "violated"
NOT_EXERCISED = "not-exercised"
NOT_APPLICABLE = "not-applicable"
UNCHECKED = "unchecked"
STATUSES = (SATISFIED, VIOLATED, NOT_EXERCISED, NOT_APPLICABLE, UNCHECKED)

# worst first; used when one FR is checked against several traces
SEVERITY = {VIOLATED: 0, UNCHECKED: 1, SATISFIED: 2, NOT_EXERCISED: 3, NOT_APPLICABLE: 4}

CONSENT_SUITE = ("FR18", "FR32", "FR33a", "FR33b", "FR44", "FR46", "FR47", "FR52", "FR53", "FR54")

# events that process an owner's data; owner is subject for the first two
OWNER_SENDS = ("present", "proof.present")
PROCESSOR_ACTS = ("verify", "issue")


@dataclass(frozen=True)
class ModelWitness:
    """A model declaration (or its absence) that decides an ability check."""

    text: str

    def __str__(self) -> str:
        return self.text


Witness = Union[int, ProofTree, ModelWitness]


@dataclass(frozen=True)
class Verdict:
    fr_key: str
    status: str
    witnesses: tuple[Witness, ...] = ()
    message: str = ""

    def event_witnesses(self) -> list[int]:
        return [w for w in self.witnesses if isinstance(w, int)]

    def to_dict(self) -> dict:
        return {
            "fr_key": self.fr_key,
            "status": self.status,
            "witnesses": [witness_to_dict(w) for w in self.witnesses],
            "message": self.message,
        }


def witness_to_dict(w: Witness) -> dict:
    if isinstance(w, ProofTree):
        return {"proof": w.to_dict()}
    if isinstance(w, ModelWitness):
        return {"model": w.text}
    return {"event": w}


def describe_witness(w: Witness) -> str:
    if isinstance(w, ProofTree):
        return f"proof of {w.root} via {w.rule}"
    if isinstance(w, ModelWitness):
        return w.text
    return f"event {w}"


@dataclass(frozen=True)
class _Part:
    status: str  # satisfied | violated | not-exercised
    witnesses: tuple[Witness, ...]
    message: str


def _ok(message: str, witnesses: Iterable[Witness] = ()) -> _Part:
    return _Part(SATISFIED, tuple(witnesses), message)


def _bad(message: str, witnesses: Iterable[Witness]) -> _Part:
    return _Part(VIOLATED, tuple(witnesses), message)


def _idle(message: str) -> _Part:
    return _Part(NOT_EXERCISED, (), message)


class _Context:
    def __init__(self, model: SystemModel, saturated: FactSet, trace: Trace | None):
        self.model = model
        self.saturated = saturated
        self.trace = trace
        self.events: tuple[Event, ...] = trace.events if trace is not None else ()
        self.owners = {a.id for a in model.actors if a.kind == DATA_OWNER}

    def kind(self, actor: str | None) -> str | None:
        if actor is None:
            return None
        ref = self.model.actor(actor)
        return ref.kind if ref is not None else None

    def category(self, resource: str) -> str | None:
        res = self.model.resource(resource)
        if res is None or res.sort != DATA:
            return None
        return res.category or PERSONAL

    def processing(self, e: Event) -> tuple[str, str, str] | None:
        """``(owner, processor, object)`` when ``e`` processes an owner's data."""
        if e.kind in OWNER_SENDS and e.subject in self.owners and e.counterparty is not None:
            return e.subject, e.counterparty, e.object
        if e.kind in PROCESSOR_ACTS and e.counterparty in self.owners:
            return e.counterparty, e.subject, e.object
        return None

    def earlier(self, e: Event, pred: Callable[[Event], bool]) -> Event | None:
        """The latest event before ``e`` satisfying ``pred``."""
        found = None
        for other in self.events:
            if other.seq >= e.seq:
                break
            if pred(other):
                found = other
        return found


def _prove(ctx: _Context, fact) -> ProofTree:
    tree = explain(fact, ctx.saturated) if ctx.saturated.derivation is not None else None
    return tree if tree is not None else ProofTree(fact, "base")


def _ability(ctx: _Context, relation: str, category: str | None = None,
             counterparty_kinds: tuple[str | None, ...] | None = None,
             label: str = "") -> _Part:
    """Some data owner holds ``relation`` over an object of ``category``."""
    for fact in query(ctx.saturated, Pattern(relation, Var("a"), Var("x"))):
        if fact.subject not in ctx.owners:
            continue
        if category is not None and ctx.category(fact.object) != category:
            continue
        if counterparty_kinds is not None and ctx.kind(fact.counterparty) not in counterparty_kinds:
            continue
        return _ok(f"{fact.subject} can {label or relation} ({fact})", [_prove(ctx, fact)])
    what = f"{relation} over {category} data" if category else relation
    return _bad(f"no data owner has {what}", [ModelWitness(f"missing fact: {what} by a data owner")])


# --- static parts ---------------------------------------------------------

def _static_fr44(ctx: _Context) -> _Part:
    return _ability(ctx, "requests", counterparty_kinds=(ISSUER,), label="request from an issuer")


def _static_fr46(ctx: _Context) -> _Part:
    for owner in sorted(ctx.owners):
        wallet = ctx.model.wallet_of(owner)
        if wallet is not None:
            return _ok(f"wallet {wallet.id} gives {owner} a consent interface",
                       [ModelWitness(f"actor wallet {wallet.id} owner={owner}")])
    return _bad("no data owner has a wallet", [ModelWitness("missing declaration: wallet serving a data owner")])


def _static_fr52(ctx: _Context) -> _Part:
    return _ability(ctx, "presents", PERSONAL, label="present personal data")


def _static_present_credential(ctx: _Context) -> _Part:
    return _ability(ctx, "presents", CREDENTIAL, counterparty_kinds=(None, VERIFIER),
                    label="present a credential")


# --- trace parts ----------------------------------------------------------

def _trace_fr18(ctx: _Context, threshold=DEFAULT_THRESHOLD) -> _Part:
    grants = [e for e in ctx.events if e.kind == "consent.grant"]
    if not grants:
        return _idle("no consent prompt in the trace")
    bad: list[int] = []
    notes: list[str] = []
    for e in grants:
        text = e.attr("text")
        if text is None:
            bad.append(e.seq)
            notes.append(f"event {e.seq} has no prompt text")
            continue
        try:
            grade = grade_fraction(text)
        except ReadabilityError:
            bad.append(e.seq)
            notes.append(f"event {e.seq} prompt has no words")
            continue
        if grade > threshold:
            bad.append(e.seq)
            notes.append(f"event {e.seq} grade {float(grade):.2f} exceeds {float(threshold):g}")
    if bad:
        return _bad("; ".join(notes), bad)
    return _ok(f"{len(grants)} consent prompt(s) at grade {float(threshold):g} or lower", [e.seq for e in grants])


def _trace_fr32(ctx: _Context) -> _Part:
    sends = [e for e in ctx.events if e.kind in OWNER_SENDS and e.subject in ctx.owners]
    if not sends:
        return _idle("no presentation in the trace")
    bad = []
    for e in sends:
        prior = ctx.earlier(e, lambda x, e=e: x.kind == "inform" and x.subject == e.counterparty
                            and x.counterparty == e.subject and x.object == e.object and x.has_attr("purpose"))
        if prior is None:
            bad.append(e.seq)
    if bad:
        return _bad(f"presented without being informed first: events {_seqs(bad)}", bad)
    return _ok(f"{len(sends)} presentation(s) preceded by inform", [e.seq for e in sends])


def _first_processing(ctx: _Context, category: str) -> list[tuple[Event, tuple[str, str, str]]]:
    seen: set[tuple[str, str, str]] = set()
    out = []
    for e in ctx.events:
        key = ctx.processing(e)
        if key is None or ctx.category(key[2]) != category or key in seen:
            continue
        seen.add(key)
        out.append((e, key))
    return out


def _trace_consent_before(ctx: _Context, category: str) -> _Part:
    firsts = _first_processing(ctx, category)
    noun = "credential" if category == CREDENTIAL else "personal data"
    if not firsts:
        return _idle(f"no {noun} processing in the trace")
    bad = []
    for e, (owner, proc, obj) in firsts:
        grant = ctx.earlier(e, lambda x: x.kind == "consent.grant" and x.subject == owner
                            and x.counterparty == proc and x.object == obj)
        if grant is None:
            bad.append(e.seq)
    if bad:
        return _bad(f"{noun} processed before consent for that item: events {_seqs(bad)}", bad)
    return _ok(f"consent given before each {noun} item was processed", [e.seq for e, _ in firsts])


def _trace_fr44(ctx: _Context) -> _Part:
    reqs = [e for e in ctx.events if e.kind == "request" and e.subject in ctx.owners
            and ctx.category(e.object) == CREDENTIAL]
    if not reqs:
        return _idle("no credential request in the trace")
    bad = [e.seq for e in reqs if ctx.kind(e.counterparty) != ISSUER]
    if bad:
        return _bad(f"credential requested without a selected issuer: events {_seqs(bad)}", bad)
    return _ok(f"{len(reqs)} credential request(s) name an issuer", [e.seq for e in reqs])


def _trace_fr46(ctx: _Context) -> _Part:
    procs = [(e, k) for e in ctx.events if (k := ctx.processing(e)) is not None]
    if not procs:
        return _idle("no processing in the trace")
    bad = []
    for e, (owner, proc, _) in procs:
        if ctx.earlier(e, lambda x: x.kind == "consent.grant" and x.subject == owner and x.counterparty == proc) is None:
            bad.append(e.seq)
    if bad:
        return _bad(f"processing without any prior consent to that party: events {_seqs(bad)}", bad)
    return _ok(f"{len(procs)} processing event(s) follow a consent", [e.seq for e, _ in procs])


def _trace_fr47(ctx: _Context) -> _Part:
    withdraws = [e for e in ctx.events if e.kind == "consent.withdraw"]
    if not withdraws:
        return _idle("no consent withdrawal in the trace")
    granted: set[tuple[str, str | None, str]] = set()
    withdrawn: set[tuple[str, str | None, str]] = set()
    bad: list[int] = []
    notes: list[str] = []
    for e in ctx.events:
        if e.kind == "consent.grant":
            key = (e.subject, e.counterparty, e.object)
            granted.add(key)
            withdrawn.discard(key)
        elif e.kind == "consent.withdraw":
            key = (e.subject, e.counterparty, e.object)
            if key not in granted:
                bad.append(e.seq)
                notes.append(f"event {e.seq} withdraws consent never given")
            withdrawn.add(key)
        else:
            proc = ctx.processing(e)
            if proc is not None and proc in withdrawn:
                bad.append(e.seq)
                notes.append(f"event {e.seq} processes {proc[2]} after withdrawal")
    if bad:
        return _bad("; ".join(notes), bad)
    return _ok(f"{len(withdraws)} withdrawal(s) honoured", [e.seq for e in withdraws])


def _trace_fr52(ctx: _Context) -> _Part:
    sends = [e for e in ctx.events if e.kind == "present" and e.subject in ctx.owners
             and ctx.kind(e.counterparty) == ISSUER and ctx.category(e.object) == PERSONAL]
    if not sends:
        return _idle("no personal data presented to an issuer")
    bad, notes = [], []
    for e in sends:
        asked = ctx.earlier(e, lambda x, e=e: x.kind == "request" and x.subject == e.counterparty
                            and x.counterparty == e.subject and x.object == e.object)
        if asked is None:
            bad.append(e.seq)
            notes.append(f"event {e.seq} was not requested by {e.counterparty}")
        if not e.has_attr("attributes"):
            bad.append(e.seq)
            notes.append(f"event {e.seq} has no attribute selection")
    if bad:
        return _bad("; ".join(notes), sorted(set(bad)))
    return _ok(f"{len(sends)} selective presentation(s) on request", [e.seq for e in sends])


def _trace_fr53(ctx: _Context) -> _Part:
    sends = [e for e in ctx.events if e.kind == "present" and e.subject in ctx.owners
             and ctx.kind(e.counterparty) == VERIFIER and ctx.category(e.object) == CREDENTIAL]
    if not sends:
        return _idle("no credential presented to a verifier")
    bad, notes = [], []
    for e in sends:
        asked = ctx.earlier(e, lambda x, e=e: x.kind == "request" and x.subject == e.counterparty
                            and x.counterparty == e.subject and x.object == e.object)
        if asked is None:
            bad.append(e.seq)
            notes.append(f"event {e.seq} was not requested by {e.counterparty}")
        elif ctx.earlier(asked, lambda x, e=e: x.kind == "request" and x.subject == e.subject
                         and x.counterparty == e.counterparty) is None:
            bad.append(e.seq)
            notes.append(f"event {e.seq}: verification was not initiated by {e.subject}")
        if not e.has_attr("metadata"):
            bad.append(e.seq)
            notes.append(f"event {e.seq} carries no metadata")
    if bad:
        return _bad("; ".join(notes), sorted(set(bad)))
    return _ok(f"{len(sends)} credential presentation(s) on owner-initiated request", [e.seq for e in sends])


def _trace_fr54(ctx: _Context) -> _Part:
    sends = [e for e in ctx.events if e.kind == "proof.present" and e.subject in ctx.owners]
    if not sends:
        return _idle("no proof presented in the trace")
    bad = []
    for e in sends:
        if ctx.earlier(e, lambda x, e=e: x.kind == "proof.generate" and x.subject == e.subject
                       and x.object == e.object) is None:
            bad.append(e.seq)
    if bad:
        return _bad(f"proof presented without being generated: events {_seqs(bad)}", bad)
    return _ok(f"{len(sends)} proof presentation(s) follow generation", [e.seq for e in sends])


def _seqs(seqs: Iterable[int]) -> str:
    return ", ".join(str(s) for s in seqs)


Check = tuple[Callable[[_Context], _Part] | None, Callable[[_Context], _Part] | None]

REGISTRY: dict[str, Check] = {
    "FR18": (None, _trace_fr18),
    "FR32": (None, _trace_fr32),
    "FR33a": (None, lambda ctx: _trace_consent_before(ctx, CREDENTIAL)),
    "FR33b": (None, lambda ctx: _trace_consent_before(ctx, PERSONAL)),
    "FR44": (_static_fr44, _trace_fr44),
    "FR46": (_static_fr46, _trace_fr46),
    "FR47": (None, _trace_fr47),
    "FR52": (_static_fr52, _trace_fr52),
    "FR53": (_static_present_credential, _trace_fr53),
    "FR54": (_static_present_credential, _trace_fr54),
}


# --- declarative checks for user FR --------------------------------------

def _same_parties(a: Event, b: Event) -> bool:
    return a.object == b.object and {a.subject, a.counterparty} == {b.subject, b.counterparty}


def _spec_check(fr: FrEntry) -> Check | None:
    spec = fr.check
    if spec is None:
        return None
    args = spec.args
    if spec.shape == "fact":
        relation, role = args[0], args[1]
        obj = args[2] if len(args) > 2 else None

        def static(ctx: _Context) -> _Part:
            kind = ROLE_LETTERS[role]
            for fact in query(ctx.saturated, Pattern(relation, Var("a"), Var("x"))):
                if ctx.kind(fact.subject) != kind:
                    continue
                if obj is not None and obj not in (fact.object, ctx.category(fact.object)):
                    continue
                return _ok(f"{fact} holds", [_prove(ctx, fact)])
            want = f"{relation} by a {kind}" + (f" over {obj}" if obj else "")
            return _bad(f"no fact {want}", [ModelWitness(f"missing fact: {want}")])

        return static, None
    if spec.shape == "interface":
        (resource,) = args

        def interface(ctx: _Context) -> _Part:
            if ctx.model.resource(resource) is not None:
                return _ok(f"interface {resource} is declared", [ModelWitness(f"resource {resource}")])
            return _bad(f"interface {resource} is not declared", [ModelWitness(f"missing resource {resource}")])

        return interface, None
    if spec.shape == "precedes":
        first, then = args

        def precedes(ctx: _Context) -> _Part:
            later = [e for e in ctx.events if e.kind == then]
            if not later:
                return _idle(f"no {then} event in the trace")
            bad = [e.seq for e in later if ctx.earlier(e, lambda x, e=e: x.kind == first and _same_parties(x, e)) is None]
            if bad:
                return _bad(f"{then} without an earlier {first}: events {_seqs(bad)}", bad)
            return _ok(f"every {then} follows {first}", [e.seq for e in later])

        return None, precedes
    if spec.shape == "absent-after":
        trigger, forbidden = args

        def absent_after(ctx: _Context) -> _Part:
            triggers = [e for e in ctx.events if e.kind == trigger]
            if not triggers:
                return _idle(f"no {trigger} event in the trace")
            bad = [e.seq for e in ctx.events if e.kind == forbidden
                   and ctx.earlier(e, lambda x, e=e: x.kind == trigger and _same_parties(x, e)) is not None]
            if bad:
                return _bad(f"{forbidden} after {trigger}: events {_seqs(bad)}", bad)
            return _ok(f"no {forbidden} after {trigger}", [e.seq for e in triggers])

        return None, absent_after
    kind, attr = args

    def has_attr(ctx: _Context) -> _Part:
        events = [e for e in ctx.events if e.kind == kind]
        if not events:
            return _idle(f"no {kind} event in the trace")
        bad = [e.seq for e in events if not e.has_attr(attr)]
        if bad:
            return _bad(f"{kind} without {attr}=: events {_seqs(bad)}", bad)
        return _ok(f"every {kind} carries {attr}=", [e.seq for e in events])

    return None, has_attr


def _combine(fr_key: str, static: _Part | None, trace: _Part | None) -> Verdict:
    if static is not None and static.status == VIOLATED:
        return Verdict(fr_key, VIOLATED, static.witnesses, static.message)
    if trace is not None and trace.status == VIOLATED:
        return Verdict(fr_key, VIOLATED, trace.witnesses, trace.message)
    if trace is not None and trace.status == SATISFIED:
        witnesses = (static.witnesses if static else ()) + trace.witnesses
        message = f"{static.message}; {trace.message}" if static else trace.message
        return Verdict(fr_key, SATISFIED, witnesses, message)
    if static is not None:
        message = static.message if trace is None else f"{static.message}; {trace.message}"
        return Verdict(fr_key, SATISFIED, static.witnesses, message)
    return Verdict(fr_key, NOT_EXERCISED, (), trace.message if trace else "no trace supplied")


def check_fr(fr: FrEntry, model: SystemModel, saturated: FactSet, trace: Trace | None = None) -> Verdict:
    if fr.owner is not None and not model.has_kind(ROLE_LETTERS[fr.owner]):
        return Verdict(fr.key, NOT_APPLICABLE, (), f"model has no {ROLE_LETTERS[fr.owner]} actor")
    check = _spec_check(fr) or REGISTRY.get(fr.key)
    if check is None:
        return Verdict(fr.key, UNCHECKED, (), "no check semantics registered for this FR")
    ctx = _Context(model, saturated, trace)
    static_fn, trace_fn = check
    static = static_fn(ctx) if static_fn else None
    if trace_fn is None:
        return _combine(fr.key, static, None)
    traced = trace_fn(ctx) if trace is not None else _idle("no trace supplied")
    return _combine(fr.key, static, traced)


def check_requirements(reqs: RequirementSet | Iterable[FrEntry], model: SystemModel, saturated: FactSet,
                       trace: Trace | None = None) -> list[Verdict]:
    return [check_fr(fr, model, saturated, trace) for fr in reqs]


def check_consent_suite(model: SystemModel, saturated: FactSet, trace: Trace | None = None) -> list[Verdict]:
    catalog = load_catalog()
    return [check_fr(catalog.fr(key), model, saturated, trace) for key in CONSENT_SUITE]


def aggregate(verdicts: Iterable[Verdict]) -> Verdict:
    """Worst status wins across traces; ties keep the first verdict."""
    ordered = list(verdicts)
    if not ordered:
        raise ValueError("nothing to aggregate")
    return min(ordered, key=lambda v: SEVERITY[v.status])


def check_traces(reqs: RequirementSet | Iterable[FrEntry], model: SystemModel, saturated: FactSet,
                 traces: Iterable[Trace]) -> list[Verdict]:
    """One verdict per FR over every trace (or none, when no trace is given)."""
    traces = list(traces)
    frs = list(reqs)
    if not traces:
        return check_requirements(frs, model, saturated, None)
    per_trace = [check_requirements(frs, model, saturated, t) for t in traces]
    return [aggregate(column) for column in zip(*per_trace)]
