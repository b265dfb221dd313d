"""Scenario runner that produces event traces from a system model.

Scenarios are written against roles (``owner``, ``issuer``, ...) and object
references (``credential:0`` is the first credential-category datum by id,
``service:verifier`` a service the verifier offers). Roles and objects are
bound to concrete ids when a scenario runs. The seed only picks free-text
attribute values; event order is fixed per scenario.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    CREDENTIAL,
    DATA_OWNER,
    GLOBAL_SYSTEM,
    ISSUER,
    PERSONAL,
    SERVICE,
    VERIFIER,
    SystemModel,
)
from .specl.tracefile import Event, Trace

ROLE_KINDS = {
    "owner": DATA_OWNER,
    "issuer": ISSUER,
    "verifier": VERIFIER,
    "system": GLOBAL_SYSTEM,
}

PURPOSES = (
    "check that you hold this credential",
    "confirm who you are before we go on",
    "decide if you can use our service",
    "issue a credential to you",
)
# each prompt scores well under grade 8
CONSENT_TEXTS = (
    "Do you agree to share this with us? You can say no.",
    "Can we use this to check who you are? Tap yes or no.",
    "We will use this one time. Is that okay with you?",
    "Let us see this now? You can stop at any time.",
)
ATTRIBUTE_SETS = ("name", "name,birth_date", "name,address", "birth_date")
METADATA = ("format=vc", "format=vc;proof=signature", "format=vc;status=listed")


class ScenarioError(ValueError):
    pass


class InjectionError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    kind: str
    subject: str
    object: str
    counterparty: str | None = None
    attrs: tuple[tuple[str, str], ...] = ()
    optional: bool = False  # skipped when its object does not resolve


@dataclass(frozen=True)
class Scenario:
    id: str
    steps: tuple[Step, ...]
    parameters: tuple[tuple[str, tuple[str, ...]], ...] = (
        ("purpose", PURPOSES),
        ("text", CONSENT_TEXTS),
        ("attributes", ATTRIBUTE_SETS),
        ("metadata", METADATA),
    )


def _session(cred: str, optional: bool = False, initiate: bool = True) -> list[Step]:
    """Owner-initiated presentation of ``cred`` to the verifier."""
    steps = [Step("inform", "verifier", cred, "owner", (("purpose", "$purpose"),), optional)]
    if initiate:
        steps.append(Step("request", "owner", "service:verifier", "verifier", (), optional))
    steps += [
        Step("request", "verifier", cred, "owner", (), optional),
        Step("consent.grant", "owner", cred, "verifier", (("text", "$text"),), optional),
        Step("present", "owner", cred, "verifier", (("metadata", "$metadata"),), optional),
        Step("verify", "verifier", cred, "owner", (), optional),
    ]
    return steps


def builtin_scenarios() -> list[Scenario]:
    issuance = Scenario("issuance", (
        Step("inform", "issuer", "personal:0", "owner", (("purpose", "$purpose"),)),
        Step("consent.grant", "owner", "personal:0", "issuer", (("text", "$text"),)),
        Step("consent.grant", "owner", "credential:0", "issuer", (("text", "$text"),)),
        Step("request", "owner", "credential:0", "issuer"),
        Step("request", "issuer", "personal:0", "owner"),
        Step("present", "owner", "personal:0", "issuer", (("attributes", "$attributes"),)),
        Step("issue", "issuer", "credential:0", "owner"),
        Step("store", "owner", "credential:0", "wallet"),
    ))
    presentation = Scenario("presentation", tuple(
        _session("credential:0")
        + _session("credential:1", optional=True, initiate=False)
        + [Step("consent.withdraw", "owner", "credential:0", "verifier")]
    ))
    proof = Scenario("proof-presentation", (
        Step("inform", "verifier", "credential:0", "owner", (("purpose", "$purpose"),)),
        Step("request", "owner", "service:verifier", "verifier"),
        Step("request", "verifier", "credential:0", "owner"),
        Step("consent.grant", "owner", "credential:0", "verifier", (("text", "$text"),)),
        Step("proof.generate", "owner", "credential:0"),
        Step("proof.present", "owner", "credential:0", "verifier", (("metadata", "$metadata"),)),
        Step("verify", "verifier", "credential:0", "owner"),
    ))
    revocation = Scenario("revocation", tuple(
        _session("credential:0")
        + [
            Step("revoke", "issuer", "credential:0", "owner"),
            Step("verify", "verifier", "credential:0", "owner", (("result", "revoked"),)),
        ]
    ))
    export_import = Scenario("export-import", (
        Step("export", "owner", "credential:0", "wallet"),
        Step("import", "owner", "credential:0", "wallet"),
    ))
    retrieval = Scenario("retrieval", (
        Step("store", "owner", "credential:0", "wallet"),
        Step("retrieve", "owner", "credential:0", "wallet"),
    ))
    recovery = Scenario("recovery", (
        Step("export", "owner", "credential:0", "wallet"),
        Step("import", "owner", "credential:0", "wallet", (("mode", "recovery"),)),
    ))
    return [issuance, presentation, proof, revocation, export_import, retrieval, recovery]


def scenario_ids() -> list[str]:
    return [s.id for s in builtin_scenarios()]


def get_scenario(scenario_id: str) -> Scenario:
    for s in builtin_scenarios():
        if s.id == scenario_id:
            return s
    raise ScenarioError(f"unknown scenario {scenario_id}")


class _Binder:
    def __init__(self, model: SystemModel):
        self.model = model
        self.cache: dict[str, str] = {}

    def role(self, role: str) -> str:
        if role in self.cache:
            return self.cache[role]
        if role == "wallet":
            wallet = self.model.wallet_of(self.role("owner"))
            if wallet is None:
                raise ScenarioError("no wallet")
            actor = wallet.id
        else:
            found = self.model.actors_of_kind(ROLE_KINDS[role])
            if not found:
                raise ScenarioError(f"no {role}")
            actor = found[0].id
        self.cache[role] = actor
        return actor

    def object(self, ref: str) -> str | None:
        category, _, index = ref.partition(":")
        if category == "service":
            provider = self.role(index)
            offered = sorted(
                f.object for f in self.model.facts
                if f.relation in ("offers", "owns") and f.subject == provider
                and (res := self.model.resource(f.object)) is not None and res.sort == SERVICE
            )
            return offered[0] if offered else None
        items = self.model.data_of_category({"personal": PERSONAL, "credential": CREDENTIAL}[category])
        pos = int(index)
        return items[pos].id if pos < len(items) else None


def run_scenario(model: SystemModel, scenario: Scenario | str, seed: int) -> Trace:
    """Bind the scenario to ``model`` and emit its trace (seq 1..n)."""
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    rng = random.Random(f"{scenario.id}:{seed}")
    params = dict(scenario.parameters)
    binder = _Binder(model)
    events: list[Event] = []
    for step in scenario.steps:
        obj = binder.object(step.object)
        if obj is None:
            if step.optional:
                continue
            raise ScenarioError(f"no {step.object.replace(':', ' #')} for {scenario.id}")
        subject = binder.role(step.subject)
        cp = binder.role(step.counterparty) if step.counterparty else None
        attrs = tuple(
            (k, rng.choice(params[v[1:]]) if v.startswith("$") else v) for k, v in step.attrs
        )
        events.append(Event(len(events) + 1, step.kind, subject, obj, cp, attrs))
    return Trace(tuple(events), model.id)


# --- violation injection --------------------------------------------------

VIOLATION_KINDS = (
    "skip-consent",
    "process-after-withdraw",
    "skip-inform",
    "reuse-consent-across-credentials",
    "verifier-initiated-presentation",
    "drop-metadata",
    "skip-proof-generate",
)
# FR each injection is built to break, and the scenario it applies to
INJECTION_TARGETS = {
    "skip-consent": ("FR33b", "issuance"),
    "skip-inform": ("FR32", "issuance"),
    "reuse-consent-across-credentials": ("FR33a", "presentation"),
    "process-after-withdraw": ("FR47", "presentation"),
    "verifier-initiated-presentation": ("FR53", "presentation"),
    "drop-metadata": ("FR53", "presentation"),
    "skip-proof-generate": ("FR54", "proof-presentation"),
}

_PROCESSING = ("present", "proof.present", "verify", "issue")


def _first(events: list[Event], kind: str) -> int:
    for i, e in enumerate(events):
        if e.kind == kind:
            return i
    raise InjectionError(f"trace has no {kind} event")


def _involves(e: Event, party: str, other: str | None, obj: str) -> bool:
    return e.object == obj and {e.subject, e.counterparty} == {party, other}


def inject_violation(trace: Trace, kind: str) -> Trace:
    """Apply the edit rule for ``kind`` and renumber the events."""
    events = list(trace.events)
    if kind == "skip-consent":
        del events[_first(events, "consent.grant")]
    elif kind == "skip-inform":
        del events[_first(events, "inform")]
    elif kind == "skip-proof-generate":
        del events[_first(events, "proof.generate")]
    elif kind == "reuse-consent-across-credentials":
        seen: dict[tuple[str, str | None], str] = {}
        for i, e in enumerate(events):
            if e.kind != "consent.grant":
                continue
            pair = (e.subject, e.counterparty)
            if pair in seen and seen[pair] != e.object:
                del events[i]
                break
            seen.setdefault(pair, e.object)
        else:
            raise InjectionError("trace has no second consent to the same party")
    elif kind == "process-after-withdraw":
        w = _first(events, "consent.withdraw")
        wd = events[w]
        target = None
        for i in range(w):
            e = events[i]
            if e.kind in _PROCESSING and _involves(e, wd.subject, wd.counterparty, wd.object):
                target = i
        if target is None:
            raise InjectionError("no processing precedes the withdrawal")
        events.insert(target, events.pop(w))
    elif kind == "verifier-initiated-presentation":
        cut = None
        for i, e in enumerate(events):
            if e.kind != "request" or e.counterparty is None:
                continue
            follows = any(
                p.kind == "present" and p.subject == e.counterparty and p.counterparty == e.subject
                and p.object == e.object for p in events[i + 1:]
            )
            if follows:
                cut = i
                break
        if cut is None:
            raise InjectionError("trace has no requested presentation")
        asked = events[cut]
        before = [e for e in events[:cut] if e.kind == "request" and e.subject == asked.counterparty
                  and e.counterparty == asked.subject]
        if not before:
            raise InjectionError("presentation was not initiated by the owner")
        events = [e for e in events if not any(e is b for b in before)]
    elif kind == "drop-metadata":
        for i, e in enumerate(events):
            if e.kind == "present" and e.has_attr("metadata"):
                attrs = tuple((k, v) for k, v in e.attrs if k != "metadata")
                events[i] = Event(e.seq, e.kind, e.subject, e.object, e.counterparty, attrs)
                break
        else:
            raise InjectionError("trace has no present event with metadata")
    else:
        raise InjectionError(f"unknown violation kind {kind}")
    return trace.renumbered(events)
