"""Concrete DI/SSI systems under evaluation.

A :class:`SystemModel` declares actors, resources (services and data) and the
base facts that hold between them. It is the starting point for inference:
:func:`base_facts` hands the declared facts, together with the typing
information the axioms need, to :mod:`ssiconform.inference`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, Mapping

from .specl.lexer import Diagnostic, SourceSpan, error, warning

if TYPE_CHECKING:
    from .specl.modelfile import ModelDeclarations

DATA_OWNER = "data-owner"
VERIFIER = "verifier"
ISSUER = "issuer"
GLOBAL_SYSTEM = "global-system"
WALLET = "wallet"
GENERIC = "generic"
ACTOR_KINDS = (DATA_OWNER, VERIFIER, ISSUER, GLOBAL_SYSTEM, WALLET, GENERIC)

# keyword used in model files -> actor kind
KIND_KEYWORDS = {
    "owner": DATA_OWNER,
    "verifier": VERIFIER,
    "issuer": ISSUER,
    "system": GLOBAL_SYSTEM,
    "wallet": WALLET,
    "generic": GENERIC,
}
KIND_TO_KEYWORD = {v: k for k, v in KIND_KEYWORDS.items()}

# single-letter roles used in requirement statements
ROLE_LETTERS = {
    "o": DATA_OWNER,
    "v": VERIFIER,
    "i": ISSUER,
    "s": GLOBAL_SYSTEM,
    "w": WALLET,
}

SERVICE = "service"
DATA = "data"
EITHER = "either"

PERSONAL = "personal"
CREDENTIAL = "credential"
DATA_CATEGORIES = (PERSONAL, CREDENTIAL)

RELATIONS = ("owns", "has", "offers", "fulfills", "requests", "presents", "retrieves", "stores")
# relations whose object must be a service
SERVICE_ONLY = frozenset({"fulfills", "requests"})
# relations that may name the receiving actor
DIRECTED = frozenset({"presents", "requests"})


@dataclass(frozen=True)
class ActorRef:
    id: str
    kind: str
    owner: str | None = None  # wallets only: the data owner they serve


@dataclass(frozen=True)
class Resource:
    id: str
    sort: str
    requires: frozenset[str] = frozenset()
    category: str | None = None  # data only


@dataclass(frozen=True)
class Fact:
    relation: str
    subject: str
    object: str
    counterparty: str | None = None

    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.relation, self.subject, self.object, self.counterparty or "")

    def __lt__(self, other: "Fact") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        text = f"{self.relation} {self.subject} {self.object}"
        if self.counterparty is not None:
            text += f" to={self.counterparty}"
        return text


@dataclass(frozen=True)
class Universe:
    """Typing context for inference: actor kinds, resource sorts, service inputs."""

    actors: Mapping[str, str] = field(default_factory=dict)
    sorts: Mapping[str, str] = field(default_factory=dict)
    requires: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def sort_of(self, resource: str) -> str | None:
        return self.sorts.get(resource)

    def kind_of(self, actor: str) -> str | None:
        return self.actors.get(actor)


@dataclass(frozen=True)
class FactSet:
    """An immutable set of ground facts plus the universe they range over.

    Sets produced by :func:`ssiconform.inference.saturate` also remember the
    round in which each fact first appeared, which is what proof extraction
    uses. That bookkeeping does not take part in equality.
    """

    facts: frozenset[Fact] = frozenset()
    universe: Universe = field(default_factory=Universe)
    derivation: Any = field(default=None, compare=False, repr=False)

    def __contains__(self, fact: object) -> bool:
        return fact in self.facts

    def __iter__(self):
        return iter(sorted(self.facts))

    def __len__(self) -> int:
        return len(self.facts)

    def __le__(self, other: "FactSet") -> bool:
        return self.facts <= other.facts

    def with_facts(self, facts: Iterable[Fact]) -> "FactSet":
        return FactSet(frozenset(facts), self.universe)


@dataclass(frozen=True)
class SystemModel:
    id: str | None = None
    actors: tuple[ActorRef, ...] = ()
    resources: tuple[Resource, ...] = ()
    facts: frozenset[Fact] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "actors", tuple(sorted(self.actors, key=lambda a: a.id)))
        object.__setattr__(self, "resources", tuple(sorted(self.resources, key=lambda r: r.id)))
        object.__setattr__(self, "facts", frozenset(self.facts))

    def actor(self, actor_id: str) -> ActorRef | None:
        return next((a for a in self.actors if a.id == actor_id), None)

    def resource(self, resource_id: str) -> Resource | None:
        return next((r for r in self.resources if r.id == resource_id), None)

    def actors_of_kind(self, kind: str) -> list[ActorRef]:
        return [a for a in self.actors if a.kind == kind]

    def has_kind(self, kind: str) -> bool:
        return any(a.kind == kind for a in self.actors)

    def data_of_category(self, category: str) -> list[Resource]:
        return [r for r in self.resources if r.sort == DATA and r.category == category]

    def wallet_of(self, owner_id: str) -> ActorRef | None:
        return next((a for a in self.actors if a.kind == WALLET and a.owner == owner_id), None)

    def category_of(self, resource_id: str) -> str | None:
        res = self.resource(resource_id)
        return res.category if res is not None else None

    def universe(self) -> Universe:
        return Universe(
            actors={a.id: a.kind for a in self.actors},
            sorts={r.id: r.sort for r in self.resources},
            requires={r.id: r.requires for r in self.resources if r.sort == SERVICE},
        )


class ModelError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def build_model(decls: "ModelDeclarations") -> SystemModel:
    """Turn parsed declarations into a model, rejecting dangling or duplicate ids."""
    diags: list[Diagnostic] = []
    seen: dict[str, SourceSpan | None] = {}

    def declare(ident: str, span: SourceSpan | None) -> None:
        if ident in seen:
            prev = seen[ident]
            where = f" (first declared at line {prev.line})" if prev else ""
            diags.append(error(f"duplicate id {ident}{where}", span))
        else:
            seen[ident] = span

    actors: list[ActorRef] = []
    for a in decls.actors:
        declare(a.id, a.span)
        actors.append(ActorRef(a.id, a.kind, a.owner))
    resources: list[Resource] = []
    for s in decls.services:
        declare(s.id, s.span)
        resources.append(Resource(s.id, SERVICE, frozenset(s.requires)))
    for d in decls.data:
        declare(d.id, d.span)
        resources.append(Resource(d.id, DATA, category=d.category))

    actor_ids = {a.id for a in actors}
    data_ids = {r.id for r in resources if r.sort == DATA}
    resource_ids = {r.id for r in resources}

    for a in decls.actors:
        if a.owner is not None and a.owner not in actor_ids:
            diags.append(error(f"undeclared actor {a.owner} (line {_line(a.span)})", a.span))
    for s in decls.services:
        for dep in s.requires:
            if dep not in data_ids:
                diags.append(error(f"undeclared data {dep} (line {_line(s.span)})", s.span))
    facts: set[Fact] = set()
    for f in decls.facts:
        if f.subject not in actor_ids:
            diags.append(error(f"undeclared actor {f.subject} (line {_line(f.span)})", f.span))
        if f.object not in resource_ids:
            diags.append(error(f"undeclared resource {f.object} (line {_line(f.span)})", f.span))
        if f.counterparty is not None and f.counterparty not in actor_ids:
            diags.append(error(f"undeclared actor {f.counterparty} (line {_line(f.span)})", f.span))
        facts.add(Fact(f.relation, f.subject, f.object, f.counterparty))

    if diags:
        raise ModelError(diags)
    return SystemModel(decls.model_id, tuple(actors), tuple(resources), frozenset(facts))


def _line(span: SourceSpan | None) -> str:
    return str(span.line) if span is not None else "?"


def validate_model(model: SystemModel) -> list[Diagnostic]:
    """Check structural invariants; an empty list means the model is well formed."""
    diags: list[Diagnostic] = []
    actors = {a.id: a for a in model.actors}
    resources = {r.id: r for r in model.resources}

    if len(actors) != len(model.actors):
        diags.append(error("duplicate actor ids"))
    if len(resources) != len(model.resources):
        diags.append(error("duplicate resource ids"))
    for ident in sorted(set(actors) & set(resources)):
        diags.append(error(f"id {ident} names both an actor and a resource"))

    wallets_per_owner: dict[str, list[str]] = {}
    for a in model.actors:
        if a.kind not in ACTOR_KINDS:
            diags.append(error(f"actor {a.id} has unknown kind {a.kind}"))
        if a.owner is None:
            continue
        if a.kind != WALLET:
            diags.append(error(f"actor {a.id} is not a wallet but names an owner"))
            continue
        owner = actors.get(a.owner)
        if owner is None:
            diags.append(error(f"wallet {a.id} serves undeclared actor {a.owner}"))
        elif owner.kind != DATA_OWNER:
            diags.append(error(f"wallet {a.id} serves {a.owner}, which is not a data owner"))
        wallets_per_owner.setdefault(a.owner, []).append(a.id)
    for owner, wallets in sorted(wallets_per_owner.items()):
        if len(wallets) > 1:
            diags.append(error(f"data owner {owner} has more than one wallet: {', '.join(sorted(wallets))}"))

    for r in model.resources:
        if r.sort not in (SERVICE, DATA):
            diags.append(error(f"resource {r.id} has unknown sort {r.sort}"))
        if r.sort == DATA and r.category not in DATA_CATEGORIES:
            diags.append(error(f"data {r.id} has unknown category {r.category}"))
        for dep in sorted(r.requires):
            target = resources.get(dep)
            if r.sort != SERVICE:
                diags.append(error(f"data {r.id} cannot require anything"))
                break
            if target is None:
                diags.append(error(f"service {r.id} requires undeclared data {dep}"))
            elif target.sort != DATA:
                diags.append(error(f"service {r.id} requires {dep}, which is not data"))

    for f in sorted(model.facts):
        if f.relation not in RELATIONS:
            diags.append(error(f"unknown relation {f.relation}"))
            continue
        if f.subject not in actors:
            diags.append(error(f"fact '{f}' names undeclared actor {f.subject}"))
        obj = resources.get(f.object)
        if obj is None:
            diags.append(error(f"fact '{f}' names undeclared resource {f.object}"))
        elif f.relation in SERVICE_ONLY and obj.sort != SERVICE:
            diags.append(error(f"fact '{f}': {f.relation} takes a service, {f.object} is data"))
        if f.counterparty is not None:
            if f.relation not in DIRECTED:
                diags.append(error(f"fact '{f}': {f.relation} does not take a counterparty"))
            elif f.counterparty not in actors:
                diags.append(error(f"fact '{f}' names undeclared actor {f.counterparty}"))

    # Without offers, the fulfilment axioms can never fire for an owned service.
    for f in sorted(model.facts):
        if f.relation != "owns":
            continue
        res = resources.get(f.object)
        if res is None or res.sort != SERVICE:
            continue
        if Fact("offers", f.subject, f.object) not in model.facts:
            diags.append(warning(f"{f.subject} owns {f.object}: owned but never offered"))
    return diags


class InvalidModelError(ModelError):
    pass


def base_facts(model: SystemModel) -> FactSet:
    """The declared facts as an immutable set, with no derivation applied."""
    errors = [d for d in validate_model(model) if d.is_error]
    if errors:
        raise InvalidModelError(errors)
    return FactSet(model.facts, model.universe())
