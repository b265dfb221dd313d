"""System-model files (``.dimodel``).

::

    version 1
    model canonical
    actor owner o
    actor wallet w owner=o
    service issuance requires=personal_data
    data personal_data category=personal
    fact owns o personal_data
    fact presents o credential to=v
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .lexer import (
    Diagnostic,
    ParseError,
    Record,
    SourceSpan,
    check_ident,
    error,
    split_list,
    split_record,
    split_version,
    tokenize,
)

if TYPE_CHECKING:
    from ..model import SystemModel


@dataclass(frozen=True)
class ActorDecl:
    id: str
    kind: str
    owner: str | None = None
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ServiceDecl:
    id: str
    requires: tuple[str, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DataDecl:
    id: str
    category: str = "personal"
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FactDecl:
    relation: str
    subject: str
    object: str
    counterparty: str | None = None
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ModelDeclarations:
    model_id: str | None = None
    actors: tuple[ActorDecl, ...] = ()
    services: tuple[ServiceDecl, ...] = ()
    data: tuple[DataDecl, ...] = ()
    facts: tuple[FactDecl, ...] = ()


def _no_extra(rec: Record, allowed: set[str], diags: list[Diagnostic]) -> None:
    for key, (_, tok) in rec.attrs.items():
        if key not in allowed:
            diags.append(error(f"unknown attribute {key!r} for {rec.line.head.value}", tok.span))


def _arity(rec: Record, n: int, usage: str, diags: list[Diagnostic]) -> bool:
    if len(rec.positional) != n:
        tok = rec.positional[n] if len(rec.positional) > n else rec.line.head
        diags.append(error(f"bad arity: expected '{usage}'", tok.span))
        return False
    return True


def parse_model(text: str | bytes) -> ModelDeclarations:
    """Parse a model file; raise :class:`ParseError` with every diagnostic on failure."""
    from ..model import DATA_CATEGORIES, DIRECTED, KIND_KEYWORDS, RELATIONS

    lines, diags = tokenize(text)
    body = split_version(lines, diags) if not diags else []
    model_id: str | None = None
    actors: list[ActorDecl] = []
    services: list[ServiceDecl] = []
    data: list[DataDecl] = []
    facts: list[FactDecl] = []

    for line in body:
        head = line.head
        keyword = head.value if not head.quoted else ""
        rec = split_record(line, diags)
        if keyword == "model":
            _no_extra(rec, set(), diags)
            if _arity(rec, 1, "model <id>", diags) and check_ident(rec.positional[0], "model id", diags):
                if model_id is not None:
                    diags.append(error("model id declared twice", head.span))
                model_id = rec.positional[0].value
        elif keyword == "actor":
            _no_extra(rec, {"owner"}, diags)
            if not _arity(rec, 2, "actor <kind> <id> [owner=<id>]", diags):
                continue
            kind_tok, id_tok = rec.positional
            if kind_tok.value not in KIND_KEYWORDS or kind_tok.quoted:
                diags.append(error(f"unknown actor kind {kind_tok.value}", kind_tok.span))
                continue
            if not check_ident(id_tok, "actor id", diags):
                continue
            owner = None
            if "owner" in rec.attrs:
                owner, owner_tok = rec.attrs["owner"]
                if kind_tok.value != "wallet":
                    diags.append(error("owner= is only valid for wallets", owner_tok.span))
                    continue
            actors.append(ActorDecl(id_tok.value, KIND_KEYWORDS[kind_tok.value], owner, id_tok.span))
        elif keyword == "service":
            _no_extra(rec, {"requires"}, diags)
            if not _arity(rec, 1, "service <id> [requires=<data>,...]", diags):
                continue
            if not check_ident(rec.positional[0], "service id", diags):
                continue
            reqs: tuple[str, ...] = ()
            if "requires" in rec.attrs:
                val, tok = rec.attrs["requires"]
                reqs = tuple(sorted(set(split_list(val))))
                if not reqs:
                    diags.append(error("requires= needs at least one data id", tok.span))
            services.append(ServiceDecl(rec.positional[0].value, reqs, rec.positional[0].span))
        elif keyword == "data":
            _no_extra(rec, {"category"}, diags)
            if not _arity(rec, 1, "data <id> [category=personal|credential]", diags):
                continue
            if not check_ident(rec.positional[0], "data id", diags):
                continue
            category = "personal"
            if "category" in rec.attrs:
                category, tok = rec.attrs["category"]
                if category not in DATA_CATEGORIES:
                    diags.append(error(f"unknown data category {category}", tok.span))
                    continue
            data.append(DataDecl(rec.positional[0].value, category, rec.positional[0].span))
        elif keyword == "fact":
            _no_extra(rec, {"to"}, diags)
            if not _arity(rec, 3, "fact <relation> <subject> <object> [to=<actor>]", diags):
                continue
            rel, subj, obj = rec.positional
            if rel.quoted or rel.value not in RELATIONS:
                diags.append(error(f"unknown relation {rel.value}", rel.span))
                continue
            if not (check_ident(subj, "actor id", diags) and check_ident(obj, "resource id", diags)):
                continue
            to = None
            if "to" in rec.attrs:
                to, tok = rec.attrs["to"]
                if rel.value not in DIRECTED:
                    diags.append(error(f"{rel.value} does not take a counterparty", tok.span))
                    continue
            facts.append(FactDecl(rel.value, subj.value, obj.value, to, rel.span))
        else:
            diags.append(error(f"unknown keyword {head.value}", head.span))

    if any(d.is_error for d in diags):
        raise ParseError(diags)
    return ModelDeclarations(model_id, tuple(actors), tuple(services), tuple(data), tuple(facts))


def render_model(model: "SystemModel") -> str:
    """Canonical text: actors, then resources, then facts, each sorted."""
    from ..model import DATA, KIND_TO_KEYWORD

    out = ["version 1"]
    if model.id is not None:
        out.append(f"model {model.id}")
    for a in sorted(model.actors, key=lambda a: a.id):
        line = f"actor {KIND_TO_KEYWORD[a.kind]} {a.id}"
        if a.owner is not None:
            line += f" owner={a.owner}"
        out.append(line)
    for r in sorted(model.resources, key=lambda r: r.id):
        if r.sort == DATA:
            out.append(f"data {r.id} category={r.category}")
        else:
            line = f"service {r.id}"
            if r.requires:
                line += " requires=" + ",".join(sorted(r.requires))
            out.append(line)
    for f in sorted(model.facts):
        out.append(f"fact {f}")
    return "\n".join(out) + "\n"
