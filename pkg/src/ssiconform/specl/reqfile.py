"""Catalog and requirement documents (``.direq``).

Records, one per line after ``version 1``::

    nfr NFR6 capability-bearing "Consent" "..." caps=2,3,10
    cap 10 data-owner "Shall be able to present a credential for verification"
    fr FR33a T1 trace=FR6.4 nfr=NFR6 constraints=NFR8 owner=o "THE SYSTEM shall ..."
    cond C6.4.1 fr=FR6.4 "The o agrees to data processing before sharing credentials."
    legal FR33a "GDPR Article 7: Conditions for Consent"

A *catalog* document may contain every record type. A *requirements*
document holds only ``fr``/``cond``/``legal`` records whose links are resolved
against a catalog (the built-in one by default).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from ..catalog import (
    CAPABILITY_ACTORS,
    CAPABILITY_BOILERPLATE,
    CONSTRAINT,
    NFR_KINDS,
    TEMPLATES,
    Catalog,
    CapabilityEntry,
    CheckSpec,
    ConditionEntry,
    FrEntry,
    NfrEntry,
    RequirementSet,
    natural_key,
)
from ..model import RELATIONS, ROLE_LETTERS
from .lexer import (
    Diagnostic,
    ParseError,
    Record,
    SourceSpan,
    Token,
    error,
    quote,
    split_list,
    split_record,
    split_version,
    tokenize,
)
from .tracefile import EVENT_KINDS

NFR_KEY_RE = re.compile(r"NFR[1-9][0-9]*\Z")
FR_KEY_RE = re.compile(r"FR[0-9]+(\.[0-9]+)*[a-z]?\Z")
COND_KEY_RE = re.compile(r"C[0-9]+(\.[0-9]+)*[a-z]?\.[0-9]+\Z")
CAP_NUMBER_RE = re.compile(r"[1-9][0-9]*\Z")

CHECK_ARITY = {
    "fact": (2, 3),
    "interface": (1, 1),
    "precedes": (2, 2),
    "absent-after": (2, 2),
    "attr": (2, 2),
}
BOOLS = {"yes": True, "no": False}


class IntegrityError(ParseError):
    """Well-formed document whose cross references do not resolve."""


@dataclass
class _Doc:
    nfrs: dict[str, NfrEntry] = field(default_factory=dict)
    caps: dict[int, CapabilityEntry] = field(default_factory=dict)
    frs: dict[str, FrEntry] = field(default_factory=dict)
    conds: list[tuple[ConditionEntry, SourceSpan]] = field(default_factory=list)
    legal: list[tuple[str, str, SourceSpan]] = field(default_factory=list)
    spans: dict[str, SourceSpan] = field(default_factory=dict)
    nfr_caps: dict[str, tuple[int, ...]] = field(default_factory=dict)


def _usage(rec: Record, n: int, usage: str, diags: list[Diagnostic]) -> bool:
    if len(rec.positional) != n:
        tok = rec.positional[n] if len(rec.positional) > n else rec.line.head
        diags.append(error(f"bad arity: expected '{usage}'", tok.span))
        return False
    return True


def _unknown_attrs(rec: Record, allowed: set[str], diags: list[Diagnostic]) -> bool:
    ok = True
    for key, (_, tok) in rec.attrs.items():
        if key not in allowed:
            diags.append(error(f"unknown attribute {key!r} for {rec.line.head.value}", tok.span))
            ok = False
    return ok


def _quoted(tok: Token, what: str, diags: list[Diagnostic]) -> bool:
    if not tok.quoted:
        diags.append(error(f"{what} must be a quoted string", tok.span))
        return False
    return True


def _key(tok: Token, pattern: re.Pattern, what: str, diags: list[Diagnostic]) -> bool:
    if tok.quoted or not pattern.match(tok.value):
        diags.append(error(f"invalid {what} {tok.value!r}", tok.span))
        return False
    return True


def _claim(doc: _Doc, key: str, span: SourceSpan, diags: list[Diagnostic]) -> bool:
    if key in doc.spans:
        diags.append(error(f"duplicate key {key}", span))
        return False
    doc.spans[key] = span
    return True


def parse_check(text: str) -> CheckSpec:
    """Parse ``shape:arg[:arg]``; raise ``ValueError`` with a reason on failure."""
    shape, *args = text.split(":")
    if shape not in CHECK_ARITY:
        raise ValueError(f"unknown check shape {shape!r}")
    lo, hi = CHECK_ARITY[shape]
    if not lo <= len(args) <= hi or not all(args):
        raise ValueError(f"check {shape} takes {lo} to {hi} arguments")
    if shape == "fact":
        if args[0] not in RELATIONS:
            raise ValueError(f"unknown relation {args[0]}")
        if args[1] not in ROLE_LETTERS:
            raise ValueError(f"unknown role {args[1]}")
    elif shape in ("precedes", "absent-after"):
        for kind in args:
            if kind not in EVENT_KINDS:
                raise ValueError(f"unknown event kind {kind}")
    elif shape == "attr" and args[0] not in EVENT_KINDS:
        raise ValueError(f"unknown event kind {args[0]}")
    return CheckSpec(shape, tuple(args))


def _parse_nfr(rec: Record, doc: _Doc, diags: list[Diagnostic]) -> None:
    _unknown_attrs(rec, {"caps"}, diags)
    if not _usage(rec, 4, 'nfr <key> <kind> "<name>" "<description>"', diags):
        return
    key, kind, name, desc = rec.positional
    if not _key(key, NFR_KEY_RE, "NFR key", diags):
        return
    if kind.quoted or kind.value not in NFR_KINDS:
        diags.append(error(f"unknown NFR kind {kind.value}", kind.span))
        return
    if not (_quoted(name, "name", diags) and _quoted(desc, "description", diags)):
        return
    caps: tuple[int, ...] = ()
    if "caps" in rec.attrs:
        val, tok = rec.attrs["caps"]
        items = split_list(val)
        if not items or not all(CAP_NUMBER_RE.match(i) for i in items):
            diags.append(error(f"caps= takes capability numbers, got {val!r}", tok.span))
            return
        caps = tuple(sorted({int(i) for i in items}))
    if _claim(doc, key.value, key.span, diags):
        doc.nfrs[key.value] = NfrEntry(key.value, name.value, desc.value, kind.value, caps)
        doc.nfr_caps[key.value] = caps


def _parse_cap(rec: Record, doc: _Doc, diags: list[Diagnostic]) -> None:
    _unknown_attrs(rec, {"alias"}, diags)
    if not _usage(rec, 3, 'cap <number> <actor> "<text>"', diags):
        return
    num, actor, text = rec.positional
    if not _key(num, CAP_NUMBER_RE, "capability number", diags):
        return
    if actor.quoted or actor.value not in CAPABILITY_ACTORS:
        diags.append(error(f"unknown capability actor {actor.value}", actor.span))
        return
    if not _quoted(text, "capability text", diags):
        return
    alias = rec.attrs["alias"][0] if "alias" in rec.attrs else None
    for value, tok in ((text.value, text), (alias, rec.attrs.get("alias", (None, None))[1])):
        if value is not None and not value.lower().startswith(CAPABILITY_BOILERPLATE):
            diags.append(error(f"capability text must begin with '{CAPABILITY_BOILERPLATE}'", tok.span))
            return
    if _claim(doc, f"#{num.value}", num.span, diags):
        doc.caps[int(num.value)] = CapabilityEntry(int(num.value), actor.value, text.value, alias)


def _parse_fr(rec: Record, doc: _Doc, diags: list[Diagnostic]) -> None:
    allowed = {"trace", "nfr", "constraints", "owner", "criteria", "feasible", "legal", "check"}
    if not _unknown_attrs(rec, allowed, diags):
        return
    if not _usage(rec, 3, 'fr <key> <template> [trace=<key>] nfr=<key>,... "<statement>"', diags):
        return
    key, template, statement = rec.positional
    if not _key(key, FR_KEY_RE, "FR key", diags):
        return
    if template.quoted or template.value not in TEMPLATES:
        diags.append(error(f"unknown template {template.value}", template.span))
        return
    if not _quoted(statement, "statement", diags):
        return
    if "nfr" not in rec.attrs or not split_list(rec.attrs["nfr"][0]):
        diags.append(error(f"{key.value} needs nfr=<key>[,<key>...]", key.span))
        return
    attrs = {k: v for k, (v, _) in rec.attrs.items()}
    flags: dict[str, bool | None] = {}
    for name in ("feasible", "legal"):
        raw = attrs.get(name)
        if raw is not None and raw not in BOOLS:
            diags.append(error(f"{name}= takes yes or no", rec.attrs[name][1].span))
            return
        flags[name] = BOOLS.get(raw) if raw is not None else None
    owner = attrs.get("owner")
    if owner is not None and owner not in ROLE_LETTERS:
        diags.append(error(f"unknown owner role {owner}", rec.attrs["owner"][1].span))
        return
    check = None
    if "check" in attrs:
        try:
            check = parse_check(attrs["check"])
        except ValueError as exc:
            diags.append(error(str(exc), rec.attrs["check"][1].span))
            return
    entry = FrEntry(
        key=key.value,
        statement=statement.value,
        template=template.value,
        nfr_links=tuple(sorted(set(split_list(attrs["nfr"])), key=natural_key)),
        trace_of=attrs.get("trace") or None,
        constraint_links=tuple(sorted(set(split_list(attrs.get("constraints", ""))), key=natural_key)),
        owner=owner,
        criteria=tuple(c.strip() for c in split_list(attrs.get("criteria", "")) if c.strip()),
        feasible=flags["feasible"],
        legal=flags["legal"],
        check=check,
    )
    if _claim(doc, key.value, key.span, diags):
        doc.frs[key.value] = entry


def _parse_cond(rec: Record, doc: _Doc, diags: list[Diagnostic]) -> None:
    if not _unknown_attrs(rec, {"fr"}, diags):
        return
    if not _usage(rec, 2, 'cond <key> fr=<key> "<text>"', diags):
        return
    key, text = rec.positional
    if not _key(key, COND_KEY_RE, "condition key", diags) or not _quoted(text, "condition text", diags):
        return
    if "fr" not in rec.attrs:
        diags.append(error(f"{key.value} needs fr=<key>", key.span))
        return
    fr_key = rec.attrs["fr"][0]
    if not key.value.startswith("C" + fr_key[2:] + "."):
        diags.append(error(f"condition key {key.value} does not match {fr_key}", key.span))
        return
    if _claim(doc, key.value, key.span, diags):
        doc.conds.append((ConditionEntry(key.value, text.value, fr_key), key.span))


def _parse_legal(rec: Record, doc: _Doc, diags: list[Diagnostic]) -> None:
    if not _unknown_attrs(rec, set(), diags):
        return
    if not _usage(rec, 2, 'legal <fr-key> "<citation>"', diags):
        return
    key, text = rec.positional
    if _key(key, FR_KEY_RE, "FR key", diags) and _quoted(text, "citation", diags):
        doc.legal.append((key.value, text.value, key.span))


_RECORDS = {
    "nfr": _parse_nfr,
    "cap": _parse_cap,
    "fr": _parse_fr,
    "cond": _parse_cond,
    "legal": _parse_legal,
}


def _read(text: str | bytes, allowed: tuple[str, ...]) -> _Doc:
    lines, diags = tokenize(text)
    body = split_version(lines, diags) if not diags else []
    doc = _Doc()
    for line in body:
        head = line.head
        keyword = "" if head.quoted else head.value
        rec = split_record(line, diags)
        if keyword not in _RECORDS:
            diags.append(error(f"unknown keyword {head.value}", head.span))
        elif keyword not in allowed:
            diags.append(error(f"{keyword} records belong in a catalog document", head.span))
        else:
            _RECORDS[keyword](rec, doc, diags)
    if any(d.is_error for d in diags):
        raise ParseError(diags)
    return doc


def _link(doc: _Doc, base: Catalog | None) -> Catalog:
    """Resolve cross references; raise :class:`IntegrityError` on dangling ones."""
    diags: list[Diagnostic] = []
    nfrs = dict(doc.nfrs)
    caps = dict(doc.caps)
    known_frs: dict[str, FrEntry] = {}
    if base is not None:
        nfrs = {n.key: n for n in base.nfrs} | nfrs
        caps = {c.number: c for c in base.capabilities} | caps
        known_frs = {f.key: f for f in base.frs}
    known_frs = known_frs | doc.frs

    for key, numbers in doc.nfr_caps.items():
        for n in numbers:
            if n not in caps:
                diags.append(error(f"{key}: unknown capability {n}", doc.spans[key]))

    conds: dict[str, list[ConditionEntry]] = {}
    for cond, span in doc.conds:
        if cond.fr_key not in doc.frs:
            diags.append(error(f"condition {cond.key}: unknown {cond.fr_key}", span))
        conds.setdefault(cond.fr_key, []).append(cond)
    legal: dict[str, list[str]] = {}
    for fr_key, citation, span in doc.legal:
        if fr_key not in doc.frs:
            diags.append(error(f"legal tag: unknown {fr_key}", span))
        legal.setdefault(fr_key, []).append(citation)

    frs: list[FrEntry] = []
    for key, fr in doc.frs.items():
        span = doc.spans[key]
        for link in fr.nfr_links:
            nfr = nfrs.get(link)
            if nfr is None:
                diags.append(error(f"{key}: unknown {link}", span))
            elif nfr.kind == CONSTRAINT:
                diags.append(error(f"{key}: {link} is a constraint; list it under constraints=", span))
        for link in fr.constraint_links:
            nfr = nfrs.get(link)
            if nfr is None:
                diags.append(error(f"{key}: unknown {link}", span))
            elif nfr.kind != CONSTRAINT:
                diags.append(error(f"{key}: {link} is not a constraint", span))
        if fr.trace_of is not None:
            target = known_frs.get(fr.trace_of)
            if target is None:
                diags.append(error(f"{key}: unknown trace target {fr.trace_of}", span))
            elif target.trace_of is not None:
                diags.append(error(f"{key}: trace target {fr.trace_of} is itself an updated FR", span))
        frs.append(replace(
            fr,
            conditions=tuple(sorted(conds.get(key, ()), key=lambda c: natural_key(c.key))),
            legal_tags=tuple(legal.get(key, ())),
        ))
    if diags:
        raise IntegrityError(diags)
    return Catalog(tuple(nfrs.values()), tuple(caps.values()), tuple(frs))


def parse_catalog(text: str | bytes) -> Catalog:
    """Parse a self-contained catalog document."""
    return _link(_read(text, tuple(_RECORDS)), None)


def parse_requirements(text: str | bytes, catalog: Catalog | None = None) -> RequirementSet:
    """Parse FR records, resolving NFR and trace links against ``catalog``.

    The returned set holds exactly the FR written in the document.
    """
    return resolve_requirements(text, catalog)[1]


def resolve_requirements(text: str | bytes, catalog: Catalog | None = None) -> tuple[Catalog, RequirementSet]:
    """Parse a requirements or catalog document.

    Returns the catalog the requirements resolve against and the set itself.
    A document containing ``nfr`` records stands on its own; its current
    (non-superseded) FR form the set. Otherwise the FR resolve against
    ``catalog`` (the built-in one by default).
    """
    lines, _ = tokenize(text)
    standalone = any(not ln.head.quoted and ln.head.value == "nfr" for ln in lines)
    if standalone:
        cat = parse_catalog(text)
        return cat, cat.requirement_set()
    if catalog is None:
        from ..catalog import load_catalog

        catalog = load_catalog()
    doc = _read(text, ("fr", "cond", "legal"))
    linked = _link(doc, catalog)
    return catalog, RequirementSet(f for f in linked.frs if f.key in doc.frs)


def _render_fr(fr: FrEntry) -> list[str]:
    parts = ["fr", fr.key, fr.template]
    if fr.trace_of is not None:
        parts.append(f"trace={fr.trace_of}")
    parts.append("nfr=" + ",".join(fr.nfr_links))
    if fr.constraint_links:
        parts.append("constraints=" + ",".join(fr.constraint_links))
    if fr.owner is not None:
        parts.append(f"owner={fr.owner}")
    if fr.criteria:
        parts.append("criteria=" + quote(",".join(fr.criteria)))
    for name in ("feasible", "legal"):
        value = getattr(fr, name)
        if value is not None:
            parts.append(f"{name}={'yes' if value else 'no'}")
    if fr.check is not None:
        parts.append(f"check={fr.check}")
    parts.append(quote(fr.statement))
    out = [" ".join(parts)]
    out.extend(f"cond {c.key} fr={fr.key} {quote(c.text)}" for c in fr.conditions)
    out.extend(f"legal {fr.key} {quote(t)}" for t in fr.legal_tags)
    return out


def render_requirements(reqs: RequirementSet) -> str:
    out = ["version 1"]
    for fr in reqs:
        out.extend(_render_fr(fr))
    return "\n".join(out) + "\n"


def render_catalog(catalog: Catalog) -> str:
    out = ["version 1"]
    for n in catalog.nfrs:
        line = f"nfr {n.key} {n.kind} {quote(n.name)} {quote(n.description)}"
        if n.capabilities:
            line += " caps=" + ",".join(str(c) for c in n.capabilities)
        out.append(line)
    for c in catalog.capabilities:
        line = f"cap {c.number} {c.actor} {quote(c.text)}"
        if c.alias is not None:
            line += f" alias={quote(c.alias)}"
        out.append(line)
    for fr in catalog.frs:
        out.extend(_render_fr(fr))
    return "\n".join(out) + "\n"
