"""Event-trace files (``.ditrace``).

One event per line: ``<seq> <kind> <subject> [<counterparty>] <object> [key="value" ...]``.
Sequence numbers are strictly increasing positive integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

from .lexer import (
    Diagnostic,
    ParseError,
    SourceSpan,
    check_ident,
    error,
    quote,
    split_record,
    split_version,
    tokenize,
)

if TYPE_CHECKING:
    from ..model import SystemModel

EVENT_KINDS = (
    "consent.grant",
    "consent.withdraw",
    "inform",
    "request",
    "present",
    "issue",
    "verify",
    "revoke",
    "store",
    "retrieve",
    "export",
    "import",
    "proof.generate",
    "proof.present",
)
REQUIRED_ATTRS = {"inform": ("purpose",)}
_SEQ_RE = re.compile(r"[0-9]+\Z")


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    subject: str
    object: str
    counterparty: str | None = None
    attrs: tuple[tuple[str, str], ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "attrs", tuple(sorted(dict(self.attrs).items())))

    def attr(self, key: str) -> str | None:
        return dict(self.attrs).get(key)

    def has_attr(self, key: str) -> bool:
        return any(k == key for k, _ in self.attrs)

    def render(self) -> str:
        parts = [str(self.seq), self.kind, self.subject]
        if self.counterparty is not None:
            parts.append(self.counterparty)
        parts.append(self.object)
        parts.extend(f"{k}={quote(v)}" for k, v in self.attrs)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Trace:
    events: tuple[Event, ...] = ()
    model_id: str | None = None

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def by_seq(self, seq: int) -> Event | None:
        return next((e for e in self.events if e.seq == seq), None)

    def renumbered(self, events: Iterable[Event] | None = None) -> "Trace":
        """Copy with seq numbers 1..n in the given order."""
        src = self.events if events is None else tuple(events)
        out = tuple(
            Event(i, e.kind, e.subject, e.object, e.counterparty, e.attrs)
            for i, e in enumerate(src, start=1)
        )
        return Trace(out, self.model_id)

    def unresolved(self, model: "SystemModel") -> list[Diagnostic]:
        """Ids used by events that the model does not declare."""
        diags: list[Diagnostic] = []
        if self.model_id is not None and model.id is not None and self.model_id != model.id:
            diags.append(error(f"trace references model {self.model_id}, but the model is {model.id}"))
        actors = {a.id for a in model.actors}
        resources = {r.id for r in model.resources}
        for e in self.events:
            for who in (e.subject, e.counterparty):
                if who is not None and who not in actors:
                    diags.append(error(f"event {e.seq}: undeclared actor {who}", e.span))
            if e.object not in resources:
                diags.append(error(f"event {e.seq}: undeclared resource {e.object}", e.span))
        return diags


def parse_trace(text: str | bytes) -> Trace:
    lines, diags = tokenize(text)
    body = split_version(lines, diags) if not diags else []
    model_id: str | None = None
    events: list[Event] = []
    last_seq = 0
    for line in body:
        head = line.head
        rec = split_record(line, diags)
        if head.value == "model" and not head.quoted:
            if len(rec.positional) != 1 or rec.attrs:
                diags.append(error("bad arity: expected 'model <id>'", head.span))
            elif check_ident(rec.positional[0], "model id", diags):
                if model_id is not None or events:
                    diags.append(error("model line must appear once, before events", head.span))
                model_id = rec.positional[0].value
            continue
        if head.quoted or not _SEQ_RE.match(head.value) or int(head.value) < 1:
            diags.append(error(f"expected a positive sequence number, got {head.value!r}", head.span))
            continue
        seq = int(head.value)
        if seq <= last_seq:
            diags.append(error("non-monotone sequence", head.span))
            continue
        last_seq = seq
        if not rec.positional:
            diags.append(error("bad arity: expected '<seq> <kind> <subject> [<counterparty>] <object>'", head.span))
            continue
        kind_tok, args = rec.positional[0], rec.positional[1:]
        if kind_tok.quoted or kind_tok.value not in EVENT_KINDS:
            diags.append(error(f"unknown event kind {kind_tok.value}", kind_tok.span))
            continue
        if len(args) not in (2, 3):
            tok = args[3] if len(args) > 3 else kind_tok
            diags.append(error("bad arity: expected '<seq> <kind> <subject> [<counterparty>] <object>'", tok.span))
            continue
        if not all(check_ident(t, "id", diags) for t in args):
            continue
        subject, obj = args[0].value, args[-1].value
        counterparty = args[1].value if len(args) == 3 else None
        missing = [k for k in REQUIRED_ATTRS.get(kind_tok.value, ()) if k not in rec.attrs]
        if missing:
            diags.append(error(f"{kind_tok.value} requires {missing[0]}=", kind_tok.span))
            continue
        attrs = tuple((k, v) for k, (v, _) in rec.attrs.items())
        events.append(Event(seq, kind_tok.value, subject, obj, counterparty, attrs, head.span))
    if any(d.is_error for d in diags):
        raise ParseError(diags)
    return Trace(tuple(events), model_id)


def render_trace(trace: Trace) -> str:
    out = ["version 1"]
    if trace.model_id is not None:
        out.append(f"model {trace.model_id}")
    out.extend(e.render() for e in trace.events)
    return "\n".join(out) + "\n"
