"""Shared tokenizer for the three line-oriented formats.

Every format uses the same surface: one record per line, whitespace-separated
tokens, ``#`` comments outside quoted strings, double-quoted strings with
``\\"`` and ``\\\\`` escapes, and ``key=value`` attribute tokens. The first
record of every file must be ``version 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")
SUPPORTED_VERSION = "1"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError(f"span must be 1-based, got {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: SourceSpan | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span is not None else ""
        return f"{where}{self.severity}: {self.message}"


class ParseError(Exception):
    """Raised when a document cannot be turned into a value.

    Carries every diagnostic gathered, not just the first one.
    """

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def error(message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic("error", message, span)


def warning(message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic("warning", message, span)


@dataclass(frozen=True)
class Token:
    value: str
    span: SourceSpan
    quoted: bool = False

    def as_attr(self) -> tuple[str, str] | None:
        """Split ``key=value``; quoted tokens are never attributes."""
        if self.quoted or "=" not in self.value:
            return None
        key, _, val = self.value.partition("=")
        if not IDENT_RE.match(key):
            return None
        return key, val


@dataclass(frozen=True)
class Line:
    number: int
    tokens: tuple[Token, ...]

    @property
    def head(self) -> Token:
        return self.tokens[0]


def _is_space(ch: str) -> bool:
    return ch.isspace()


def _lex_line(number: int, text: str, diags: list[Diagnostic]) -> tuple[Token, ...] | None:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if _is_space(ch):
            i += 1
            continue
        if ch == "#":
            break
        start = i
        parts: list[str] = []
        while i < n and not _is_space(text[i]) and text[i] != "#":
            if text[i] != '"':
                parts.append(text[i])
                i += 1
                continue
            quote_at = i
            i += 1
            closed = False
            while i < n:
                c = text[i]
                if c == "\\":
                    nxt = text[i + 1] if i + 1 < n else ""
                    if nxt in ('"', "\\"):
                        parts.append(nxt)
                        i += 2
                        continue
                    diags.append(error(
                        f"invalid escape '\\{nxt}'" if nxt else "dangling backslash",
                        SourceSpan(number, i + 1, 2 if nxt else 1),
                    ))
                    return None
                if c == '"':
                    closed = True
                    i += 1
                    break
                parts.append(c)
                i += 1
            if not closed:
                diags.append(error("unterminated string", SourceSpan(number, quote_at + 1, n - quote_at)))
                return None
        span = SourceSpan(number, start + 1, i - start)
        tokens.append(Token("".join(parts), span, quoted=text[start] == '"'))
    return tuple(tokens)


def tokenize(text: str | bytes) -> tuple[list[Line], list[Diagnostic]]:
    """Split a document into non-empty token lines.

    Accepts LF or CRLF. Bytes are decoded as UTF-8; a decode failure is
    reported as a diagnostic rather than raised.
    """
    diags: list[Diagnostic] = []
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            # Count lines up to the bad byte so the span is still useful.
            prefix = bytes(text)[: exc.start]
            line = prefix.count(b"\n") + 1
            col = len(prefix) - (prefix.rfind(b"\n") + 1) + 1
            return [], [error(f"invalid UTF-8 at byte {exc.start}", SourceSpan(line, col))]
    if text.startswith("\ufeff"):
        text = text[1:]
    lines: list[Line] = []
    for idx, raw in enumerate(text.split("\n"), start=1):
        if raw.endswith("\r"):
            raw = raw[:-1]
        toks = _lex_line(idx, raw, diags)
        if toks:
            lines.append(Line(idx, toks))
    return lines, diags


def split_version(lines: list[Line], diags: list[Diagnostic]) -> list[Line]:
    """Consume the mandatory ``version 1`` header; return the remaining lines."""
    if not lines:
        diags.append(error("missing version header", SourceSpan(1, 1)))
        return []
    first = lines[0]
    if first.head.quoted or first.head.value != "version":
        diags.append(error("missing version header", first.head.span))
        return lines
    if len(first.tokens) != 2:
        diags.append(error("version takes exactly one argument", first.head.span))
    elif first.tokens[1].value != SUPPORTED_VERSION:
        tok = first.tokens[1]
        diags.append(error(f"unsupported version {tok.value!r}", tok.span))
    return lines[1:]


def check_ident(tok: Token, what: str, diags: list[Diagnostic]) -> bool:
    if tok.quoted or not IDENT_RE.match(tok.value):
        diags.append(error(f"invalid {what} {tok.value!r}", tok.span))
        return False
    return True


def quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def split_list(value: str) -> list[str]:
    return [v for v in value.split(",") if v]


@dataclass
class Record:
    """A line split into positional tokens and attributes."""

    line: Line
    positional: list[Token]
    attrs: dict[str, tuple[str, Token]]


def split_record(line: Line, diags: list[Diagnostic]) -> Record:
    positional: list[Token] = []
    attrs: dict[str, tuple[str, Token]] = {}
    for tok in line.tokens[1:]:
        kv = tok.as_attr()
        if kv is None:
            positional.append(tok)
            continue
        key, val = kv
        if key in attrs:
            diags.append(error(f"duplicate attribute {key!r}", tok.span))
            continue
        attrs[key] = (val, tok)
    return Record(line, positional, attrs)
