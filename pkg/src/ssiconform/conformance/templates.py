"""Classify requirement statements by system-activity template."""

from __future__ import annotations

import re

T1 = "T1"
T2 = "T2"
T3 = "T3"
NONCONFORMING = "nonconforming"

MODALS = ("shall", "should", "will", "may")
_MODAL = r"(?:" + "|".join(MODALS) + r")(?:\s+(?:not|never))?"
_T2 = re.compile(rf"the\s+system\s+{_MODAL}\s+provide\s+(?P<whom>.+?)\s+with\s+the\s+ability\s+to\s+(?P<clause>\S.*)", re.I | re.S)
_T3 = re.compile(rf"the\s+system\s+{_MODAL}\s+be\s+able\s+to\s+(?P<clause>\S.*)", re.I | re.S)
_T1 = re.compile(rf"the\s+system\s+{_MODAL}\s+(?P<clause>[A-Za-z].*)", re.I | re.S)


def _normalize(statement: str) -> str:
    return " ".join(statement.split())


def split_statement(statement: str) -> tuple[str, str | None, str]:
    """Return ``(template, whom, action clause)``; the clause is empty when nonconforming."""
    text = _normalize(statement)
    for template, pattern in ((T2, _T2), (T3, _T3), (T1, _T1)):
        m = pattern.fullmatch(text)
        if m:
            whom = m.group("whom") if template == T2 else None
            return template, whom, m.group("clause")
    return NONCONFORMING, None, ""


def template_classify(statement: str) -> str:
    return split_statement(statement)[0]
