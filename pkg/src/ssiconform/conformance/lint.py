"""Requirement-statement linter.

Each validation criterion is approximated by a mechanical test over the
statement text and catalog metadata. The word lists below are the defaults;
callers can pass a :class:`LintConfig` to replace them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..catalog import Catalog, FrEntry, RequirementSet, natural_key
from ..model import ROLE_LETTERS
from .templates import NONCONFORMING, T1, split_statement

STATEMENT_CRITERIA = ("atomic", "unique", "feasible", "legal", "clear", "precise", "verifiable", "abstract")
SET_CRITERIA = ("complete", "consistent", "non-redundant", "modular", "structured", "satisfied", "qualified")

ERROR = "error"
WARNING = "warning"

PROCESS_VERBS = frozenset({
    "present", "request", "consent", "withdraw", "share", "store", "export", "import",
    "retrieve", "generate", "verify", "issue", "revoke", "inform", "collect", "obtain",
    "use", "give", "hold", "register", "keep", "support", "recover", "provide",
})

# main verb -> trace event kind that makes the statement observable
OBSERVABLE_VERBS = {
    "inform": "inform",
    "consent": "consent.grant",
    "obtain": "consent.grant",
    "collect": "consent.grant",
    "give": "consent.grant",
    "withdraw": "consent.withdraw",
    "present": "present",
    "share": "present",
    "request": "request",
    "issue": "issue",
    "verify": "verify",
    "revoke": "revoke",
    "store": "store",
    "retrieve": "retrieve",
    "export": "export",
    "import": "import",
    "generate": "proof.generate",
    "hold": "store",
}

# words that start the "how/when" tail of a clause; coordination after them
# qualifies the means rather than adding a second action
MEANS_WORDS = ("through", "via", "using", "by", "before", "after", "upon", "when", "including", "such as", "(e.g.")
COMPARATIVES = ("or lower", "or higher", "or more", "or less", "or fewer", "or greater")

VAGUE_TERMS = ("appropriate", "user-friendly", "etc.", "adequate", "sufficient", "reasonable", "if possible", "as needed", "easy")
IMPLEMENTATION_TERMS = (
    "blockchain", "database", "SQL", "JSON", "API", "REST", "ledger", "smart contract",
    "Ethereum", "Hyperledger", "QR", "Bluetooth", "NFC",
)
MAX_WORDS = 40


@dataclass(frozen=True)
class LintConfig:
    vague_terms: tuple[str, ...] = VAGUE_TERMS
    implementation_terms: tuple[str, ...] = IMPLEMENTATION_TERMS
    max_words: int = MAX_WORDS
    process_verbs: frozenset[str] = PROCESS_VERBS
    observable_verbs: dict[str, str] = field(default_factory=lambda: dict(OBSERVABLE_VERBS))


DEFAULT_CONFIG = LintConfig()


@dataclass(frozen=True)
class LintFinding:
    target: str
    criterion: str
    passed: bool
    detail: str
    severity: str = ERROR

    @property
    def is_problem(self) -> bool:
        return not self.passed


def normalize(text: str) -> str:
    return " ".join(re.findall(r"[a-z0-9]+", text.lower()))


def _words(text: str) -> list[str]:
    return re.findall(r"[A-Za-z0-9'()-]+", text)


def _contains_term(text: str, term: str) -> bool:
    # acronyms match case-sensitively so "rest" or "api" inside prose do not trip
    flags = 0 if term.isupper() else re.I
    return re.search(rf"(?<![\w-]){re.escape(term)}(?![\w-])", text, flags) is not None


def _head_of_action(clause: str) -> str:
    """The action clause up to the first means/time word."""
    lowered = clause.lower()
    cut = len(clause)
    for word in MEANS_WORDS:
        m = re.search(rf"(?<![\w]){re.escape(word)}(?![\w])" if word[0].isalpha() else re.escape(word), lowered)
        if m:
            cut = min(cut, m.start())
    return clause[:cut]


def _main_verb(clause: str) -> str:
    words = re.findall(r"[a-z]+", clause.lower())
    return words[0] if words else ""


def _atomic(template: str, clause: str, config: LintConfig) -> tuple[bool, str]:
    head = _head_of_action(clause).lower()
    for m in re.finditer(r"(?:\b(?:and|or)\b|,)\s*(?:\b(?:and|or)\b\s*)?([a-z]+)", head):
        if m.group(1) in config.process_verbs:
            return False, f"second process verb '{m.group(1)}' joined into the action"
    if template == T1:
        stripped = head
        for phrase in COMPARATIVES:
            stripped = stripped.replace(phrase, "")
        if re.search(r"\bor\b", stripped):
            return False, "action applies to alternatives joined by 'or'"
    return True, "single action"


def lint_statement(fr: FrEntry, catalog: Catalog, config: LintConfig = DEFAULT_CONFIG) -> list[LintFinding]:
    template, _, clause = split_statement(fr.statement)
    out: list[LintFinding] = []

    def add(criterion: str, passed: bool, detail: str) -> None:
        out.append(LintFinding(fr.key, criterion, passed, detail))

    if template == NONCONFORMING:
        add("atomic", False, "no action clause: statement does not follow a template")
    else:
        add("atomic", *_atomic(template, clause, config))

    other = catalog.fr(fr.key)
    if other is not None and normalize(other.statement) != normalize(fr.statement):
        add("unique", False, f"key {fr.key} already names a different catalog statement")
    else:
        add("unique", True, f"key {fr.key} identifies one statement")

    for name in ("feasible", "legal"):
        value = getattr(fr, name)
        if value is None:
            add(name, True, "not asserted by metadata; assumed")
        elif value:
            add(name, True, "asserted by metadata")
        else:
            add(name, False, "denied by metadata")

    if template == NONCONFORMING:
        add("clear", False, "statement matches no activity template")
    else:
        add("clear", True, f"follows template {template}")

    count = len(_words(fr.statement))
    vague = [t for t in config.vague_terms if _contains_term(fr.statement, t)]
    if count > config.max_words:
        add("precise", False, f"{count} words, limit {config.max_words}")
    elif vague:
        add("precise", False, "vague term: " + ", ".join(vague))
    else:
        add("precise", True, f"{count} words, no vague terms")

    verb = _main_verb(clause)
    texts = [fr.statement] + [c.text for c in fr.conditions]
    if verb in config.observable_verbs:
        add("verifiable", True, f"'{verb}' is observed as {config.observable_verbs[verb]} events")
    elif any(re.search(r"\d", t) for t in texts):
        add("verifiable", True, "states a measurable threshold")
    else:
        add("verifiable", False, f"no observable event or threshold for '{verb or fr.statement}'")

    found = [t for t in config.implementation_terms if _contains_term(fr.statement, t)]
    if found:
        add("abstract", False, "names an implementation: " + ", ".join(found))
    else:
        add("abstract", True, "no implementation terms")
    return out


def _polarity_key(fr: FrEntry, config: LintConfig) -> tuple[tuple[str, str, str], bool] | None:
    template, whom, clause = split_statement(fr.statement)
    if template == NONCONFORMING:
        return None
    text = " ".join(fr.statement.split()).lower()
    negated = re.match(r"the system (?:shall|should|will|may) (?:not|never)\b", text) is not None
    kind = config.observable_verbs.get(_main_verb(clause))
    if kind is None:
        return None
    actor = fr.owner
    if actor is None and whom:
        letters = [w for w in re.findall(r"[a-z]+", whom.lower()) if w in ROLE_LETTERS]
        actor = letters[0] if letters else whom
    lowered = clause.lower()
    obj = "personal data" if "personal data" in lowered else "credential" if "credential" in lowered else "*"
    return (kind, actor or "*", obj), negated


def lint_set(reqs: RequirementSet, catalog: Catalog, config: LintConfig = DEFAULT_CONFIG) -> list[LintFinding]:
    out: list[LintFinding] = []
    frs = list(reqs)

    # every non-constraint NFR should be operationalized by some FR
    linked = {n for fr in frs for n in fr.nfr_links}
    for nfr in catalog.nfrs:
        if nfr.is_constraint:
            continue
        if nfr.key in linked:
            out.append(LintFinding(nfr.key, "complete", True, f"{nfr.key} ({nfr.name}) has linked FR"))
        else:
            out.append(LintFinding(nfr.key, "complete", False, f"{nfr.key} ({nfr.name}) has no linked FR", WARNING))

    seen: dict[tuple[str, str, str], tuple[bool, str]] = {}
    conflicts = []
    for fr in frs:
        key = _polarity_key(fr, config)
        if key is None:
            continue
        tup, negated = key
        if tup in seen and seen[tup][0] != negated:
            conflicts.append((seen[tup][1], fr.key, tup))
        seen.setdefault(tup, (negated, fr.key))
    for first, second, tup in conflicts:
        out.append(LintFinding(f"{first},{second}", "consistent", False,
                               f"{first} and {second} mandate and forbid {tup[0]} by {tup[1]} on {tup[2]}"))
    if not conflicts:
        out.append(LintFinding("set", "consistent", True, "no statement forbids what another mandates"))

    by_text: dict[str, list[str]] = {}
    for fr in frs:
        by_text.setdefault(normalize(fr.statement), []).append(fr.key)
    dupes = [keys for keys in by_text.values() if len(keys) > 1]
    for keys in dupes:
        out.append(LintFinding(",".join(keys), "non-redundant", False, "same statement under " + " and ".join(keys)))
    if not dupes:
        out.append(LintFinding("set", "non-redundant", True, "every statement is expressed once"))

    ordered = sorted(frs, key=lambda f: natural_key(f.key))
    scattered = []
    for nfr in sorted(linked, key=natural_key):
        positions = [i for i, fr in enumerate(ordered) if nfr in fr.nfr_links]
        if positions and positions[-1] - positions[0] + 1 != len(positions):
            scattered.append(nfr)
            out.append(LintFinding(nfr, "modular", False, f"FR linked to {nfr} are not adjacent in key order", WARNING))
    if not scattered:
        out.append(LintFinding("set", "modular", True, f"FR sharing an NFR are adjacent ({len(ordered)} FR)"))

    unstructured = 0
    for fr in frs:
        template = split_statement(fr.statement)[0]
        if template == NONCONFORMING:
            unstructured += 1
            out.append(LintFinding(fr.key, "structured", False, "statement matches no activity template"))
        elif template != fr.template:
            unstructured += 1
            out.append(LintFinding(fr.key, "structured", False, f"declared {fr.template} but reads as {template}"))
        else:
            out.append(LintFinding(fr.key, "structured", True, f"reads as declared {template}"))
    out.append(LintFinding("set", "structured", unstructured == 0,
                           f"{len(frs) - unstructured} of {len(frs)} statements follow their template"))

    set_keys = {fr.key for fr in frs}
    dangling = []
    for fr in frs:
        for link in fr.nfr_links:
            if catalog.nfr(link) is None:
                dangling.append(f"{fr.key}->{link}")
        if fr.trace_of is not None and fr.trace_of not in set_keys and catalog.fr(fr.trace_of) is None:
            dangling.append(f"{fr.key}->{fr.trace_of}")
        if not fr.nfr_links:
            dangling.append(f"{fr.key}->(none)")
    if dangling:
        out.append(LintFinding("set", "satisfied", False, "unresolved links: " + ", ".join(dangling)))
    else:
        out.append(LintFinding("set", "satisfied", True, "every FR traces to a catalog NFR"))

    unqualified = []
    for key in sorted(linked, key=natural_key):
        nfr = catalog.nfr(key)
        if nfr is None:
            continue
        if not nfr.capabilities or any(catalog.capability(n) is None for n in nfr.capabilities):
            unqualified.append(key)
    if unqualified:
        out.append(LintFinding("set", "qualified", False, "no capability links for " + ", ".join(unqualified)))
    else:
        out.append(LintFinding("set", "qualified", True, "every linked NFR traces to actor capabilities"))
    return out


def lint_requirements(reqs: RequirementSet, catalog: Catalog, strict: bool = False,
                      config: LintConfig = DEFAULT_CONFIG) -> list[LintFinding]:
    """Statement findings for every FR followed by the set findings."""
    findings = [f for fr in reqs for f in lint_statement(fr, catalog, config)]
    findings += lint_set(reqs, catalog, config)
    if strict:
        findings = [LintFinding(f.target, f.criterion, f.passed, f.detail, ERROR) for f in findings]
    return findings


def has_errors(findings: list[LintFinding]) -> bool:
    return any(not f.passed and f.severity == ERROR for f in findings)
