"""Knowledge base of NFR, actor capabilities, FR and their conditions.

The built-in catalog ships as ``data/builtin.direq`` and is parsed with the
same reader user documents go through, so the file format and the shipped
content cannot drift apart.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib.resources import files
from typing import Iterable, Iterator, Union

CAPABILITY_BEARING = "capability-bearing"
CONSTRAINT = "constraint"
NFR_KINDS = (CAPABILITY_BEARING, CONSTRAINT)

CAPABILITY_ACTORS = ("data-owner", "verifier", "issuer", "system", "wallet")
CAPABILITY_BOILERPLATE = "shall be able to"
TEMPLATES = ("T1", "T2", "T3")

BUILTIN = "builtin"


def natural_key(key: str) -> tuple:
    """Sort ``FR6.10`` after ``FR6.9`` and ``FR33a`` after ``FR33``."""
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in re.split(r"(\d+)", key) if p)


@dataclass(frozen=True)
class NfrEntry:
    key: str
    name: str
    description: str
    kind: str
    capabilities: tuple[int, ...] = ()

    @property
    def is_constraint(self) -> bool:
        return self.kind == CONSTRAINT


@dataclass(frozen=True)
class CapabilityEntry:
    number: int
    actor: str
    text: str
    alias: str | None = None

    @property
    def normalized(self) -> str:
        return self.alias if self.alias is not None else self.text

    @property
    def capability(self) -> str:
        """The text after the boilerplate, e.g. ``present a credential for verification``."""
        return self.normalized[len(CAPABILITY_BOILERPLATE):].strip()


@dataclass(frozen=True)
class ConditionEntry:
    key: str
    text: str
    fr_key: str


@dataclass(frozen=True)
class CheckSpec:
    """Declarative check semantics for user-supplied FR.

    Shapes: ``fact`` (relation, role[, object]), ``interface`` (resource),
    ``precedes`` (earlier kind, later kind), ``absent-after`` (trigger kind,
    forbidden kind), ``attr`` (event kind, attribute).
    """

    shape: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return ":".join((self.shape,) + self.args)


@dataclass(frozen=True)
class FrEntry:
    key: str
    statement: str
    template: str
    nfr_links: tuple[str, ...]
    conditions: tuple[ConditionEntry, ...] = ()
    legal_tags: tuple[str, ...] = ()
    trace_of: str | None = None
    constraint_links: tuple[str, ...] = ()
    owner: str | None = None
    criteria: tuple[str, ...] = ()
    feasible: bool | None = None
    legal: bool | None = None
    check: CheckSpec | None = None


class RequirementSet:
    """An ordered, immutable collection of FR entries (natural key order)."""

    def __init__(self, frs: Iterable[FrEntry] = ()):
        self._frs = tuple(sorted(frs, key=lambda f: natural_key(f.key)))
        self._by_key = {f.key: f for f in self._frs}

    def __iter__(self) -> Iterator[FrEntry]:
        return iter(self._frs)

    def __len__(self) -> int:
        return len(self._frs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RequirementSet) and self._frs == other._frs

    def __hash__(self) -> int:
        return hash(self._frs)

    def __repr__(self) -> str:
        return f"RequirementSet({[f.key for f in self._frs]})"

    @property
    def frs(self) -> tuple[FrEntry, ...]:
        return self._frs

    def keys(self) -> list[str]:
        return [f.key for f in self._frs]

    def get(self, key: str) -> FrEntry | None:
        return self._by_key.get(key)

    def select(self, keys: Iterable[str]) -> "RequirementSet":
        wanted = set(keys)
        return RequirementSet(f for f in self._frs if f.key in wanted)


@dataclass(frozen=True)
class Catalog:
    nfrs: tuple[NfrEntry, ...] = ()
    capabilities: tuple[CapabilityEntry, ...] = ()
    frs: tuple[FrEntry, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nfrs", tuple(sorted(self.nfrs, key=lambda n: natural_key(n.key))))
        object.__setattr__(self, "capabilities", tuple(sorted(self.capabilities, key=lambda c: c.number)))
        object.__setattr__(self, "frs", tuple(sorted(self.frs, key=lambda f: natural_key(f.key))))

    def nfr(self, key: str) -> NfrEntry | None:
        return next((n for n in self.nfrs if n.key == key), None)

    def capability(self, number: int) -> CapabilityEntry | None:
        return next((c for c in self.capabilities if c.number == number), None)

    def fr(self, key: str) -> FrEntry | None:
        return next((f for f in self.frs if f.key == key), None)

    def condition(self, key: str) -> ConditionEntry | None:
        for f in self.frs:
            for c in f.conditions:
                if c.key == key:
                    return c
        return None

    def superseded(self) -> set[str]:
        return {f.trace_of for f in self.frs if f.trace_of is not None}

    def requirement_set(self, include_superseded: bool = False) -> RequirementSet:
        """The current FR set; originals replaced by an updated entry are dropped."""
        gone = set() if include_superseded else self.superseded()
        return RequirementSet(f for f in self.frs if f.key not in gone)

    def original_set(self) -> RequirementSet:
        return RequirementSet(f for f in self.frs if f.key in self.superseded())


Entry = Union[NfrEntry, CapabilityEntry, FrEntry, ConditionEntry]


def lookup(catalog: Catalog, key: str | int) -> Entry | None:
    """Find an entry by key; ``None`` when absent.

    Integers (or digit strings) address capabilities; ``NFR``, ``FR`` and
    ``C`` prefixes address the other collections.
    """
    if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
        return catalog.capability(int(key))
    if key.startswith("NFR"):
        return catalog.nfr(key)
    if key.startswith("FR"):
        return catalog.fr(key)
    if key.startswith("C"):
        return catalog.condition(key)
    return None


def constraints_of(catalog: Catalog) -> set[str]:
    return {n.key for n in catalog.nfrs if n.kind == CONSTRAINT}


def builtin_text() -> str:
    return files("ssiconform").joinpath("data/builtin.direq").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def _builtin() -> Catalog:
    from .specl.reqfile import parse_catalog

    return parse_catalog(builtin_text())


def load_catalog(source: str | bytes = BUILTIN) -> Catalog:
    """Load the built-in catalog (``BUILTIN``) or parse a catalog document."""
    if isinstance(source, str) and source == BUILTIN:
        return _builtin()
    from .specl.reqfile import parse_catalog

    return parse_catalog(source)
