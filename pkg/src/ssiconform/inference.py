"""Forward-chaining fixpoint over Horn clauses with proof extraction.

Rules are Horn clauses whose body is a conjunction of groups, each group a
disjunction of patterns. Disjunctions are expanded into conjunctive clauses
that share the rule id, so the matcher itself is purely conjunctive.

Saturation is semi-naive: round ``k`` only fires instantiations that use at
least one fact first derived in round ``k - 1``. A fact's round is therefore
the height of its shallowest derivation, which :func:`explain` relies on to
return minimal-depth proofs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .model import (
    DATA,
    EITHER,
    GLOBAL_SYSTEM,
    SERVICE,
    WALLET,
    Fact,
    FactSet,
    Universe,
)


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


class _Wildcard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "_"


ANY = _Wildcard()
Term = Union[Var, str]


@dataclass(frozen=True)
class Pattern:
    relation: str
    subject: Term
    object: Term
    # ANY matches with or without a counterparty; None requires its absence.
    counterparty: Union[Term, None, _Wildcard] = ANY
    object_sort: str = EITHER

    def variables(self) -> set[Var]:
        return {t for t in (self.subject, self.object, self.counterparty) if isinstance(t, Var)}

    def __str__(self) -> str:
        sort = "" if self.object_sort == EITHER else f":{self.object_sort}"
        return f"{self.relation}({self.subject!r}, {self.object!r}{sort})"


# -- side conditions ---------------------------------------------------------


@dataclass(frozen=True)
class Distinct:
    left: Var
    right: Var


@dataclass(frozen=True)
class KindIn:
    var: Var
    kinds: frozenset[str]


@dataclass(frozen=True)
class Requires:
    """Binds ``datum`` to the inputs declared for ``service``."""

    service: Var
    datum: Var


@dataclass(frozen=True)
class AnyActor:
    """Binds ``var`` to every declared actor."""

    var: Var


Constraint = Union[Distinct, KindIn, Requires, AnyActor]


@dataclass(frozen=True)
class Rule:
    id: str
    head: Pattern
    body: tuple[tuple[Pattern, ...], ...]
    group: str = "user"
    where: tuple[Constraint, ...] = ()
    description: str = ""


RuleSet = tuple[Rule, ...]


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Clause:
    rule_id: str
    rule_index: int
    branch: int
    head: Pattern
    body: tuple[Pattern, ...]
    where: tuple[Constraint, ...]


def compile_rules(rules: Iterable[Rule]) -> tuple[Clause, ...]:
    """Expand disjunctions and check that every head variable gets bound."""
    clauses: list[Clause] = []
    for index, rule in enumerate(rules):
        if not rule.body or any(not group for group in rule.body):
            raise RuleError(f"rule {rule.id}: body must be non-empty")
        for branch, combo in enumerate(itertools.product(*rule.body)):
            bound: set[Var] = set()
            for pat in combo:
                bound |= pat.variables()
            for c in rule.where:
                if isinstance(c, AnyActor):
                    bound.add(c.var)
                elif isinstance(c, Requires):
                    if c.service not in bound:
                        raise RuleError(f"rule {rule.id}: requires() needs {c.service!r} bound")
                    bound.add(c.datum)
            for c in rule.where:
                needed = {c.left, c.right} if isinstance(c, Distinct) else (
                    {c.var} if isinstance(c, KindIn) else set())
                if not needed <= bound:
                    raise RuleError(f"rule {rule.id}: constraint uses unbound variable")
            free = rule.head.variables() - bound
            if free:
                names = ", ".join(sorted(repr(v) for v in free))
                raise RuleError(f"rule {rule.id}: head variable {names} is unbound")
            if isinstance(rule.head.counterparty, _Wildcard):
                raise RuleError(f"rule {rule.id}: head counterparty cannot be a wildcard")
            clauses.append(Clause(rule.id, index, branch, rule.head, tuple(combo), rule.where))
    return tuple(clauses)


def default_axioms() -> RuleSet:
    """The seven functional-model axioms.

    Ax6 ranges its retrieving actor over every declared actor other than the
    storer, and requires the serving actor to be a global system or wallet.
    Ax7 binds the fulfilling actor through ``has``/``offers`` and the datum
    through the service's declared inputs.
    """
    a, b, c, x, d, s = (Var(n) for n in "abcxds")
    return (
        Rule("Ax1", Pattern("has", a, x, None),
             ((Pattern("owns", a, x),),), "o",
             description="If an actor owns a service or data, they have it."),
        Rule("Ax2", Pattern("presents", a, d, None),
             ((Pattern("has", a, d, object_sort=DATA),),), "e",
             description="If an actor has data, they present it."),
        Rule("Ax3", Pattern("fulfills", a, s, None),
             ((Pattern("has", a, s, object_sort=SERVICE),), (Pattern("offers", a, s, object_sort=SERVICE),)), "r",
             description="If an actor has and offers a service, they fulfill it."),
        Rule("Ax4", Pattern("stores", a, d, None),
             ((Pattern("has", a, d, object_sort=DATA),),), "e",
             description="If an actor has data, they store it."),
        Rule("Ax5", Pattern("retrieves", a, d, None),
             ((Pattern("stores", a, d, object_sort=DATA),),), "e",
             description="If an actor stores data, they retrieve it."),
        Rule("Ax6", Pattern("retrieves", a, d, None),
             ((Pattern("stores", b, d, object_sort=DATA),),
              (Pattern("has", c, d, object_sort=DATA),),
              (Pattern("offers", c, d, object_sort=DATA),)), "e",
             where=(KindIn(c, frozenset({GLOBAL_SYSTEM, WALLET})), AnyActor(a), Distinct(a, b)),
             description="If b stores data and a system c has and offers it, a retrieves it."),
        Rule("Ax7", Pattern("fulfills", a, s, None),
             ((Pattern("presents", b, d, object_sort=DATA), Pattern("retrieves", a, d, object_sort=DATA)),
              (Pattern("requests", b, s, object_sort=SERVICE),),
              (Pattern("has", a, s, object_sort=SERVICE),),
              (Pattern("offers", a, s, object_sort=SERVICE),)), "r",
             where=(Requires(s, d),),
             description="If b presents or a retrieves data and b requests a service, a fulfills it."),
    )


# -- matching ----------------------------------------------------------------

Binding = Mapping[Var, str]


def _unify(term, value: str | None, binding: dict[Var, str]) -> bool:
    if isinstance(term, Var):
        if value is None:
            return False
        bound = binding.get(term)
        if bound is None:
            binding[term] = value
            return True
        return bound == value
    return term == value


def match(pattern: Pattern, fact: Fact, binding: Binding, universe: Universe) -> dict[Var, str] | None:
    if pattern.relation != fact.relation:
        return None
    if pattern.object_sort != EITHER and universe.sort_of(fact.object) != pattern.object_sort:
        return None
    out = dict(binding)
    if not _unify(pattern.subject, fact.subject, out):
        return None
    if not _unify(pattern.object, fact.object, out):
        return None
    cp = pattern.counterparty
    if cp is None:
        if fact.counterparty is not None:
            return None
    elif not isinstance(cp, _Wildcard) and not _unify(cp, fact.counterparty, out):
        return None
    return out


def _resolve(term, binding: Binding):
    return binding[term] if isinstance(term, Var) else term


def instantiate(pattern: Pattern, binding: Binding) -> Fact:
    cp = pattern.counterparty
    return Fact(
        pattern.relation,
        _resolve(pattern.subject, binding),
        _resolve(pattern.object, binding),
        None if cp is None else _resolve(cp, binding),
    )


def _apply_where(where: Sequence[Constraint], binding: dict[Var, str], universe: Universe) -> Iterator[dict[Var, str]]:
    """Extend a body binding through binders, then filter."""
    partial = [binding]
    for c in where:
        if isinstance(c, AnyActor):
            nxt = []
            for bnd in partial:
                if c.var in bnd:
                    if bnd[c.var] in universe.actors:
                        nxt.append(bnd)
                else:
                    nxt.extend({**bnd, c.var: actor} for actor in sorted(universe.actors))
            partial = nxt
        elif isinstance(c, Requires):
            nxt = []
            for bnd in partial:
                inputs = universe.requires.get(bnd[c.service], frozenset())
                if c.datum in bnd:
                    if bnd[c.datum] in inputs:
                        nxt.append(bnd)
                else:
                    nxt.extend({**bnd, c.datum: datum} for datum in sorted(inputs))
            partial = nxt
    for bnd in partial:
        ok = True
        for c in where:
            if isinstance(c, Distinct) and bnd[c.left] == bnd[c.right]:
                ok = False
            elif isinstance(c, KindIn) and universe.kind_of(bnd[c.var]) not in c.kinds:
                ok = False
        if ok:
            yield bnd


class _Index:
    def __init__(self, facts: Iterable[Fact] = ()):
        self.by_relation: dict[str, list[Fact]] = {}
        for f in facts:
            self.add(f)

    def add(self, fact: Fact) -> None:
        self.by_relation.setdefault(fact.relation, []).append(fact)

    def get(self, relation: str) -> list[Fact]:
        return self.by_relation.get(relation, [])


def _join(body: Sequence[Pattern], sources: Sequence[_Index], binding: dict[Var, str],
          universe: Universe, chosen: tuple[Fact, ...] = ()) -> Iterator[tuple[dict[Var, str], tuple[Fact, ...]]]:
    if not body:
        yield binding, chosen
        return
    pat, rest = body[0], body[1:]
    for fact in sources[0].get(pat.relation):
        nxt = match(pat, fact, binding, universe)
        if nxt is not None:
            yield from _join(rest, sources[1:], nxt, universe, chosen + (fact,))


def _fire(clause: Clause, sources: Sequence[_Index], universe: Universe,
          seed: dict[Var, str] | None = None) -> Iterator[tuple[Fact, tuple[Fact, ...]]]:
    for binding, children in _join(clause.body, sources, dict(seed or {}), universe):
        for full in _apply_where(clause.where, binding, universe):
            yield instantiate(clause.head, full), children


@dataclass(frozen=True)
class _Derivation:
    levels: Mapping[Fact, int]
    clauses: tuple[Clause, ...]


def _as_factset(base: FactSet | Iterable[Fact], universe: Universe | None) -> FactSet:
    if isinstance(base, FactSet):
        return base
    return FactSet(frozenset(base), universe or Universe())


def saturate(base: FactSet, rules: Iterable[Rule] | None = None) -> FactSet:
    """Least fixpoint of ``base`` under ``rules`` (default: the seven axioms)."""
    base = _as_factset(base, None)
    clauses = compile_rules(default_axioms() if rules is None else rules)
    universe = base.universe
    levels: dict[Fact, int] = {f: 0 for f in base.facts}
    total = _Index(base.facts)
    delta = _Index(base.facts)
    round_no = 0
    while delta.by_relation:
        round_no += 1
        new: list[Fact] = []
        fresh: set[Fact] = set()
        for clause in clauses:
            for i, pat in enumerate(clause.body):
                if not delta.get(pat.relation):
                    continue
                sources = [delta if j == i else total for j in range(len(clause.body))]
                for head, _ in _fire(clause, sources, universe):
                    if head not in levels and head not in fresh:
                        fresh.add(head)
                        new.append(head)
        delta = _Index()
        for f in new:
            levels[f] = round_no
            total.add(f)
            delta.add(f)
    return FactSet(frozenset(levels), universe, _Derivation(levels, clauses))


@dataclass(frozen=True)
class ProofTree:
    root: Fact
    rule: str
    children: tuple["ProofTree", ...] = ()

    @property
    def depth(self) -> int:
        return 0 if not self.children else 1 + max(c.depth for c in self.children)

    def leaves(self) -> list[Fact]:
        if not self.children:
            return [self.root]
        return [leaf for c in self.children for leaf in c.leaves()]

    def lines(self, indent: int = 0) -> list[str]:
        out = [f"{'  ' * indent}{self.root}  [{self.rule}]"]
        for c in self.children:
            out.extend(c.lines(indent + 1))
        return out

    def render(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def to_dict(self) -> dict:
        return {
            "fact": str(self.root),
            "rule": self.rule,
            "children": [c.to_dict() for c in self.children],
        }


def explain(goal: Fact, saturated: FactSet) -> ProofTree | None:
    """Minimal-depth proof of ``goal`` from a set produced by :func:`saturate`."""
    deriv = saturated.derivation
    if not isinstance(deriv, _Derivation):
        raise ValueError("explain() needs a fact set returned by saturate()")
    if goal not in deriv.levels:
        return None
    universe = saturated.universe
    memo: dict[Fact, ProofTree] = {}

    def build(fact: Fact) -> ProofTree:
        if fact in memo:
            return memo[fact]
        level = deriv.levels[fact]
        if level == 0:
            tree = ProofTree(fact, "base")
        else:
            below = _Index(f for f, lv in deriv.levels.items() if lv < level)
            best = None
            for clause in deriv.clauses:
                seed: dict[Var, str] = {}
                if not _seed_head(clause.head, fact, seed):
                    continue
                for head, children in _fire(clause, [below] * len(clause.body), universe, seed):
                    if head != fact:
                        continue
                    key = (clause.rule_index, clause.branch, tuple(c.sort_key() for c in children))
                    if best is None or key < best[0]:
                        best = (key, clause, children)
                if best is not None:
                    # earlier clauses win outright; later ones cannot beat the rule order
                    break
            assert best is not None, f"no derivation found for {fact}"
            _, clause, children = best
            tree = ProofTree(fact, clause.rule_id, tuple(build(c) for c in children))
        memo[fact] = tree
        return tree

    return build(goal)


def _seed_head(head: Pattern, fact: Fact, seed: dict[Var, str]) -> bool:
    if head.relation != fact.relation:
        return False
    if not _unify(head.subject, fact.subject, seed) or not _unify(head.object, fact.object, seed):
        return False
    if head.counterparty is None:
        return fact.counterparty is None
    return _unify(head.counterparty, fact.counterparty, seed)


def derive(goal: Fact, base: FactSet, rules: Iterable[Rule] | None = None) -> ProofTree | None:
    return explain(goal, saturate(base, rules))


def replay(tree: ProofTree, rules: Iterable[Rule] | None, universe: Universe,
           base: FactSet | None = None) -> bool:
    """Re-execute a proof bottom-up; true iff every step derives its node."""
    clauses = compile_rules(default_axioms() if rules is None else rules)

    def check(node: ProofTree) -> bool:
        if node.rule == "base":
            return not node.children and (base is None or node.root in base)
        if not all(check(c) for c in node.children):
            return False
        facts = tuple(c.root for c in node.children)
        for clause in clauses:
            if clause.rule_id != node.rule or len(clause.body) != len(facts):
                continue
            sources = [_Index([f]) for f in facts]
            for head, _ in _fire(clause, sources, universe):
                if head == node.root:
                    return True
        return False

    return check(tree)


def query(facts: FactSet, pattern: Pattern) -> list[Fact]:
    universe = facts.universe
    return sorted(f for f in facts.facts if match(pattern, f, {}, universe) is not None)


def derived_only(saturated: FactSet, base: FactSet) -> list[Fact]:
    return sorted(saturated.facts - base.facts)
