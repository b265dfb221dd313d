"""Command-line interface.

Exit codes: 0 clean, 1 findings or violations, 2 usage, input or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import Catalog, RequirementSet, load_catalog
from .conformance.checks import VIOLATED, check_traces
from .conformance.coverage import coverage_matrix
from .conformance.lint import has_errors, lint_requirements
from .conformance.report import (
    build_report,
    lint_human,
    lint_machine,
    report_human,
    report_machine,
    verdicts_human,
    verdicts_machine,
)
from .inference import explain, saturate
from .model import RELATIONS, Fact, ModelError, SystemModel, base_facts, build_model, validate_model
from .simulator import VIOLATION_KINDS, InjectionError, ScenarioError, inject_violation, run_scenario, scenario_ids
from .specl.lexer import Diagnostic, ParseError, tokenize
from .specl.modelfile import parse_model
from .specl.reqfile import resolve_requirements
from .specl.tracefile import Trace, parse_trace, render_trace

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


class InputError(Exception):
    """Bad input: reported on stderr, exit status 2."""

    def __init__(self, message: str, diagnostics: list[Diagnostic] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _diag_lines(path: str, diags: list[Diagnostic]) -> list[str]:
    return [f"{path}:{d}" for d in diags]


def _load_model(path: str) -> SystemModel:
    try:
        model = build_model(parse_model(_read(path)))
    except (ParseError, ModelError) as exc:
        raise InputError(f"{path}: invalid model", exc.diagnostics) from exc
    errors = [d for d in validate_model(model) if d.is_error]
    if errors:
        raise InputError(f"{path}: invalid model", errors)
    return model


def _load_trace(path: str, model: SystemModel) -> Trace:
    try:
        trace = parse_trace(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: invalid trace", exc.diagnostics) from exc
    problems = trace.unresolved(model)
    if problems:
        raise InputError(f"{path}: trace does not match the model", problems)
    return trace


def _load_requirements(path: str | None) -> tuple[Catalog, RequirementSet]:
    if path is None:
        catalog = load_catalog()
        return catalog, catalog.requirement_set()
    try:
        return resolve_requirements(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: invalid requirements", exc.diagnostics) from exc


def _reqs_path(args: argparse.Namespace) -> str | None:
    if args.builtin and args.reqs:
        raise InputError("give either a requirements file or --builtin, not both")
    return args.reqs


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def parse_goal(text: str, model: SystemModel) -> Fact:
    """``relation subject object [to=actor]`` checked against the model's ids."""
    lines, diags = tokenize(text)
    if diags or len(lines) != 1:
        raise InputError(f"malformed goal {text!r}")
    toks = [t.value for t in lines[0].tokens]
    counterparty = None
    if toks and toks[-1].startswith("to="):
        counterparty = toks.pop()[3:]
    if len(toks) != 3 or toks[0] not in RELATIONS:
        raise InputError(f"malformed goal {text!r}: expected '<relation> <subject> <object> [to=<actor>]'")
    relation, subject, obj = toks
    for actor in (subject, counterparty):
        if actor is not None and model.actor(actor) is None:
            raise InputError(f"goal names undeclared actor {actor}")
    if model.resource(obj) is None:
        raise InputError(f"goal names undeclared resource {obj}")
    return Fact(relation, subject, obj, counterparty)


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        model = build_model(parse_model(_read(args.model)))
    except ParseError as exc:
        raise InputError(f"{args.model}: cannot parse", exc.diagnostics) from exc
    except ModelError as exc:
        for line in _diag_lines(args.model, exc.diagnostics):
            print(line, file=sys.stderr)
        return EXIT_FINDINGS
    diags = validate_model(model)
    for line in _diag_lines(args.model, diags):
        print(line, file=sys.stderr)
    errors = sum(1 for d in diags if d.is_error)
    if args.format == "machine":
        _emit(args, json.dumps({"model": model.id, "errors": errors,
                                "diagnostics": [str(d) for d in diags]}) + "\n")
    else:
        _emit(args, f"{args.model}: {'valid' if not errors else f'{errors} error(s)'}\n")
    return EXIT_FINDINGS if errors else EXIT_OK


def cmd_infer(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    base = base_facts(model)
    saturated = saturate(base)
    if args.goal is None:
        derived = sorted(saturated.facts - base.facts)
        levels = saturated.derivation.levels
        if args.format == "machine":
            _emit(args, "".join(json.dumps({"fact": str(f), "round": levels[f]}) + "\n" for f in derived))
        else:
            _emit(args, "".join(f"{f}\n" for f in derived))
        return EXIT_OK
    goal = parse_goal(args.goal, model)
    tree = explain(goal, saturated)
    if tree is None:
        _emit(args, f"{goal}: not derivable\n")
        return EXIT_FINDINGS
    if args.format == "machine":
        _emit(args, json.dumps(tree.to_dict()) + "\n")
    else:
        _emit(args, tree.render())
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    try:
        trace = run_scenario(model, args.scenario, args.seed)
        if args.inject:
            trace = inject_violation(trace, args.inject)
    except (ScenarioError, InjectionError) as exc:
        raise InputError(str(exc)) from exc
    _emit(args, render_trace(trace))
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    reqs_path = _reqs_path(args)
    model = _load_model(args.model)
    trace = _load_trace(args.trace, model)
    _, reqs = _load_requirements(reqs_path)
    verdicts = check_traces(reqs, model, saturate(base_facts(model)), [trace])
    text = verdicts_machine(verdicts) if args.format == "machine" else verdicts_human(verdicts)
    _emit(args, text)
    return EXIT_FINDINGS if any(v.status == VIOLATED for v in verdicts) else EXIT_OK


def cmd_lint(args: argparse.Namespace) -> int:
    if args.builtin == bool(args.reqs):
        raise InputError("give a requirements file or --builtin")
    catalog, reqs = _load_requirements(args.reqs)
    findings = lint_requirements(reqs, catalog, strict=args.strict)
    _emit(args, lint_machine(findings) if args.format == "machine" else lint_human(findings))
    return EXIT_FINDINGS if has_errors(findings) else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    reqs_path = _reqs_path(args)
    model = _load_model(args.model)
    traces = [_load_trace(p, model) for p in args.traces]
    catalog, reqs = _load_requirements(reqs_path)
    verdicts = check_traces(reqs, model, saturate(base_facts(model)), traces)
    matrix = coverage_matrix(reqs, catalog)
    findings = lint_requirements(reqs, catalog)
    report = build_report(model.id, len(traces), verdicts, reqs, catalog, matrix, findings, args.timestamps)
    if args.format == "machine":
        _emit(args, report_machine(report))
    else:
        _emit(args, report_human(report, verdicts, matrix))
    failed = any(v.status == VIOLATED for v in verdicts) or has_errors(findings)
    return EXIT_FINDINGS if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssiconform", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("infer", parents=[common], help="saturate a model or prove one fact")
    p.add_argument("model")
    p.add_argument("--goal", help='fact to prove, e.g. "has o credential"')
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("simulate", parents=[common], help="emit a scenario trace")
    p.add_argument("model")
    p.add_argument("--scenario", required=True, choices=scenario_ids())
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--inject", choices=VIOLATION_KINDS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", parents=[common], help="check FR against a model and trace")
    p.add_argument("model")
    p.add_argument("trace")
    p.add_argument("reqs", nargs="?")
    p.add_argument("--builtin", action="store_true", help="use the built-in consent FR (default)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lint", parents=[common], help="lint requirement statements")
    p.add_argument("reqs", nargs="?")
    p.add_argument("--builtin", action="store_true")
    p.add_argument("--strict", action="store_true", help="treat warnings as errors")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("report", parents=[common], help="coverage, verdict and lint report")
    p.add_argument("model")
    p.add_argument("traces", nargs="*")
    p.add_argument("--reqs", metavar="PATH")
    p.add_argument("--builtin", action="store_true")
    p.add_argument("--timestamps", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for d in exc.diagnostics:
            print(f"  {d}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
