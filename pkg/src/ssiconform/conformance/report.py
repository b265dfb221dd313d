"""Verdict, lint and coverage reports in human and machine form.

Machine output is deterministic: FR in natural key order, fixed key order
inside each record, LF line endings, and no wall-clock data unless asked.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone

from ..catalog import Catalog, RequirementSet, natural_key
from .checks import STATUSES, VIOLATED, Verdict, describe_witness
from .coverage import CoverageMatrix, render_matrix
from .lint import LintFinding


def _sorted(verdicts: list[Verdict]) -> list[Verdict]:
    return sorted(verdicts, key=lambda v: natural_key(v.fr_key))


def verdicts_machine(verdicts: list[Verdict]) -> str:
    """JSON Lines, one verdict per FR."""
    return "".join(json.dumps(v.to_dict(), ensure_ascii=False) + "\n" for v in _sorted(verdicts))


def verdicts_human(verdicts: list[Verdict]) -> str:
    rows = _sorted(verdicts)
    key_w = max([len(v.fr_key) for v in rows] + [2])
    lines = [f"{'FR'.ljust(key_w)}  {'status':<14}  message"]
    for v in rows:
        lines.append(f"{v.fr_key.ljust(key_w)}  {v.status:<14}  {v.message}")
        for w in v.witnesses:
            lines.append(f"{''.ljust(key_w)}  {'':<14}  - {describe_witness(w)}")
    counts = {s: sum(1 for v in rows if v.status == s) for s in STATUSES}
    lines.append("")
    lines.append(", ".join(f"{n} {s}" for s, n in counts.items()))
    return "\n".join(lines) + "\n"


def finding_dict(f: LintFinding) -> dict:
    return {
        "target": f.target,
        "criterion": f.criterion,
        "passed": f.passed,
        "severity": f.severity,
        "detail": f.detail,
    }


def lint_machine(findings: list[LintFinding]) -> str:
    return "".join(json.dumps(finding_dict(f), ensure_ascii=False) + "\n" for f in findings)


def lint_human(findings: list[LintFinding]) -> str:
    lines = []
    for f in findings:
        mark = "pass" if f.passed else f.severity
        lines.append(f"{mark:<7}  {f.target:<12}  {f.criterion:<13}  {f.detail}")
    failed = sum(1 for f in findings if not f.passed)
    lines.append("")
    lines.append(f"{len(findings)} findings, {failed} failed")
    return "\n".join(lines) + "\n"


def nfr_summary(verdicts: list[Verdict], reqs: RequirementSet, catalog: Catalog) -> dict[str, dict]:
    """Per capability-bearing NFR with linked FR: FR count and status counts."""
    by_key = {v.fr_key: v for v in verdicts}
    out: dict[str, dict] = {}
    for nfr in catalog.nfrs:
        frs = [fr.key for fr in reqs if nfr.key in fr.nfr_links]
        if not frs:
            continue
        statuses = [by_key[k].status for k in frs if k in by_key]
        out[nfr.key] = {"fr": len(frs), **{s: statuses.count(s) for s in STATUSES}}
    return out


def build_report(model_id: str | None, trace_count: int, verdicts: list[Verdict], reqs: RequirementSet,
                 catalog: Catalog, matrix: CoverageMatrix, findings: list[LintFinding],
                 timestamps: bool = False) -> dict:
    failed = [f for f in findings if not f.passed]
    doc: dict = {
        "model": model_id,
        "traces": trace_count,
        "requirements": reqs.keys(),
        "verdicts": [v.to_dict() for v in _sorted(verdicts)],
        "nfr_summary": nfr_summary(verdicts, reqs, catalog),
        "coverage": matrix.to_dict(),
        "lint": {
            "findings": len(findings),
            "failed": len(failed),
            "errors": sum(1 for f in failed if f.severity == "error"),
            "warnings": sum(1 for f in failed if f.severity == "warning"),
            "failures": [finding_dict(f) for f in failed],
        },
    }
    if timestamps:
        doc["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return doc


def report_machine(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def report_human(report: dict, verdicts: list[Verdict], matrix: CoverageMatrix) -> str:
    lines = [f"model: {report['model'] or '(unnamed)'}", f"traces: {report['traces']}"]
    if "generated" in report:
        lines.append(f"generated: {report['generated']}")
    lines += ["", "Verdicts", "--------", verdicts_human(verdicts).rstrip("\n"), "", "Per NFR", "-------"]
    for nfr, counts in report["nfr_summary"].items():
        rest = ", ".join(f"{counts[s]} {s}" for s in STATUSES if s != VIOLATED and counts[s])
        lines.append(f"{nfr}: {counts['fr']} FR, {counts[VIOLATED]} violated" + (f" ({rest})" if rest else ""))
    lint = report["lint"]
    lines += ["", "Coverage", "--------", render_matrix(matrix).rstrip("\n"), "", "Lint", "----",
              f"{lint['findings']} findings: {lint['errors']} errors, {lint['warnings']} warnings"]
    for f in lint["failures"]:
        lines.append(f"  {f['severity']}: {f['target']} {f['criterion']}: {f['detail']}")
    return "\n".join(lines) + "\n"
