"""NFR x FR traceability matrix."""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import Catalog, RequirementSet

LINKED = "linked"
CONSTRAINT_APPLIES = "constraint-applies"
BLANK = "blank"


@dataclass(frozen=True)
class CoverageMatrix:
    rows: tuple[str, ...]
    columns: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]  # cells[row][column]

    def cell(self, nfr: str, fr: str) -> str:
        return self.cells[self.rows.index(nfr)][self.columns.index(fr)]

    def row(self, nfr: str) -> dict[str, str]:
        return dict(zip(self.columns, self.cells[self.rows.index(nfr)]))

    def frs_with(self, nfr: str, mark: str) -> list[str]:
        return [fr for fr, c in self.row(nfr).items() if c == mark]

    def summary(self) -> dict[str, dict[str, int]]:
        return {
            nfr: {LINKED: row.count(LINKED), CONSTRAINT_APPLIES: row.count(CONSTRAINT_APPLIES)}
            for nfr, row in zip(self.rows, self.cells)
        }

    def to_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "columns": list(self.columns),
            "cells": {nfr: dict(zip(self.columns, row)) for nfr, row in zip(self.rows, self.cells)},
            "summary": self.summary(),
        }


def coverage_matrix(reqs: RequirementSet, catalog: Catalog) -> CoverageMatrix:
    columns = tuple(fr.key for fr in reqs)
    rows = []
    for nfr in catalog.nfrs:
        row = []
        for fr in reqs:
            if nfr.key in fr.nfr_links:
                row.append(LINKED)
            elif nfr.key in fr.constraint_links:
                row.append(CONSTRAINT_APPLIES)
            else:
                row.append(BLANK)
        rows.append(tuple(row))
    return CoverageMatrix(tuple(n.key for n in catalog.nfrs), columns, tuple(rows))


_MARKS = {LINKED: "X", CONSTRAINT_APPLIES: "c", BLANK: "."}


def render_matrix(matrix: CoverageMatrix) -> str:
    """Fixed-width text table: X linked, c constraint applies, . blank."""
    width = max([len(r) for r in matrix.rows] + [5])
    col_w = [max(len(c), 1) for c in matrix.columns]
    header = "NFR".ljust(width) + "  " + "  ".join(c.ljust(w) for c, w in zip(matrix.columns, col_w))
    lines = [header.rstrip() + "  linked  constraint"]
    summary = matrix.summary()
    for nfr, row in zip(matrix.rows, matrix.cells):
        marks = "  ".join(_MARKS[c].ljust(w) for c, w in zip(row, col_w))
        counts = summary[nfr]
        lines.append(f"{nfr.ljust(width)}  {marks}  {counts[LINKED]:>6}  {counts[CONSTRAINT_APPLIES]:>10}")
    return "\n".join(lines) + "\n"
