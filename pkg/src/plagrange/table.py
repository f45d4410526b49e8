"""Reference values for ``min L_p`` and row-by-row verification."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from .exact import Surd, parse_surd
from .markoff import corollary_filter
from .search import ResultReport
from .words import format_digits, is_rotation, parse_cf


@dataclass(frozen=True)
class ReferenceEntry:
    p: int
    alpha: Surd
    decimal: str
    period: tuple[int, ...]
    symmetry: str

    @property
    def root(self) -> tuple[int, int]:
        """``(N, d)`` with alpha = sqrt(N)/d."""
        return self.alpha.root_form()


def parse_table(text: str) -> dict[int, ReferenceEntry]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    out = {}
    for row in csv.DictReader(io.StringIO("\n".join(lines))):
        p = int(row["p"])
        alpha = parse_surd(row["alpha"])
        if not isinstance(alpha, Surd):
            raise ValueError(f"row {p}: alpha must be finite")
        sym = row["symmetry"].strip()
        if sym not in ("S", "A", "R"):
            raise ValueError(f"row {p}: bad symmetry {sym!r}")
        out[p] = ReferenceEntry(p, alpha, row["decimal"].strip(), tuple(parse_cf(row["period"])), sym)
    return out


def load_table(path: Optional[str] = None) -> dict[int, ReferenceEntry]:
    """The embedded table, or a user-supplied file in the same format."""
    if path is None:
        text = resources.files("plagrange").joinpath("data/table1.csv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_table(text)


def same_cycle(p: Iterable[int], q: Iterable[int]) -> bool:
    """Equal up to rotation or reversal."""
    p, q = list(p), list(q)
    return is_rotation(p, q) or is_rotation(p, q[::-1])


@dataclass
class Verdict:
    p: int
    ok: bool
    source: str  # "table", "markoff" or "none"
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} p={self.p} [{self.source}] {self.detail}"


def verify_report(report: ResultReport, table: dict[int, ReferenceEntry]) -> Verdict:
    p = report.p
    got = f"alpha={report.alpha}"
    if p in table:
        ref = table[p]
        problems = []
        if report.alpha != ref.alpha:
            problems.append(f"alpha {report.alpha} != {ref.alpha}")
        match = [w for w in report.witnesses if same_cycle(w.period, ref.period)]
        if not match:
            periods = ",".join(format_digits(w.period) for w in report.witnesses)
            problems.append(f"period [{periods}] != [{format_digits(ref.period)}]")
        elif any(w.symmetry != ref.symmetry for w in match):
            problems.append(f"symmetry {match[0].symmetry} != {ref.symmetry}")
        if problems:
            return Verdict(p, False, "table", "; ".join(problems))
        return Verdict(p, True, "table", f"{got} period [{format_digits(ref.period)}] {ref.symmetry}")
    points = corollary_filter(p)
    if points:
        best = min(points, key=lambda pt: pt.z)
        if report.alpha != best.value:
            return Verdict(p, False, "markoff", f"{got} != Markoff point {best.value}")
        return Verdict(p, True, "markoff", f"{got} = Markoff point z={best.z}")
    return Verdict(p, True, "none", f"{got} (no reference value)")
