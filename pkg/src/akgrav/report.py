"""Check records, reports and their text serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"

MAX_SKIP_FRACTION = 0.10


@dataclass
class CheckRecord:
    check_id: str
    max_residual: float
    tolerance: float | None
    evaluated: int
    skipped: int = 0
    informative: bool = False
    note: str = ""

    @property
    def verdict(self):
        if self.informative:
            return INFO
        if self.evaluated <= 0 or self.skipped / self.evaluated >= MAX_SKIP_FRACTION:
            return FAIL
        if not math.isfinite(self.max_residual):
            return FAIL
        return PASS if self.max_residual < self.tolerance else FAIL

    @property
    def passed(self):
        return self.verdict != FAIL

    def as_dict(self):
        return {
            "check": self.check_id,
            "max_residual": _num(self.max_residual),
            "tolerance": _num(self.tolerance),
            "points_evaluated": self.evaluated,
            "points_skipped": self.skipped,
            "verdict": self.verdict,
            "note": self.note,
        }


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.6e}")


@dataclass
class CheckReport:
    scenario: str
    records: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def add(self, check_id, stats, tolerance, informative=False, note=""):
        """Append a record from ``(max, evaluated, skipped)`` residual statistics."""
        mx, evaluated, skipped = stats
        rec = CheckRecord(check_id, float(mx), tolerance, int(evaluated), int(skipped), informative, note)
        self.records.append(rec)
        return rec

    def __getitem__(self, check_id):
        for r in self.records:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    def __contains__(self, check_id):
        return any(r.check_id == check_id for r in self.records)

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    @property
    def failures(self):
        return [r for r in self.records if not r.passed]

    def machine_readable(self):
        doc = {
            "scenario": self.scenario,
            "checks": [r.as_dict() for r in self.records],
            "provenance": self.provenance,
            "data": self.data,
            "overall": PASS if self.passed else FAIL,
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=str)

    def summary_lines(self):
        lines = []
        for r in self.records:
            tol = "-" if r.tolerance is None else f"{r.tolerance:.1e}"
            lines.append(f"{r.verdict:<4}  {r.check_id:<30} max={r.max_residual:.3e}  tol={tol}  "
                         f"points={r.evaluated} skipped={r.skipped}" + (f"  ({r.note})" if r.note else ""))
        return lines

    def to_text(self):
        out = [f"# report: {self.scenario}"]
        for k in sorted(self.metadata):
            out.append(f"# {k}: {self.metadata[k]}")
        out.append("")
        out.append("[summary]")
        out.extend(self.summary_lines())
        out.append(f"overall: {PASS if self.passed else FAIL}")
        out.append("")
        out.append("[machine-readable]")
        out.append(self.machine_readable())
        out.append("[end]")
        return "\n".join(out) + "\n"


def extract_machine_readable(text):
    """The machine-readable section of a serialised report."""
    start = text.index("[machine-readable]\n") + len("[machine-readable]\n")
    end = text.rindex("\n[end]")
    return text[start:end]
