"""Structured verification reports with JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, asdict
from typing import Any, Optional

SCHEMA = "triadne/1"


@dataclass
class CheckRecord:
    """A single inequality/identity check: inputs, both sides, verdict."""

    name: str
    inputs: dict
    lhs: float
    rhs: float
    tolerance: float
    passed: bool
    anchor: str = ""  # the formula being checked, for traceability
    extra: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    title: str
    checks: list = field(default_factory=list)
    status: str = "pass"  # pass | fail | hypothesis-not-met | report-only
    summary: dict = field(default_factory=dict)

    def add(
        self,
        name: str,
        inputs: dict,
        lhs: float,
        rhs: float,
        tolerance: float,
        passed: bool,
        anchor: str = "",
        **extra: Any,
    ) -> CheckRecord:
        rec = CheckRecord(name, inputs, float(lhs), float(rhs), float(tolerance),
                          bool(passed), anchor, dict(extra))
        self.checks.append(rec)
        if not passed and self.status == "pass":
            self.status = "fail"
        return rec

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "report-only")

    @property
    def num_failed(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "title": self.title,
            "status": self.status,
            "summary": self.summary,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["name", "inputs", "lhs", "rhs", "tolerance", "passed", "anchor"])
        for c in self.checks:
            w.writerow([c.name, json.dumps(c.inputs, default=_jsonable),
                        c.lhs, c.rhs, c.tolerance, c.passed, c.anchor])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (set, tuple)):
        return list(obj)
    return str(obj)
