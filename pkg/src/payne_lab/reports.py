"""Inequality reports and their JSON/CSV serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

CSV_COLUMNS = ("name", "lhs", "rhs", "margin", "pass")


@dataclass(frozen=True)
class InequalityReport:
    """One checked inequality ``lhs <= rhs``.

    ``passed`` is derived, never supplied: it holds iff
    ``lhs <= rhs + tolerance``.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float = 0.0
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        return self.lhs <= self.rhs + self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "metadata": _jsonable(self.metadata),
        }

    def csv_row(self) -> list[Any]:
        return [self.name, repr(float(self.lhs)), repr(float(self.rhs)),
                repr(float(self.margin)), str(self.passed).lower()]

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: {self.lhs:.10g} <= {self.rhs:.10g}"
                f" (margin {self.margin:+.4g}, tol {self.tolerance:.3g})")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    return obj


def reports_to_json(reports: Iterable[InequalityReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)


def reports_to_csv(reports: Iterable[InequalityReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()
