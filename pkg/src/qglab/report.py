"""Machine-readable certificates.

A report is a flat list of check records, each carrying the statement label it
certifies, the measured residual, the tolerance or bound it was held to, and a
pass flag.  Serialization is deterministic: records are sorted, floats are
rendered as 17-significant-digit decimal strings, and repeated runs with the
same seed produce byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["CheckRecord", "CheckReport", "format_float"]

REPORT_VERSION = "0.1.0"


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    check: str
    group: str
    construction: str
    anchor: str
    residual: float
    tolerance: float | None = None
    bound: float | None = None
    detail: dict | None = None

    @property
    def passed(self) -> bool:
        limit = 0.0
        if self.tolerance is not None:
            limit += self.tolerance
        if self.bound is not None:
            limit += self.bound
        if self.tolerance is None and self.bound is None:
            return True
        return bool(self.residual <= limit)

    def sort_key(self) -> tuple:
        return (self.suite, self.group, self.construction, self.check)

    def to_json_obj(self) -> dict:
        obj = {
            "suite": self.suite,
            "check": self.check,
            "group": self.group,
            "construction": self.construction,
            "anchor": self.anchor,
            "residual": format_float(self.residual),
            "tolerance": None if self.tolerance is None else format_float(self.tolerance),
            "bound": None if self.bound is None else format_float(self.bound),
            "pass": self.passed,
        }
        if self.detail is not None:
            obj["detail"] = {
                k: (format_float(v) if isinstance(v, float) else v)
                for k, v in sorted(self.detail.items())
            }
        return obj


@dataclass
class CheckReport:
    seed: int
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord) -> None:
        self.records.append(record)

    def extend(self, records: list[CheckRecord]) -> None:
        self.records.extend(records)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        passed = sum(1 for r in self.records if r.passed)
        return {
            "total": len(self.records),
            "passed": passed,
            "failed": len(self.records) - passed,
        }

    def to_json_bytes(self) -> bytes:
        obj = {
            "version": REPORT_VERSION,
            "seed": self.seed,
            "records": [r.to_json_obj() for r in sorted(self.records, key=CheckRecord.sort_key)],
            "summary": self.summary(),
        }
        return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")
