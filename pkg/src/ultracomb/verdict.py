"""Pass/fail verdicts shared by the verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class Verdict:
    passed: bool
    reason: str = ""
    violation: Optional[dict] = None
    counts: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def ok(cls, counts=None) -> "Verdict":
        return cls(True, "", None, dict(counts or {}))

    @classmethod
    def fail(cls, reason: str, violation: dict, counts=None) -> "Verdict":
        return cls(False, reason, violation, dict(counts or {}))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "reason": self.reason,
            "violation": self.violation,
            "counts": self.counts,
        }
