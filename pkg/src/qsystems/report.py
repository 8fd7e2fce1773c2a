"""Verification report records shared by the solver checks and the KR pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass(frozen=True)
class Discrepancy:
    """First offending coefficient: where it sits and the two values seen."""

    exponent: Dict[str, int]
    lhs: Fraction
    rhs: Fraction
    index: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "exp": dict(self.exponent),
            "lhs": f"{self.lhs.numerator}/{self.lhs.denominator}",
            "rhs": f"{self.rhs.numerator}/{self.rhs.denominator}",
        }
        if self.index is not None:
            out["index"] = self.index
        return out


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    witness: Optional[Discrepancy] = None
    gating: bool = True
    message: str = ""

    def __post_init__(self) -> None:
        if self.status == FAIL and self.witness is None and not self.message:
            raise ValueError("a failing check needs a witness or a message")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "status": self.status,
                               "gating": self.gating}
        out["witness"] = self.witness.to_json() if self.witness else None
        if self.message:
            out["message"] = self.message
        return out


@dataclass
class VerificationReport:
    algebra: str
    cutoff: int
    checks: List[Check] = field(default_factory=list)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        """True iff no gating check failed."""
        return not any(c.gating and c.status == FAIL for c in self.checks)

    @property
    def all_passed(self) -> bool:
        return bool(self.checks) and all(c.status == PASS for c in self.checks)

    def to_json(self) -> Dict[str, Any]:
        return {"algebra": self.algebra, "cutoff": self.cutoff,
                "checks": [c.to_json() for c in self.checks]}
