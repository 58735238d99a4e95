"""Four-valued result taxonomy: PASS, SKIP, FAIL, MEASURED.

SKIP means a check was not performed; it is never evidence that the skipped
check would have held. MEASURED is a non-gating observation and is carried in
the schema even though the runtime suite never produces it.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple


class Status(str, Enum):
    PASS = "PASS"
    SKIP = "SKIP"
    FAIL = "FAIL"
    MEASURED = "MEASURED"


@dataclass(frozen=True)
class Outcome:
    status: Status
    reason: str = ""

    def __post_init__(self):
        if self.status in (Status.SKIP, Status.FAIL) and not self.reason:
            raise ValueError(f"{self.status.value} outcome requires a reason")

    @property
    def is_pass(self) -> bool:
        return self.status is Status.PASS


def passed() -> Outcome:
    return Outcome(Status.PASS)


def skipped(reason: str) -> Outcome:
    return Outcome(Status.SKIP, reason)


def failed(reason: str) -> Outcome:
    return Outcome(Status.FAIL, reason)


@dataclass
class RunSummary:
    """Aggregated counts for one suite plus the per-subject outcomes."""

    passed: int = 0
    skipped: int = 0
    failed: int = 0
    per_unit: Dict[str, Outcome] = field(default_factory=dict)

    @property
    def attempted(self) -> int:
        return self.passed + self.skipped + self.failed

    @property
    def all_skipped(self) -> bool:
        return self.attempted > 0 and self.skipped == self.attempted

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def add(self, unit_id: str, outcome: Outcome) -> None:
        self.per_unit[unit_id] = outcome
        if outcome.status is Status.PASS:
            self.passed += 1
        elif outcome.status is Status.SKIP:
            self.skipped += 1
        elif outcome.status is Status.FAIL:
            self.failed += 1
        else:
            raise ValueError("MEASURED outcomes do not enter pass/skip/fail summaries")

    def line(self) -> str:
        return f"{self.passed} pass, {self.skipped} skip, {self.failed} fail"


@dataclass(frozen=True)
class ReportRow:
    """One evidence row: a contract id or validator name applied to a subject."""

    check: str  # contract id ("C01") or validator name ("dag-validation")
    subject: str  # unit id, file, or named sub-check
    outcome: Outcome


def summarize(outcomes: List[Tuple[str, Outcome]]) -> RunSummary:
    summary = RunSummary()
    for subject, outcome in outcomes:
        summary.add(subject, outcome)
    return summary
