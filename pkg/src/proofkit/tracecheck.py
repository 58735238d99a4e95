"""Six-kind traceability chain validation.

Chain rule (artifact convention, strictest testable reading): every non-intent
entity must reference at least one entity of the immediately prior kind, and
every reference must point exactly one rank down the chain
intent -> requirement -> implementation -> code -> test -> output.
"""

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

from .model import ENTITY_KINDS, TraceDecl

CHAIN_RANK: Dict[str, int] = {kind: rank for rank, kind in enumerate(ENTITY_KINDS)}

MISSING_PREDECESSOR = "<missing-predecessor-ref>"


@dataclass
class TraceReport:
    entity_count: int = 0
    kind_counts: Dict[str, int] = field(default_factory=dict)
    dangling: List[Tuple[str, str]] = field(default_factory=list)
    missing_paths: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.dangling and not self.missing_paths


def validate_chain(trace: TraceDecl) -> TraceReport:
    """Validate counts, reference integrity, and chain ordering; no path checks.

    Violations are data (rows in ``dangling``), not exceptions. The outcome is
    insensitive to entity declaration order.
    """
    report = TraceReport()
    entities = sorted(trace.entities, key=lambda e: e.id)
    by_id = trace.by_id()
    report.entity_count = len(entities)
    report.kind_counts = dict(Counter(e.kind for e in entities))

    for entity in entities:
        rank = CHAIN_RANK.get(entity.kind)
        if rank is None:
            report.dangling.append((entity.id, f"<unknown-kind:{entity.kind}>"))
            continue
        has_predecessor = False
        for ref in entity.refs:
            target = by_id.get(ref)
            if target is None:
                report.dangling.append((entity.id, ref))
                continue
            if CHAIN_RANK.get(target.kind) != rank - 1:
                report.dangling.append((entity.id, ref))
                continue
            has_predecessor = True
        if rank > 0 and not has_predecessor:
            report.dangling.append((entity.id, MISSING_PREDECESSOR))
    return report


def check_paths_exist(trace: TraceDecl, root) -> TraceReport:
    """validate_chain plus filesystem existence checks for path-bearing entities."""
    root = Path(root)
    report = validate_chain(trace)
    for entity in sorted(trace.entities, key=lambda e: e.id):
        if entity.path and not (root / entity.path).is_file():
            report.missing_paths.append((entity.id, entity.path))
    return report
