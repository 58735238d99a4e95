"""Structural conformance checking for individual declaration files.

Only the invocation contract and a minimal structural rule set are modeled:
instance files FAIL outright when no spec root is supplied; with a spec root,
the file kind is recognized from its name and checked for required tables and
identifier formats. The rule file lives at <spec-root>/conformance_rules.toml;
a reference copy ships in this package's data directory.
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import tomli

from .outcomes import Outcome, failed, passed

RULES_FILENAME = "conformance_rules.toml"

SPEC_ROOT_REQUIRED = "spec root is required to validate instance files (pass --spec-root)"


def bundled_rules_dir() -> Path:
    """Directory holding the reference conformance rules shipped here."""
    return Path(__file__).parent / "data"


@dataclass
class ConformanceResult:
    outcome: Outcome
    exit_code: int
    details: List[str]


class UsageError(Exception):
    """Unreadable input or broken spec root; maps to exit code 2."""


def _file_kind(path: Path) -> Optional[str]:
    return path.stem if path.suffix == ".toml" else None


def conformance_check(file, spec_root=None) -> ConformanceResult:
    path = Path(file)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")

    if spec_root is None:
        return ConformanceResult(failed(SPEC_ROOT_REQUIRED), 1, [SPEC_ROOT_REQUIRED])

    rules_path = Path(spec_root) / RULES_FILENAME
    if not rules_path.is_file():
        raise UsageError(f"spec root has no {RULES_FILENAME}: {spec_root}")
    rules = tomli.loads(rules_path.read_text(encoding="utf-8"))
    id_pattern = re.compile(rules.get("id_pattern", r"^\S+$"))

    kind = _file_kind(path)
    kind_rules = rules.get("kinds", {}).get(kind or "")
    if kind_rules is None:
        reason = f"unrecognized declaration kind: {path.name}"
        return ConformanceResult(failed(reason), 1, [reason])

    try:
        doc = tomli.loads(path.read_text(encoding="utf-8"))
    except (tomli.TOMLDecodeError, UnicodeDecodeError) as exc:
        reason = f"not valid TOML: {exc}"
        return ConformanceResult(failed(reason), 1, [reason])

    problems: List[str] = []
    for table in kind_rules.get("required_tables", []):
        if table not in doc:
            problems.append(f"missing required table: {table}")
    for table in kind_rules.get("id_tables", []):
        for row in doc.get(table, []) if isinstance(doc.get(table), list) else []:
            row_id = row.get("id", "")
            if not id_pattern.match(row_id):
                problems.append(f"bad identifier in [[{table}]]: {row_id!r}")

    if problems:
        return ConformanceResult(failed("; ".join(problems)), 1, problems)
    return ConformanceResult(passed(), 0, [f"{path.name}: conforms ({kind})"])
