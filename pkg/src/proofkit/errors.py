"""Exception types and structured issue records shared across the toolchain."""

from dataclasses import dataclass
from typing import List, Optional


@dataclass(frozen=True)
class BundleIssue:
    """One structured problem found while parsing a bundle."""

    kind: str  # "missing-file" | "parse-error" | "dangling-ref"
    file: str
    message: str
    line: Optional[int] = None


def missing_file(name: str) -> BundleIssue:
    return BundleIssue("missing-file", name, f"declaration file not found: {name}")


def parse_error(file: str, message: str, line: Optional[int] = None) -> BundleIssue:
    return BundleIssue("parse-error", file, message, line)


def dangling_ref(file: str, ref_id: str, context: str) -> BundleIssue:
    return BundleIssue("dangling-ref", file, f"unresolved reference {ref_id!r} in {context}")


class BundleParseError(Exception):
    """Raised when a bundle cannot be parsed into a fully valid model."""

    def __init__(self, issues: List[BundleIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(i.message for i in self.issues))


class CycleError(Exception):
    """A dependency graph required to be acyclic contains a cycle."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("dependency cycle: " + " -> ".join(self.cycle))


class UnsupportedLanguage(Exception):
    """Symbol extraction was requested for a language outside the supported set."""

    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"unsupported language: {tag}")


class EmptyProfile(Exception):
    """A source profile with an empty pattern list is unusable."""


class SpawnError(Exception):
    """A candidate process could not be started at all."""


class BundleError(Exception):
    """The bundle lacks a declaration the requested operation needs."""


class UnknownClaim(Exception):
    """A readiness gate references a claim the evidence matrix does not declare."""

    def __init__(self, claim_id: str):
        self.claim_id = claim_id
        super().__init__(f"gate references undeclared claim: {claim_id}")
