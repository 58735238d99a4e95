"""Source-analysis witnesses: literal absence, rewrite checks, symbol tracing.

The supported-language witness verifies that a rewrite hides a surface literal
while its declared symbols and simple edges stay visible to the scanner. For
languages outside the supported set a declared source profile stands in:
patterns both sources must match (shared intent) and patterns only the
rewrite may match (rewrite markers).
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Tuple

from .errors import EmptyProfile, UnsupportedLanguage
from .model import TraceDecl
from .outcomes import Outcome, RunSummary, failed, passed, summarize
from .symbols import SUPPORTED_LANGUAGES, extract_symbols

C01Runner = Callable[[], Outcome]


def literal_absent(source: bytes, literal: bytes) -> bool:
    """True iff literal never occurs as a contiguous byte subsequence."""
    if not literal:
        raise ValueError("literal must be nonempty")
    return literal not in source


@dataclass(frozen=True)
class SourceProfile:
    """Declared pattern sets for profile-based rewrite checking.

    hidden_literals must be absent from the rewrite; shared_intent patterns
    must appear in both sources; rewrite_markers must appear in the rewrite
    and in the rewrite only. Patterns are fixed byte sequences matched without
    case folding.
    """

    hidden_literals: Tuple[bytes, ...]
    shared_intent: Tuple[bytes, ...]
    rewrite_markers: Tuple[bytes, ...]

    def validate(self) -> None:
        if not (self.hidden_literals and self.shared_intent and self.rewrite_markers):
            raise EmptyProfile("profile pattern lists must be nonempty")


@dataclass
class RewriteWitnessResult:
    checks: List[Tuple[str, Outcome]]
    summary: RunSummary

    @property
    def ok(self) -> bool:
        return all(outcome.is_pass for _, outcome in self.checks)


def _finish(checks: List[Tuple[str, Outcome]]) -> RewriteWitnessResult:
    return RewriteWitnessResult(checks=checks, summary=summarize(checks))


def check_rewrite_supported(canonical: bytes, rewrite: bytes, language: str,
                            c01_runner: C01Runner, *,
                            hidden_literal: bytes,
                            expected_functions: Iterable[str],
                            expected_call_edges: Iterable[Tuple[str, str]],
                            expected_imports: Iterable[str]) -> RewriteWitnessResult:
    """Run the declared check list for a supported-language rewrite.

    Expected symbols and edges come from the bundle's contract declaration.
    The checks never SKIP except the C01 run when its toolchain is absent.
    """
    if language not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguage(language)
    checks: List[Tuple[str, Outcome]] = []
    checks.append((
        "literal-absent",
        passed() if literal_absent(rewrite, hidden_literal)
        else failed("literal present in rewrite")))
    checks.append(("c01-runtime", c01_runner()))

    report = extract_symbols(rewrite, language)
    for name in expected_functions:
        checks.append((
            f"function:{name}",
            passed() if name in report.declared_functions
            else failed(f"declared function {name!r} not found")))
    callers = {(a, b) for (a, b) in report.call_edges}
    for caller, callee in expected_call_edges:
        checks.append((
            f"call-edge:{caller}->{callee}",
            passed() if (caller, callee) in callers
            else failed(f"call edge {caller}->{callee} not found")))
    imported = {module for _, module in report.import_edges}
    for module in expected_imports:
        checks.append((
            f"import:{module}",
            passed() if module in imported
            else failed(f"import of {module!r} not found")))
    return _finish(checks)


def _contains_all(source: bytes, patterns: Tuple[bytes, ...]) -> bool:
    return all(p in source for p in patterns)


def check_profile(canonical: bytes, rewrite: bytes, profile: SourceProfile,
                  c01_runner: C01Runner) -> RewriteWitnessResult:
    """Profile-based rewrite witness for languages outside the supported set."""
    profile.validate()
    checks: List[Tuple[str, Outcome]] = []
    checks.append((
        "literal-absent",
        passed() if all(literal_absent(rewrite, lit) for lit in profile.hidden_literals)
        else failed("literal present in rewrite")))
    checks.append(("c01-runtime", c01_runner()))
    checks.append((
        "shared-intent:canonical",
        passed() if _contains_all(canonical, profile.shared_intent)
        else failed("canonical source misses a shared-intent pattern")))
    checks.append((
        "shared-intent:rewrite",
        passed() if _contains_all(rewrite, profile.shared_intent)
        else failed("rewrite misses a shared-intent pattern")))
    checks.append((
        "rewrite-markers",
        passed() if _contains_all(rewrite, profile.rewrite_markers)
        else failed("rewrite misses a declared rewrite marker")))
    leaked = [m for m in profile.rewrite_markers if m in canonical]
    checks.append((
        "marker-leak",
        passed() if not leaked else failed("marker-leak")))
    return _finish(checks)


@dataclass
class SymbolCheckResult:
    matched: int
    skipped: int
    failures: List[Tuple[str, str]]  # (entity id, message)


def check_code_symbols(trace: TraceDecl, root,
                       supported=SUPPORTED_LANGUAGES) -> SymbolCheckResult:
    """Verify each symbol-bearing code entity's declared symbol in its source.

    Entities in unsupported languages are counted skipped and never matched.
    matched + skipped + len(failures) equals the number of symbol-bearing
    code entities.
    """
    root = Path(root)
    matched = 0
    skipped_count = 0
    failures: List[Tuple[str, str]] = []
    for entity in sorted(trace.entities, key=lambda e: e.id):
        if entity.kind != "code" or not entity.symbol:
            continue
        if entity.language not in supported:
            skipped_count += 1
            continue
        if not entity.path:
            failures.append((entity.id, "code entity declares a symbol but no path"))
            continue
        source = (root / entity.path).read_bytes()
        report = extract_symbols(source, entity.language, filename=entity.path)
        if entity.symbol in report.declared_functions:
            matched += 1
        else:
            failures.append((entity.id, f"symbol {entity.symbol!r} not declared in {entity.path}"))
    return SymbolCheckResult(matched=matched, skipped=skipped_count, failures=failures)
