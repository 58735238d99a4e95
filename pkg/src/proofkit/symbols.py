"""Declared-symbol and simple-edge extraction for the supported language set.

This is a token-level declaration scanner, not a grammar parse: it finds
top-level function declarations, caller edges (a declared function's name
applied inside another declared function's body), and import declarations.
The scanner is pluggable per language tag so a full parser backend could
replace a scanner without changing the contract surface.
"""

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Set, Tuple

from .errors import UnsupportedLanguage

SUPPORTED_LANGUAGES: FrozenSet[str] = frozenset({"rust", "go", "typescript", "java"})


@dataclass
class SymbolReport:
    declared_functions: Set[str] = field(default_factory=set)
    call_edges: Set[Tuple[str, str]] = field(default_factory=set)
    import_edges: Set[Tuple[str, str]] = field(default_factory=set)


def _strip_comments(text: str) -> str:
    """Remove // line comments and /* */ block comments, preserving line count."""
    text = re.sub(r"/\*.*?\*/", lambda m: re.sub(r"[^\n]", " ", m.group(0)), text,
                  flags=re.DOTALL)
    return re.sub(r"//[^\n]*", "", text)


_DECL_PATTERNS: Dict[str, re.Pattern] = {
    "go": re.compile(r"^\s*func\s+(?:\([^)]*\)\s*)?([A-Za-z_]\w*)\s*\(", re.MULTILINE),
    "rust": re.compile(r"^\s*(?:pub(?:\([^)]*\))?\s+)?(?:async\s+)?(?:unsafe\s+)?fn\s+([A-Za-z_]\w*)",
                       re.MULTILINE),
    "typescript": re.compile(r"^\s*(?:export\s+)?(?:async\s+)?function\s+([A-Za-z_$]\w*)",
                             re.MULTILINE),
    "java": re.compile(
        r"^\s*(?:(?:public|protected|private|static|final|abstract|synchronized|native)\s+)+"
        r"[\w<>\[\],\s]+?\s([A-Za-z_]\w*)\s*\(",
        re.MULTILINE),
}


def _go_imports(text: str) -> Set[str]:
    imports: Set[str] = set()
    for single in re.findall(r'^\s*import\s+(?:\w+\s+)?"([^"]+)"', text, re.MULTILINE):
        imports.add(single)
    for block in re.findall(r"^\s*import\s*\(([^)]*)\)", text, re.MULTILINE | re.DOTALL):
        imports.update(re.findall(r'"([^"]+)"', block))
    return imports


def _rust_imports(text: str) -> Set[str]:
    return {m.split("::")[0] for m in re.findall(r"^\s*use\s+([\w:]+)", text, re.MULTILINE)}


def _typescript_imports(text: str) -> Set[str]:
    imports = set(re.findall(r"""^\s*import\s+(?:[^'"]+\s+from\s+)?['"]([^'"]+)['"]""",
                             text, re.MULTILINE))
    imports.update(re.findall(r"""require\(\s*['"]([^'"]+)['"]\s*\)""", text))
    return imports


def _java_imports(text: str) -> Set[str]:
    return set(re.findall(r"^\s*import\s+(?:static\s+)?([\w.]+)\s*;", text, re.MULTILINE))


_IMPORT_SCANNERS: Dict[str, Callable[[str], Set[str]]] = {
    "go": _go_imports,
    "rust": _rust_imports,
    "typescript": _typescript_imports,
    "java": _java_imports,
}


def _function_bodies(text: str, pattern: re.Pattern) -> List[Tuple[str, str]]:
    """(name, body) per declaration, body delimited by balanced braces."""
    bodies = []
    for match in pattern.finditer(text):
        name = match.group(1)
        open_brace = text.find("{", match.end() - 1)
        if open_brace < 0:
            continue
        depth = 0
        for index in range(open_brace, len(text)):
            if text[index] == "{":
                depth += 1
            elif text[index] == "}":
                depth -= 1
                if depth == 0:
                    bodies.append((name, text[open_brace + 1:index]))
                    break
    return bodies


def extract_symbols(source: bytes, language: str, filename: str = "<memory>") -> SymbolReport:
    """Scan one source file for declared functions, caller edges, import edges.

    Raises UnsupportedLanguage outside the supported set; callers route those
    sources to the profile-based witness instead.
    """
    if language not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguage(language)
    text = _strip_comments(source.decode("utf-8", errors="replace"))
    pattern = _DECL_PATTERNS[language]

    report = SymbolReport()
    report.declared_functions = {m.group(1) for m in pattern.finditer(text)}
    report.import_edges = {(filename, module) for module in _IMPORT_SCANNERS[language](text)}
    for caller, body in _function_bodies(text, pattern):
        for callee in report.declared_functions:
            # applied at token level, not preceded by "." (method selector)
            if re.search(r"(?<![.\w])" + re.escape(callee) + r"\s*\(", body):
                report.call_edges.add((caller, callee))
    return report
