"""Typed model of a proof bundle and the TOML parser for its five files.

The five declaration files carry fixed names at the bundle root:
contract_declaration.toml, implementation_dag.toml, traceability.toml,
review_readiness.toml, evidence_matrix.toml. The key schema (tables
``[[contract]]``, ``[[unit]]``, ``[[entity]]``, ``[[gate]]``, ``[[claim]]``,
``[[artifact]]``, plus ``[computed]``) is an artifact convention documented in
the README. Unknown keys warn instead of erroring so richer bundles still
parse.
"""

import posixpath
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Set, Tuple

import tomli

from .errors import (
    BundleIssue,
    BundleParseError,
    dangling_ref,
    missing_file,
    parse_error,
)

CONTRACTS_FILE = "contract_declaration.toml"
DAG_FILE = "implementation_dag.toml"
TRACE_FILE = "traceability.toml"
READINESS_FILE = "review_readiness.toml"
EVIDENCE_FILE = "evidence_matrix.toml"

DECLARATION_FILES = (
    CONTRACTS_FILE,
    DAG_FILE,
    TRACE_FILE,
    READINESS_FILE,
    EVIDENCE_FILE,
)

ENTITY_KINDS = ("intent", "requirement", "implementation", "code", "test", "output")

WITNESS_KINDS = ("runtime-suite", "go-rewrite", "source-profile")


@dataclass(frozen=True)
class Contract:
    id: str
    domain: str = ""
    depends_on: Tuple[str, ...] = ()
    witness: str = "runtime-suite"
    check: str = ""  # byte-exact | encoding | no-markup | no-bom | "" for source witnesses
    expected_stdout: Optional[bytes] = None
    non_claims: Tuple[str, ...] = ()
    # source-analysis witness data (C05/C06 style contracts)
    language: str = ""
    canonical_source: str = ""
    rewrite_source: str = ""
    rewrite_run: Tuple[str, ...] = ()
    rewrite_tools: Tuple[str, ...] = ()
    hidden_literal: str = ""
    expected_functions: Tuple[str, ...] = ()
    expected_call_edges: Tuple[Tuple[str, str], ...] = ()
    expected_imports: Tuple[str, ...] = ()
    shared_intent: Tuple[str, ...] = ()
    rewrite_markers: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ContractDecl:
    contracts: Tuple[Contract, ...]

    def by_id(self) -> Dict[str, Contract]:
        return {c.id: c for c in self.contracts}


@dataclass(frozen=True)
class Unit:
    id: str
    name: str
    tier: int = 1
    language: str = ""
    deps: Tuple[str, ...] = ()
    loc: int = 0
    source_paths: Tuple[str, ...] = ()
    runtime: bool = False
    required_tools: Tuple[str, ...] = ()
    build: Tuple[Tuple[str, ...], ...] = ()
    run: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ComputedValues:
    unit_count: int
    layer_counts: Tuple[Tuple[int, int], ...]  # (layer, count), sorted by layer
    entry_points: Tuple[str, ...]  # sorted
    leaf_nodes: Tuple[str, ...]  # sorted
    critical_path: Tuple[str, ...]
    critical_path_loc: int


@dataclass(frozen=True)
class DagDecl:
    units: Tuple[Unit, ...]
    declared_computed: Optional[ComputedValues] = None

    def by_id(self) -> Dict[str, Unit]:
        return {u.id: u for u in self.units}


@dataclass(frozen=True)
class Entity:
    id: str
    kind: str
    refs: Tuple[str, ...] = ()
    path: Optional[str] = None
    language: str = ""
    symbol: str = ""


@dataclass(frozen=True)
class TraceDecl:
    entities: Tuple[Entity, ...]

    def by_id(self) -> Dict[str, Entity]:
        return {e.id: e for e in self.entities}


@dataclass(frozen=True)
class Gate:
    id: str
    required_claims: Tuple[str, ...]
    required_outcome: str = "PASS"


@dataclass(frozen=True)
class ReadinessDecl:
    gates: Tuple[Gate, ...]


@dataclass(frozen=True)
class Claim:
    id: str
    statement: str
    evidence_refs: Tuple[str, ...]
    verified_by: Tuple[str, ...] = ()  # report check ids substantiating this claim


@dataclass(frozen=True)
class EvidenceArtifact:
    id: str
    path: str
    kind: str  # script | declaration | source


@dataclass(frozen=True)
class EvidenceDecl:
    claims: Tuple[Claim, ...]
    artifacts: Tuple[EvidenceArtifact, ...]

    def artifact_ids(self) -> Set[str]:
        return {a.id for a in self.artifacts}


@dataclass(frozen=True)
class ProofBundle:
    root: Path
    contracts: ContractDecl
    dag: DagDecl
    trace: TraceDecl
    readiness: ReadinessDecl
    evidence: EvidenceDecl
    warnings: Tuple[str, ...] = ()


Reader = Callable[[Path], bytes]


def _default_reader(path: Path) -> bytes:
    return path.read_bytes()


def normalize_rel(path: str) -> str:
    """Bundle paths are declared with forward slashes; normalize separators."""
    return posixpath.normpath(path.replace("\\", "/"))


_KNOWN_KEYS = {
    "contract": {
        "id", "domain", "depends_on", "witness", "check", "expected_stdout",
        "non_claims", "language", "canonical_source", "rewrite_source",
        "rewrite_run", "rewrite_tools", "hidden_literal", "expected_functions",
        "expected_call_edges", "expected_imports", "shared_intent",
        "rewrite_markers",
    },
    "unit": {
        "id", "name", "tier", "language", "deps", "loc", "source_paths",
        "runtime", "required_tools", "build", "run",
    },
    "entity": {"id", "kind", "refs", "path", "language", "symbol"},
    "gate": {"id", "required_claims", "required_outcome"},
    "claim": {"id", "statement", "evidence_refs", "verified_by"},
    "artifact": {"id", "path", "kind"},
}


class _ParseState:
    def __init__(self):
        self.issues: List[BundleIssue] = []
        self.warnings: List[str] = []

    def warn_unknown_keys(self, file: str, table: str, raw: dict) -> None:
        extra = set(raw) - _KNOWN_KEYS[table]
        for key in sorted(extra):
            self.warnings.append(f"{file}: unknown key {key!r} in [[{table}]]")


def _require_unique(ids: List[str], file: str, what: str, state: _ParseState) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            state.issues.append(parse_error(file, f"duplicate {what} id: {i!r}"))
        seen.add(i)


def _load_toml(name: str, root: Path, reader: Reader, state: _ParseState) -> Optional[dict]:
    path = root / name
    try:
        raw = reader(path)
    except FileNotFoundError:
        state.issues.append(missing_file(name))
        return None
    try:
        return tomli.loads(raw.decode("utf-8"))
    except (tomli.TOMLDecodeError, UnicodeDecodeError) as exc:
        state.issues.append(parse_error(name, str(exc)))
        return None


def _parse_contracts(doc: dict, state: _ParseState) -> ContractDecl:
    contracts = []
    for raw in doc.get("contract", []):
        state.warn_unknown_keys(CONTRACTS_FILE, "contract", raw)
        expected = raw.get("expected_stdout")
        contracts.append(Contract(
            id=raw.get("id", ""),
            domain=raw.get("domain", ""),
            depends_on=tuple(raw.get("depends_on", [])),
            witness=raw.get("witness", "runtime-suite"),
            check=raw.get("check", ""),
            expected_stdout=expected.encode("utf-8") if expected is not None else None,
            non_claims=tuple(raw.get("non_claims", [])),
            language=raw.get("language", ""),
            canonical_source=normalize_rel(raw["canonical_source"]) if raw.get("canonical_source") else "",
            rewrite_source=normalize_rel(raw["rewrite_source"]) if raw.get("rewrite_source") else "",
            rewrite_run=tuple(raw.get("rewrite_run", [])),
            rewrite_tools=tuple(raw.get("rewrite_tools", [])),
            hidden_literal=raw.get("hidden_literal", ""),
            expected_functions=tuple(raw.get("expected_functions", [])),
            expected_call_edges=tuple(tuple(e) for e in raw.get("expected_call_edges", [])),
            expected_imports=tuple(raw.get("expected_imports", [])),
            shared_intent=tuple(raw.get("shared_intent", [])),
            rewrite_markers=tuple(raw.get("rewrite_markers", [])),
        ))
    _require_unique([c.id for c in contracts], CONTRACTS_FILE, "contract", state)
    ids = {c.id for c in contracts}
    for c in contracts:
        if c.witness not in WITNESS_KINDS:
            state.issues.append(parse_error(
                CONTRACTS_FILE, f"contract {c.id}: unknown witness kind {c.witness!r}"))
        for dep in c.depends_on:
            if dep not in ids:
                state.issues.append(dangling_ref(CONTRACTS_FILE, dep, f"contract {c.id}"))
    _check_contract_dep_cycles(contracts, state)
    return ContractDecl(tuple(contracts))


def _check_contract_dep_cycles(contracts: List[Contract], state: _ParseState) -> None:
    deps = {c.id: [d for d in c.depends_on] for c in contracts}
    visiting: Set[str] = set()
    done: Set[str] = set()

    def visit(cid: str) -> bool:
        if cid in done:
            return True
        if cid in visiting:
            return False
        visiting.add(cid)
        for d in deps.get(cid, []):
            if not visit(d):
                return False
        visiting.discard(cid)
        done.add(cid)
        return True

    for cid in deps:
        if not visit(cid):
            state.issues.append(parse_error(
                CONTRACTS_FILE, f"contract dependency cycle involving {cid!r}"))
            return


def _parse_dag(doc: dict, state: _ParseState) -> DagDecl:
    units = []
    for raw in doc.get("unit", []):
        state.warn_unknown_keys(DAG_FILE, "unit", raw)
        units.append(Unit(
            id=raw.get("id", ""),
            name=raw.get("name", ""),
            tier=int(raw.get("tier", 1)),
            language=raw.get("language", ""),
            deps=tuple(raw.get("deps", [])),
            loc=int(raw.get("loc", 0)),
            source_paths=tuple(normalize_rel(p) for p in raw.get("source_paths", [])),
            runtime=bool(raw.get("runtime", False)),
            required_tools=tuple(raw.get("required_tools", [])),
            build=tuple(tuple(step) for step in raw.get("build", [])),
            run=tuple(raw.get("run", [])),
        ))
    _require_unique([u.id for u in units], DAG_FILE, "unit", state)
    ids = {u.id for u in units}
    for u in units:
        if u.loc < 0:
            state.issues.append(parse_error(DAG_FILE, f"unit {u.id}: negative loc"))
        for dep in u.deps:
            if dep not in ids:
                state.issues.append(dangling_ref(DAG_FILE, dep, f"unit {u.id}"))

    computed = None
    raw_computed = doc.get("computed")
    if raw_computed is not None:
        try:
            layer_counts = tuple(sorted(
                (int(k), int(v)) for k, v in raw_computed.get("layer_counts", {}).items()))
            computed = ComputedValues(
                unit_count=int(raw_computed["unit_count"]),
                layer_counts=layer_counts,
                entry_points=tuple(sorted(raw_computed.get("entry_points", []))),
                leaf_nodes=tuple(sorted(raw_computed.get("leaf_nodes", []))),
                critical_path=tuple(raw_computed.get("critical_path", [])),
                critical_path_loc=int(raw_computed["critical_path_loc"]),
            )
        except (KeyError, ValueError) as exc:
            state.issues.append(parse_error(DAG_FILE, f"bad [computed] table: {exc}"))
    return DagDecl(tuple(units), computed)


def _parse_trace(doc: dict, state: _ParseState) -> TraceDecl:
    entities = []
    for raw in doc.get("entity", []):
        state.warn_unknown_keys(TRACE_FILE, "entity", raw)
        entities.append(Entity(
            id=raw.get("id", ""),
            kind=raw.get("kind", ""),
            refs=tuple(raw.get("refs", [])),
            path=normalize_rel(raw["path"]) if raw.get("path") else None,
            language=raw.get("language", ""),
            symbol=raw.get("symbol", ""),
        ))
    _require_unique([e.id for e in entities], TRACE_FILE, "entity", state)
    ids = {e.id for e in entities}
    for e in entities:
        if e.kind not in ENTITY_KINDS:
            state.issues.append(parse_error(TRACE_FILE, f"entity {e.id}: unknown kind {e.kind!r}"))
        for ref in e.refs:
            if ref not in ids:
                state.issues.append(dangling_ref(TRACE_FILE, ref, f"entity {e.id}"))
    return TraceDecl(tuple(entities))


def _parse_readiness(doc: dict, state: _ParseState) -> ReadinessDecl:
    gates = []
    for raw in doc.get("gate", []):
        state.warn_unknown_keys(READINESS_FILE, "gate", raw)
        gates.append(Gate(
            id=raw.get("id", ""),
            required_claims=tuple(raw.get("required_claims", [])),
            required_outcome=raw.get("required_outcome", "PASS"),
        ))
    _require_unique([g.id for g in gates], READINESS_FILE, "gate", state)
    return ReadinessDecl(tuple(gates))


def _parse_evidence(doc: dict, state: _ParseState) -> EvidenceDecl:
    claims = []
    for raw in doc.get("claim", []):
        state.warn_unknown_keys(EVIDENCE_FILE, "claim", raw)
        claims.append(Claim(
            id=raw.get("id", ""),
            statement=raw.get("statement", ""),
            evidence_refs=tuple(raw.get("evidence_refs", [])),
            verified_by=tuple(raw.get("verified_by", [])),
        ))
    artifacts = []
    for raw in doc.get("artifact", []):
        state.warn_unknown_keys(EVIDENCE_FILE, "artifact", raw)
        artifacts.append(EvidenceArtifact(
            id=raw.get("id", ""),
            path=normalize_rel(raw.get("path", "")),
            kind=raw.get("kind", ""),
        ))
    _require_unique([c.id for c in claims], EVIDENCE_FILE, "claim", state)
    _require_unique([a.id for a in artifacts], EVIDENCE_FILE, "artifact", state)
    artifact_ids = {a.id for a in artifacts}
    for c in claims:
        if not c.evidence_refs:
            state.issues.append(parse_error(EVIDENCE_FILE, f"claim {c.id}: no evidence refs"))
        for ref in c.evidence_refs:
            if ref not in artifact_ids:
                state.issues.append(dangling_ref(EVIDENCE_FILE, ref, f"claim {c.id}"))
    return EvidenceDecl(tuple(claims), tuple(artifacts))


def _cross_check(contracts: ContractDecl, readiness: ReadinessDecl,
                 evidence: EvidenceDecl, state: _ParseState) -> None:
    claim_ids = {c.id for c in evidence.claims}
    for gate in readiness.gates:
        for claim in gate.required_claims:
            if claim not in claim_ids:
                state.issues.append(dangling_ref(READINESS_FILE, claim, f"gate {gate.id}"))


def parse_bundle(root, reader: Optional[Reader] = None) -> ProofBundle:
    """Parse the five declaration files under root into a ProofBundle.

    Raises BundleParseError carrying the full structured issue list when
    anything is missing, malformed, or dangling; never returns a partially
    valid bundle. Each declaration file is read exactly once. ``reader`` is
    injectable for tests (defaults to the filesystem).
    """
    root = Path(root)
    reader = reader or _default_reader
    state = _ParseState()

    docs = {name: _load_toml(name, root, reader, state) for name in DECLARATION_FILES}

    contracts = _parse_contracts(docs[CONTRACTS_FILE] or {}, state)
    dag = _parse_dag(docs[DAG_FILE] or {}, state)
    trace = _parse_trace(docs[TRACE_FILE] or {}, state)
    readiness = _parse_readiness(docs[READINESS_FILE] or {}, state)
    evidence = _parse_evidence(docs[EVIDENCE_FILE] or {}, state)
    _cross_check(contracts, readiness, evidence, state)

    if state.issues:
        raise BundleParseError(state.issues)
    return ProofBundle(
        root=root,
        contracts=contracts,
        dag=dag,
        trace=trace,
        readiness=readiness,
        evidence=evidence,
        warnings=tuple(state.warnings),
    )


@dataclass(frozen=True)
class PathRow:
    owner: str  # entity, artifact, unit, or contract id
    path: str
    exists: bool


def resolve_paths(bundle: ProofBundle) -> List[PathRow]:
    """One row per declared relative path; exists reflects the filesystem now.

    Absence is data here, not an error.
    """
    rows: List[PathRow] = []

    def probe(owner: str, rel: str) -> None:
        rows.append(PathRow(owner, rel, (bundle.root / rel).is_file()))

    for unit in bundle.dag.units:
        for rel in unit.source_paths:
            probe(unit.id, rel)
    for entity in bundle.trace.entities:
        if entity.path:
            probe(entity.id, entity.path)
    for artifact in bundle.evidence.artifacts:
        if artifact.path:
            probe(artifact.id, artifact.path)
    for contract in bundle.contracts.contracts:
        for rel in (contract.canonical_source, contract.rewrite_source):
            if rel:
                probe(contract.id, rel)
    return rows


def _contract_to_dict(c: Contract) -> dict:
    out: dict = {"id": c.id, "domain": c.domain, "depends_on": list(c.depends_on),
                 "witness": c.witness}
    if c.check:
        out["check"] = c.check
    if c.expected_stdout is not None:
        out["expected_stdout"] = c.expected_stdout.decode("utf-8")
    if c.non_claims:
        out["non_claims"] = list(c.non_claims)
    for key in ("language", "canonical_source", "rewrite_source", "hidden_literal"):
        value = getattr(c, key)
        if value:
            out[key] = value
    for key in ("rewrite_run", "rewrite_tools", "expected_functions",
                "expected_imports", "shared_intent", "rewrite_markers"):
        value = getattr(c, key)
        if value:
            out[key] = list(value)
    if c.expected_call_edges:
        out["expected_call_edges"] = [list(e) for e in c.expected_call_edges]
    return out


def _unit_to_dict(u: Unit) -> dict:
    out: dict = {"id": u.id, "name": u.name, "tier": u.tier, "language": u.language,
                 "deps": list(u.deps), "loc": u.loc, "source_paths": list(u.source_paths)}
    if u.runtime:
        out["runtime"] = True
    if u.required_tools:
        out["required_tools"] = list(u.required_tools)
    if u.build:
        out["build"] = [list(step) for step in u.build]
    if u.run:
        out["run"] = list(u.run)
    return out


def serialize_bundle(bundle: ProofBundle) -> Dict[str, str]:
    """Render the five declaration files back to TOML text, keyed by filename.

    Reparsing the result yields a model equal to the input (round-trip
    property); used by tests, not by the validators.
    """
    import toml

    docs: Dict[str, dict] = {
        CONTRACTS_FILE: {"contract": [_contract_to_dict(c) for c in bundle.contracts.contracts]},
        DAG_FILE: {"unit": [_unit_to_dict(u) for u in bundle.dag.units]},
        TRACE_FILE: {"entity": []},
        READINESS_FILE: {"gate": [
            {"id": g.id, "required_claims": list(g.required_claims),
             "required_outcome": g.required_outcome}
            for g in bundle.readiness.gates]},
        EVIDENCE_FILE: {
            "claim": [
                {"id": c.id, "statement": c.statement,
                 "evidence_refs": list(c.evidence_refs),
                 **({"verified_by": list(c.verified_by)} if c.verified_by else {})}
                for c in bundle.evidence.claims],
            "artifact": [
                {"id": a.id, "path": a.path, "kind": a.kind}
                for a in bundle.evidence.artifacts],
        },
    }
    for e in bundle.trace.entities:
        row: dict = {"id": e.id, "kind": e.kind, "refs": list(e.refs)}
        if e.path:
            row["path"] = e.path
        if e.language:
            row["language"] = e.language
        if e.symbol:
            row["symbol"] = e.symbol
        docs[TRACE_FILE]["entity"].append(row)

    computed = bundle.dag.declared_computed
    if computed is not None:
        docs[DAG_FILE]["computed"] = {
            "unit_count": computed.unit_count,
            "layer_counts": {str(k): v for k, v in computed.layer_counts},
            "entry_points": list(computed.entry_points),
            "leaf_nodes": list(computed.leaf_nodes),
            "critical_path": list(computed.critical_path),
            "critical_path_loc": computed.critical_path_loc,
        }
    return {name: toml.dumps(doc) for name, doc in docs.items()}
