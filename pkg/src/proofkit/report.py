"""Evidence report assembly, readiness-gate evaluation, and report emission.

The machine format is JSON with canonically sorted keys and a trailing
newline, so consecutive runs over the same bundle are byte-identical and the
output is suitable for golden-file comparison. Status vocabulary is closed
over PASS, SKIP, FAIL, MEASURED.
"""

import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from . import dagcheck, tracecheck
from .errors import SpawnError, UnknownClaim
from .harness import (
    DEFAULT_TIMEOUT,
    ExpectedOutput,
    check_c01,
    execute_candidate,
    primary_runtime_contract,
    run_suite,
)
from .model import (
    CONTRACTS_FILE,
    DAG_FILE,
    EVIDENCE_FILE,
    READINESS_FILE,
    TRACE_FILE,
    Contract,
    EvidenceDecl,
    ProofBundle,
    ReadinessDecl,
)
from .outcomes import Outcome, ReportRow, RunSummary, failed, passed, skipped, summarize
from .rewrite import RewriteWitnessResult, SourceProfile, check_profile, check_rewrite_supported
from .toolchain import probe_toolchain

DAG_VALIDATION = "dag-validation"
TRACE_VALIDATION = "trace-validation"
READINESS_VALIDATION = "readiness-validation"


@dataclass
class GateDecision:
    decision: str  # "PASS" | "FAIL"
    unmet_claims: List[str] = field(default_factory=list)


@dataclass
class EvidenceReport:
    bundle_root: str
    rows: List[ReportRow] = field(default_factory=list)
    summaries: Dict[str, RunSummary] = field(default_factory=dict)
    gate: Optional[GateDecision] = None

    @property
    def fail_count(self) -> int:
        return sum(1 for row in self.rows if row.outcome.status.value == "FAIL")


def validate_dag_rows(bundle: ProofBundle) -> List[ReportRow]:
    declared = bundle.dag.declared_computed
    if declared is None:
        return [ReportRow(DAG_VALIDATION, DAG_FILE, failed("no [computed] table declared"))]
    cycle = dagcheck.detect_cycles(bundle.dag)
    if cycle is not None:
        return [ReportRow(DAG_VALIDATION, DAG_FILE,
                          failed("cycle: " + " -> ".join(cycle)))]
    diffs = dagcheck.reconcile(declared, bundle.dag)
    if not diffs:
        return [ReportRow(DAG_VALIDATION, DAG_FILE, passed())]
    return [ReportRow(DAG_VALIDATION, DAG_FILE,
                      failed(f"{d.field}: declared {d.declared!r} != computed {d.computed!r}"))
            for d in diffs]


def validate_trace_rows(bundle: ProofBundle, check_paths: bool = True) -> List[ReportRow]:
    if check_paths:
        trace_report = tracecheck.check_paths_exist(bundle.trace, bundle.root)
    else:
        trace_report = tracecheck.validate_chain(bundle.trace)
    rows: List[ReportRow] = []
    for entity_id, bad_ref in trace_report.dangling:
        rows.append(ReportRow(TRACE_VALIDATION, TRACE_FILE,
                              failed(f"entity {entity_id}: bad ref {bad_ref}")))
    for entity_id, path in trace_report.missing_paths:
        rows.append(ReportRow(TRACE_VALIDATION, TRACE_FILE,
                              failed(f"entity {entity_id}: missing path {path}")))
    if not rows:
        rows.append(ReportRow(TRACE_VALIDATION, TRACE_FILE, passed()))
    return rows


def validate_readiness_rows(bundle: ProofBundle) -> List[ReportRow]:
    """Structural checks over the readiness gate and evidence matrix files."""
    rows: List[ReportRow] = []
    claim_ids = {c.id for c in bundle.evidence.claims}
    problems_by_file: Dict[str, List[str]] = {
        READINESS_FILE: [], EVIDENCE_FILE: [], CONTRACTS_FILE: []}

    if not bundle.readiness.gates:
        problems_by_file[READINESS_FILE].append("no gate declared")
    for gate in bundle.readiness.gates:
        if gate.required_outcome != "PASS":
            problems_by_file[READINESS_FILE].append(
                f"gate {gate.id}: required_outcome must be PASS")
        for claim in gate.required_claims:
            if claim not in claim_ids:
                problems_by_file[READINESS_FILE].append(
                    f"gate {gate.id}: unknown claim {claim}")
    artifact_ids = bundle.evidence.artifact_ids()
    for claim in bundle.evidence.claims:
        if not claim.evidence_refs:
            problems_by_file[EVIDENCE_FILE].append(f"claim {claim.id}: no evidence refs")
        for ref in claim.evidence_refs:
            if ref not in artifact_ids:
                problems_by_file[EVIDENCE_FILE].append(
                    f"claim {claim.id}: unknown artifact {ref}")
    if not bundle.contracts.contracts:
        problems_by_file[CONTRACTS_FILE].append("no contracts declared")

    for file_name in (READINESS_FILE, CONTRACTS_FILE, EVIDENCE_FILE):
        problems = problems_by_file[file_name]
        outcome = passed() if not problems else failed("; ".join(problems))
        rows.append(ReportRow(READINESS_VALIDATION, file_name, outcome))
    return rows


def _rewrite_c01_runner(bundle: ProofBundle, contract: Contract, resolver, workdir,
                        timeout: float):
    expected = primary_runtime_contract(bundle).expected_stdout or b""

    def runner() -> Outcome:
        probe = probe_toolchain(contract.rewrite_tools, resolver, unit_id=contract.id)
        if not probe.available:
            return skipped("missing tools: " + ", ".join(probe.missing))
        try:
            record = execute_candidate(contract.rewrite_run, workdir, cwd=bundle.root,
                                       resolver=resolver, unit_id=contract.id,
                                       timeout=timeout)
        except SpawnError as exc:
            return failed(f"spawn-error: {exc}")
        except subprocess.TimeoutExpired:
            return failed("timeout")
        return check_c01(record, ExpectedOutput(expected))

    return runner


def run_rewrite_witness(bundle: ProofBundle, contract: Contract, resolver, workroot,
                        timeout: float = DEFAULT_TIMEOUT) -> RewriteWitnessResult:
    """Run one declared source-analysis witness (supported or profile-based)."""
    workroot = Path(workroot)
    canonical = (bundle.root / contract.canonical_source).read_bytes()
    rewritten = (bundle.root / contract.rewrite_source).read_bytes()
    runner = _rewrite_c01_runner(bundle, contract, resolver,
                                 workroot / contract.id, timeout)
    if contract.witness == "go-rewrite":
        return check_rewrite_supported(
            canonical, rewritten, contract.language, runner,
            hidden_literal=contract.hidden_literal.encode("utf-8"),
            expected_functions=contract.expected_functions,
            expected_call_edges=contract.expected_call_edges,
            expected_imports=contract.expected_imports)
    profile = SourceProfile(
        hidden_literals=(contract.hidden_literal.encode("utf-8"),),
        shared_intent=tuple(p.encode("utf-8") for p in contract.shared_intent),
        rewrite_markers=tuple(p.encode("utf-8") for p in contract.rewrite_markers))
    return check_profile(canonical, rewritten, profile, runner)


def rewrite_contracts(bundle: ProofBundle) -> List[Contract]:
    return [c for c in bundle.contracts.contracts
            if c.witness in ("go-rewrite", "source-profile")]


def build_evidence_report(bundle: ProofBundle, resolver, workroot, *,
                          root_label: Optional[str] = None,
                          check_paths: bool = True,
                          timeout: float = DEFAULT_TIMEOUT) -> EvidenceReport:
    """Run every suite and validator over the bundle and assemble the report."""
    workroot = Path(workroot)
    report = EvidenceReport(bundle_root=root_label or str(bundle.root))

    suite = run_suite(bundle, resolver, workroot / "runtime", timeout=timeout)
    report.rows.extend(suite.rows)
    report.summaries["runtime"] = suite.summary

    for contract in rewrite_contracts(bundle):
        result = run_rewrite_witness(bundle, contract, resolver, workroot, timeout)
        for name, outcome in result.checks:
            report.rows.append(ReportRow(contract.id, name, outcome))
        report.summaries[contract.id] = result.summary

    validator_rows = (validate_dag_rows(bundle)
                      + validate_trace_rows(bundle, check_paths)
                      + validate_readiness_rows(bundle))
    report.rows.extend(validator_rows)
    report.summaries["validators"] = summarize(
        [(f"{row.check}:{row.subject}", row.outcome) for row in validator_rows])

    report.gate = evaluate_gate(bundle.readiness, bundle.evidence, report)
    return report


def evaluate_gate(readiness: ReadinessDecl, evidence: EvidenceDecl,
                  report: EvidenceReport) -> GateDecision:
    """PASS iff every required claim's evidence rows contain no FAIL and at
    least one PASS. SKIP rows are never evidence, but they do not falsify a
    claim that other rows substantiate.
    """
    claims = {c.id: c for c in evidence.claims}
    unmet: List[str] = []
    for gate in readiness.gates:
        for claim_id in gate.required_claims:
            claim = claims.get(claim_id)
            if claim is None:
                raise UnknownClaim(claim_id)
            rows = [row for row in report.rows if row.check in claim.verified_by]
            statuses = [row.outcome.status.value for row in rows]
            if not rows or "FAIL" in statuses or "PASS" not in statuses:
                unmet.append(claim_id)
    unmet = sorted(set(unmet))
    return GateDecision("PASS" if not unmet else "FAIL", unmet)


def emit_report(report: EvidenceReport, format: str = "machine") -> bytes:
    """Serialize the report; machine output is deterministic byte-for-byte."""
    if format == "machine":
        doc = {
            "bundle_root": report.bundle_root,
            "rows": [
                {"check": row.check, "subject": row.subject,
                 "status": row.outcome.status.value, "reason": row.outcome.reason}
                for row in report.rows],
            "summaries": {
                name: {"pass": s.passed, "skip": s.skipped, "fail": s.failed}
                for name, s in report.summaries.items()},
            "gate": ({"decision": report.gate.decision,
                      "unmet_claims": report.gate.unmet_claims}
                     if report.gate else None),
        }
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if format == "human":
        lines = [f"bundle: {report.bundle_root}"]
        for row in report.rows:
            suffix = f" ({row.outcome.reason})" if row.outcome.reason else ""
            lines.append(f"{row.outcome.status.value:<4} {row.check} {row.subject}{suffix}")
        for name in sorted(report.summaries):
            lines.append(f"{name}: {report.summaries[name].line()}")
        if report.gate:
            gate_line = f"gate: {report.gate.decision}"
            if report.gate.unmet_claims:
                gate_line += " (unmet: " + ", ".join(report.gate.unmet_claims) + ")"
            lines.append(gate_line)
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format: {format}")
