"""Acceptance suite: one test per criterion, hermetic via stub toolchains.

Each test prints a single PASS line on success; pytest itself reports FAIL
lines. Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import json
import random
import string

import pytest

from proofkit.cli import main as cli_main
from proofkit.conformance import bundled_rules_dir, conformance_check
from proofkit.dagcheck import critical_path, reconcile
from proofkit.errors import UnsupportedLanguage
from proofkit.harness import HELLO_BYTES, ExpectedOutput, check_c01, execute_candidate, run_suite
from proofkit.model import DECLARATION_FILES, DagDecl, Unit, parse_bundle
from proofkit.outcomes import ReportRow, Status, failed
from proofkit.report import (
    EvidenceReport,
    build_evidence_report,
    emit_report,
    evaluate_gate,
    run_rewrite_witness,
)
from proofkit.rewrite import check_code_symbols, extract_symbols
from proofkit.symbols import SUPPORTED_LANGUAGES
from proofkit.toolchain import ManifestResolver

from conftest import FIXTURE_ROOT, write_stub
from oracles import enumerate_critical_path


def ok(number, text):
    print(f"criterion {number:02d}: PASS — {text}")


@pytest.fixture
def bundle():
    return parse_bundle(FIXTURE_ROOT)


def test_criterion_01_runtime_witness_reproduction(bundle, hermetic_resolver, tmp_path):
    suite = run_suite(bundle, hermetic_resolver, tmp_path)
    assert suite.summary.line() == "5 pass, 1 skip, 0 fail"
    assert suite.exit_code == 0
    java = suite.summary.per_unit["U04"]
    assert java.status is Status.SKIP
    assert "javac" in java.reason and "java" in java.reason
    ok(1, "witness run reports 5 pass, 1 skip, 0 fail; Java SKIP lists javac and java")


def test_criterion_02_dag_computed_values(bundle):
    assert len(bundle.dag.units) == 9
    diffs = reconcile(bundle.dag.declared_computed, bundle.dag)
    assert diffs == []
    declared = bundle.dag.declared_computed
    assert dict(declared.layer_counts) == {0: 8, 1: 1}
    assert set(declared.entry_points) == {
        "U01", "U02", "U03", "U04", "U05", "U07", "U08", "U09"}
    assert set(declared.leaf_nodes) == {"U06", "U07", "U09"}
    assert tuple(declared.critical_path) == ("U05", "U06")
    assert declared.critical_path_loc == 138
    ok(2, "DAG reconciles with zero diffs against all declared computed values")


def test_criterion_03_critical_path_oracle_equivalence():
    rng = random.Random(20260823)
    pool = [a + b for a in string.ascii_uppercase[:6] for b in string.digits]
    mismatches = 0
    for _ in range(200):
        n = rng.randint(1, 10)
        ids = rng.sample(pool, n)
        order = list(ids)
        rng.shuffle(order)
        spec = {}
        for index, uid in enumerate(order):
            deps = [d for d in order[:index] if rng.random() < 0.35]
            spec[uid] = (deps, rng.randint(1, 50))
        dag = DagDecl(tuple(Unit(id=u, name=u, deps=tuple(d), loc=l)
                            for u, (d, l) in spec.items()))
        expected = enumerate_critical_path(
            list(spec), {u: d for u, (d, _) in spec.items()},
            {u: l for u, (_, l) in spec.items()})
        result = critical_path(dag)
        if (result.path, result.total_loc) != expected:
            mismatches += 1
    assert mismatches == 0
    ok(3, "critical path equals exhaustive enumeration on 200 random DAGs")


def test_criterion_04_newline_audit_regression(tmp_path):
    short = write_stub(tmp_path, "short", "#!/bin/sh\nprintf 'Hello, world!'\n")
    full = write_stub(tmp_path, "full", "#!/bin/sh\nprintf 'Hello, world!\\n'\n")
    resolver = ManifestResolver({"short": str(short), "full": str(full)})
    record_short = execute_candidate(["short"], tmp_path / "w1", cwd=tmp_path,
                                     resolver=resolver)
    assert record_short.stdout_path.stat().st_size == 13
    outcome = check_c01(record_short, ExpectedOutput(HELLO_BYTES))
    assert outcome.status is Status.FAIL and outcome.reason == "stdout-mismatch"
    record_full = execute_candidate(["full"], tmp_path / "w2", cwd=tmp_path,
                                    resolver=resolver)
    assert record_full.stdout_path.stat().st_size == 14
    ok(4, "file-based capture preserves trailing bytes (13 stays 13, 14 stays 14)")


MUTANTS = [
    ("#!/bin/sh\nprintf 'Hello, world!'\n", "C01", "stdout-mismatch"),
    ("#!/bin/sh\nprintf '\\357\\273\\277Hello, world!\\n'\n", "C04", "bom"),
    ("#!/bin/sh\nprintf '\\033[31m'\nprintf 'Hello, world!\\n'\n", "C03", "ansi-escape"),
    ("#!/bin/sh\nprintf 'Hello, world!\\n'\nprintf 'x' >&2\n", "C01", "stderr-nonempty"),
    ("#!/bin/sh\nprintf 'Hello, world!\\n'\nexit 3\n", "C01", "exit-code"),
]


def _mutant_bundle(tmp_path, body, tag):
    root = tmp_path / f"bundle-{tag}"
    root.mkdir()
    (root / "contract_declaration.toml").write_text(
        '[[contract]]\nid = "C01"\nwitness = "runtime-suite"\ncheck = "byte-exact"\n'
        'expected_stdout = "Hello, world!\\n"\n'
        '[[contract]]\nid = "C02"\ndepends_on = ["C01"]\nwitness = "runtime-suite"\ncheck = "encoding"\n'
        '[[contract]]\nid = "C03"\ndepends_on = ["C01"]\nwitness = "runtime-suite"\ncheck = "no-markup"\n'
        '[[contract]]\nid = "C04"\ndepends_on = ["C01"]\nwitness = "runtime-suite"\ncheck = "no-bom"\n')
    (root / "implementation_dag.toml").write_text(
        '[[unit]]\nid = "U1"\nname = "stub"\nruntime = true\n'
        'required_tools = ["stub"]\nrun = ["stub"]\n')
    for name in ("traceability.toml", "review_readiness.toml", "evidence_matrix.toml"):
        (root / name).write_text("")
    stub = write_stub(tmp_path, f"stub-{tag}", body)
    return parse_bundle(root), ManifestResolver({"stub": str(stub)})


def test_criterion_05_mutation_kill_suite(tmp_path):
    killed = 0
    for index, (body, contract, reason) in enumerate(MUTANTS):
        bundle, resolver = _mutant_bundle(tmp_path, body, str(index))
        suite = run_suite(bundle, resolver, tmp_path / f"work{index}")
        outcome = {row.check: row.outcome for row in suite.rows}[contract]
        assert outcome.status is Status.FAIL and outcome.reason == reason, (contract, reason)
        killed += 1
    assert killed == 5
    bundle, resolver = _mutant_bundle(tmp_path, "#!/bin/sh\nprintf 'Hello, world!\\n'\n", "clean")
    suite = run_suite(bundle, resolver, tmp_path / "work-clean")
    assert all(row.outcome.status is Status.PASS for row in suite.rows)
    ok(5, "5/5 mutants killed with correct reason clauses; clean stub passes")


def test_criterion_06_go_rewrite_witness(bundle, hermetic_resolver, tmp_path, bundle_copy):
    contract = bundle.contracts.by_id()["C05"]
    result = run_rewrite_witness(bundle, contract, hermetic_resolver, tmp_path)
    assert result.summary.line() == "8 pass, 0 skip, 0 fail"

    rewrite_path = bundle_copy / "src/go_convoluted/hello.go"
    original = rewrite_path.read_text()
    rewrite_path.write_text(original.replace("buildGreeting", "assembleGreeting"))
    renamed = run_rewrite_witness(parse_bundle(bundle_copy), contract,
                                  hermetic_resolver, tmp_path / "renamed")
    assert renamed.summary.failed >= 1

    rewrite_path.write_text(original + "\n// Hello, world!\n")
    restored = run_rewrite_witness(parse_bundle(bundle_copy), contract,
                                   hermetic_resolver, tmp_path / "restored")
    assert restored.summary.failed >= 1
    ok(6, "Go rewrite passes all 8 checks; rename and literal-restore each fail")


def test_criterion_07_awk_profile_witness(bundle, hermetic_resolver, tmp_path):
    contract = bundle.contracts.by_id()["C06"]
    result = run_rewrite_witness(bundle, contract, hermetic_resolver, tmp_path)
    assert result.summary.line() == "6 pass, 0 skip, 0 fail"
    with pytest.raises(UnsupportedLanguage):
        extract_symbols(b'BEGIN { print "x" }', "awk")
    assert "awk" not in SUPPORTED_LANGUAGES
    ok(7, "AWK profile passes all 6 checks; extract_symbols rejects AWK")


def test_criterion_08_traceability(capsys, bundle_copy):
    def run(*argv):
        try:
            return cli_main(list(argv))
        except SystemExit as exc:
            return exc.code

    code = run("validate", "trace", str(FIXTURE_ROOT), "--check-paths-exist")
    out = capsys.readouterr().out
    assert code == 0 and "30 entities" in out

    (bundle_copy / "src/java/Hello.java").unlink()
    code = run("validate", "trace", str(bundle_copy), "--check-paths-exist")
    err = capsys.readouterr().err
    assert code == 1
    missing_lines = [l for l in err.splitlines() if l.startswith("missing path:")]
    assert len(missing_lines) == 1 and "Hello.java" in missing_lines[0]
    ok(8, "trace validates 30 entities; one deleted file yields exit 1, one row")


def test_criterion_09_code_symbol_counts(bundle):
    result = check_code_symbols(bundle.trace, FIXTURE_ROOT)
    assert (result.matched, result.skipped, len(result.failures)) == (8, 4, 0)
    ok(9, "code symbols: matched=8, skipped=4, failures=0")


def test_criterion_10_conformance_invocation_contract(bundle):
    for name in DECLARATION_FILES:
        bare = conformance_check(FIXTURE_ROOT / name)
        assert bare.outcome.status is Status.FAIL and bare.exit_code == 1
        rooted = conformance_check(FIXTURE_ROOT / name, bundled_rules_dir())
        assert rooted.outcome.status is Status.PASS and rooted.exit_code == 0
    ok(10, "all five declarations FAIL/1 without spec root, PASS/0 with it")


def test_criterion_11_report_determinism_vocabulary_gate(bundle, hermetic_resolver, tmp_path):
    first = build_evidence_report(bundle, hermetic_resolver, tmp_path / "a",
                                  root_label="hello_bundle")
    second = build_evidence_report(bundle, hermetic_resolver, tmp_path / "b",
                                   root_label="hello_bundle")
    assert emit_report(first) == emit_report(second)

    allowed = {"PASS", "SKIP", "FAIL", "MEASURED"}
    document = json.loads(emit_report(first))
    assert {row["status"] for row in document["rows"]} <= allowed
    assert first.gate.decision == "PASS"

    required = set()
    for claim in bundle.evidence.claims:
        required |= set(claim.verified_by)
    for index, row in enumerate(first.rows):
        if row.check not in required:
            continue
        rows = list(first.rows)
        rows[index] = ReportRow(row.check, row.subject, failed("injected"))
        tampered = EvidenceReport(bundle_root="x", rows=rows)
        assert evaluate_gate(bundle.readiness, bundle.evidence, tampered).decision == "FAIL"
    ok(11, "byte-identical reports, closed vocabulary, gate PASS and flip-to-FAIL")
