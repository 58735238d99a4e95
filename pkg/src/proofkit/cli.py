"""Command-line surface for the proof-bundle toolchain.

Exit codes: 0 all executed checks passed (skips permitted), 1 at least one
FAIL or validation violation, 2 usage or configuration error. Human summaries
go to stdout; usage and diagnostics go to stderr so stdout stays
machine-consumable under --quiet.
"""

import argparse
import sys
import tempfile
from pathlib import Path

from . import dagcheck, tracecheck
from .conformance import UsageError, conformance_check
from .errors import BundleParseError
from .model import parse_bundle
from .report import (
    build_evidence_report,
    emit_report,
    rewrite_contracts,
    run_rewrite_witness,
)
from .harness import run_suite
from .toolchain import resolver_from_env


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def _load_bundle(args):
    try:
        return parse_bundle(args.bundle)
    except BundleParseError as exc:
        for issue in exc.issues:
            print(f"{issue.kind}: {issue.file}: {issue.message}", file=sys.stderr)
        raise SystemExit(1)


def cmd_validate_dag(args) -> int:
    bundle = _load_bundle(args)
    cycle = dagcheck.detect_cycles(bundle.dag)
    if cycle is not None:
        print("cycle: " + " -> ".join(cycle), file=sys.stderr)
        return 1
    declared = bundle.dag.declared_computed
    if declared is None:
        print("no [computed] table declared", file=sys.stderr)
        return 1
    diffs = dagcheck.reconcile(declared, bundle.dag)
    if args.strict_loc:
        diffs += dagcheck.recount_loc_diffs(bundle.dag, bundle.root)
    for diff in diffs:
        print(f"{diff.field}: declared {diff.declared!r} != computed {diff.computed!r}",
              file=sys.stderr)
    if diffs:
        return 1
    _say(args, f"Implementation DAG validation passed ({len(bundle.dag.units)} units)")
    return 0


def cmd_validate_trace(args) -> int:
    bundle = _load_bundle(args)
    if args.check_paths_exist:
        report = tracecheck.check_paths_exist(bundle.trace, bundle.root)
    else:
        report = tracecheck.validate_chain(bundle.trace)
    for entity_id, bad_ref in report.dangling:
        print(f"dangling: {entity_id} -> {bad_ref}", file=sys.stderr)
    for entity_id, path in report.missing_paths:
        print(f"missing path: {entity_id} -> {path}", file=sys.stderr)
    if not report.ok:
        return 1
    suffix = " and path checks enabled" if args.check_paths_exist else ""
    _say(args, f"Traceability validation passed with {report.entity_count} entities{suffix}")
    return 0


def cmd_validate_readiness(args) -> int:
    from .report import validate_readiness_rows

    bundle = _load_bundle(args)
    rows = validate_readiness_rows(bundle)
    ok = True
    for row in rows:
        if not row.outcome.is_pass:
            ok = False
            print(f"{row.subject}: {row.outcome.reason}", file=sys.stderr)
    if not ok:
        return 1
    _say(args, "Readiness-gate, contract-declaration, and evidence-matrix files passed")
    return 0


def cmd_validate_conformance(args) -> int:
    try:
        result = conformance_check(args.file, args.spec_root)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    if result.outcome.is_pass:
        _say(args, f"PASS {args.file}")
    else:
        print(f"FAIL {args.file}: {result.outcome.reason}", file=sys.stderr)
    return result.exit_code


def cmd_witness_run(args) -> int:
    bundle = _load_bundle(args)
    resolver = resolver_from_env()
    with tempfile.TemporaryDirectory(prefix="proofkit-run-") as workroot:
        suite = run_suite(bundle, resolver, Path(workroot), timeout=args.timeout)
    for line in suite.human_lines():
        _say(args, line)
    if args.strict_skips and suite.summary.all_skipped:
        print("strict-skips: every unit was skipped", file=sys.stderr)
        return 1
    return suite.exit_code


def cmd_witness_rewrite(args) -> int:
    bundle = _load_bundle(args)
    resolver = resolver_from_env()
    exit_code = 0
    with tempfile.TemporaryDirectory(prefix="proofkit-rewrite-") as workroot:
        for contract in rewrite_contracts(bundle):
            result = run_rewrite_witness(bundle, contract, resolver, Path(workroot),
                                         timeout=args.timeout)
            for name, outcome in result.checks:
                suffix = f" ({outcome.reason})" if outcome.reason else ""
                _say(args, f"{outcome.status.value:<4} {contract.id} {name}{suffix}")
            _say(args, f"{contract.id}: {result.summary.line()}")
            if not result.summary.ok:
                exit_code = 1
    return exit_code


def cmd_report(args) -> int:
    bundle = _load_bundle(args)
    resolver = resolver_from_env()
    with tempfile.TemporaryDirectory(prefix="proofkit-report-") as workroot:
        report = build_evidence_report(
            bundle, resolver, Path(workroot),
            root_label=args.label, check_paths=True, timeout=args.timeout)
    document = emit_report(report, args.format)
    if args.report:
        Path(args.report).write_bytes(document)
        _say(args, f"report written to {args.report}")
    else:
        sys.stdout.buffer.write(document)
    if report.fail_count:
        return 1
    if args.strict_skips and report.summaries["runtime"].all_skipped:
        print("strict-skips: every runtime unit was skipped", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proofkit",
        description="Validate proof bundles and run their executable witnesses.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(p, bundle_arg=True):
        if bundle_arg:
            p.add_argument("bundle", help="bundle root directory")
        p.add_argument("--quiet", action="store_true",
                       help="suppress informational stdout lines")

    validate = subparsers.add_parser("validate", help="structural validators")
    validate_sub = validate.add_subparsers(dest="validator", required=True)

    p = validate_sub.add_parser("dag", help="reconcile declared DAG computed values")
    add_common(p)
    p.add_argument("--strict-loc", action="store_true",
                   help="also recount physical source lines against declared loc")
    p.set_defaults(func=cmd_validate_dag)

    p = validate_sub.add_parser("trace", help="validate the traceability chain")
    add_common(p)
    p.add_argument("--check-paths-exist", action="store_true",
                   help="also require every declared path to exist")
    p.set_defaults(func=cmd_validate_trace)

    p = validate_sub.add_parser("readiness", help="validate gate and evidence files")
    add_common(p)
    p.set_defaults(func=cmd_validate_readiness)

    p = validate_sub.add_parser("conformance", help="structural conformance of one file")
    p.add_argument("file", help="declaration file to check")
    p.add_argument("--spec-root", default=None,
                   help="directory holding conformance rules (required for instance files)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_validate_conformance)

    witness = subparsers.add_parser("witness", help="executable witnesses")
    witness_sub = witness.add_subparsers(dest="witness_kind", required=True)

    p = witness_sub.add_parser("run", help="run the runtime contract suite")
    add_common(p)
    p.add_argument("--strict-skips", action="store_true",
                   help="exit nonzero when every unit was skipped")
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_witness_run)

    p = witness_sub.add_parser("rewrite", help="run the source-analysis witnesses")
    add_common(p)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_witness_rewrite)

    p = subparsers.add_parser("report", help="full evidence report plus gate decision")
    add_common(p)
    p.add_argument("--report", default=None, help="write the report to this path")
    p.add_argument("--format", choices=("human", "machine"), default="machine")
    p.add_argument("--label", default=None,
                   help="bundle label recorded in the report (defaults to the root path)")
    p.add_argument("--strict-skips", action="store_true")
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
