"""Runtime witness harness: byte-exact output contracts with SKIP semantics.

Candidate stdout and stderr are always captured to files and compared
byte-for-byte on disk. In-memory text capture is structurally ruled out here:
shell-style command substitution strips trailing newlines, which is exactly
the defect this comparison path guards against. stderr is judged by file size;
its contents are kept for FAIL diagnostics.
"""

import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .errors import BundleError, SpawnError
from .model import Contract, ProofBundle, Unit
from .outcomes import Outcome, ReportRow, RunSummary, failed, passed, skipped
from .toolchain import probe_toolchain

DEFAULT_TIMEOUT = 30.0  # seconds; a hung candidate is FAIL(timeout), never a hang

# C01 expected bytes for the reference contract: exactly 14 bytes,
# 48 65 6c 6c 6f 2c 20 77 6f 72 6c 64 21 0a.
HELLO_BYTES = b"Hello, world!\n"


@dataclass(frozen=True)
class ExpectedOutput:
    data: bytes


@dataclass(frozen=True)
class ExecutionRecord:
    unit_id: str
    stdout_path: Path
    stderr_path: Path
    stderr_byte_count: int
    exit_code: int

    def stdout_bytes(self) -> bytes:
        return self.stdout_path.read_bytes()


def _substitute(args: Sequence[str], workdir: Path) -> List[str]:
    return [a.replace("{workdir}", str(workdir)) for a in args]


def _resolve_argv(argv: List[str], resolver) -> List[str]:
    head = argv[0]
    if "/" in head:
        return argv  # direct path, e.g. a freshly built binary in the workdir
    located = resolver.resolve(head)
    if located is None:
        raise SpawnError(f"tool not available: {head}")
    return [located] + argv[1:]


def execute_candidate(invocation: Sequence[str], workdir, *, cwd, resolver,
                      unit_id: str = "", capture_prefix: str = "run",
                      timeout: float = DEFAULT_TIMEOUT) -> ExecutionRecord:
    """Run one candidate command with file-backed capture of both streams.

    Raises SpawnError when the process cannot start and
    subprocess.TimeoutExpired on timeout; callers map both to FAIL.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    stdout_path = workdir / f"{capture_prefix}.stdout.bin"
    stderr_path = workdir / f"{capture_prefix}.stderr.bin"
    argv = _resolve_argv(_substitute(invocation, workdir), resolver)
    try:
        with open(stdout_path, "wb") as out_fh, open(stderr_path, "wb") as err_fh:
            proc = subprocess.run(argv, stdout=out_fh, stderr=err_fh,
                                  cwd=str(cwd), timeout=timeout)
    except (FileNotFoundError, PermissionError, NotADirectoryError) as exc:
        raise SpawnError(str(exc)) from exc
    return ExecutionRecord(
        unit_id=unit_id,
        stdout_path=stdout_path,
        stderr_path=stderr_path,
        stderr_byte_count=stderr_path.stat().st_size,
        exit_code=proc.returncode,
    )


def check_c01(record: ExecutionRecord, expected: ExpectedOutput) -> Outcome:
    """Byte-for-byte stdout file comparison, empty stderr, exit 0.

    The reason names the first violated clause in that order.
    """
    if record.stdout_bytes() != expected.data:
        return failed("stdout-mismatch")
    if record.stderr_byte_count != 0:
        return failed("stderr-nonempty")
    if record.exit_code != 0:
        return failed("exit-code")
    return passed()


def check_encoding(stdout_bytes: bytes) -> Outcome:
    """Printable ASCII plus newline only; that byte range implies valid UTF-8."""
    for byte in stdout_bytes:
        if byte != 0x0A and not 0x20 <= byte <= 0x7E:
            return failed("non-ascii")
    return passed()


def check_no_markup(stdout_bytes: bytes, expected_length: int) -> Outcome:
    """No ESC byte anywhere, and no extra bytes beyond the expected length."""
    if 0x1B in stdout_bytes:
        return failed("ansi-escape")
    if len(stdout_bytes) != expected_length:
        return failed("extra-bytes")
    return passed()


def check_no_bom(stdout_bytes: bytes) -> Outcome:
    """First byte must be 0x48; rejects UTF-8 BOM prefixes and empty output."""
    if not stdout_bytes:
        return failed("empty")
    if stdout_bytes.startswith(b"\xef\xbb\xbf"):
        return failed("bom")
    if stdout_bytes[0] != 0x48:
        return failed("first-byte")
    return passed()


def _dependent_check(contract: Contract, stdout_bytes: bytes, expected: bytes) -> Outcome:
    if contract.check == "encoding":
        return check_encoding(stdout_bytes)
    if contract.check == "no-markup":
        return check_no_markup(stdout_bytes, len(expected))
    if contract.check == "no-bom":
        return check_no_bom(stdout_bytes)
    return skipped(f"no checker for contract kind {contract.check!r}")


def runtime_contracts(bundle: ProofBundle) -> List[Contract]:
    return [c for c in bundle.contracts.contracts if c.witness == "runtime-suite"]


def primary_runtime_contract(bundle: ProofBundle) -> Contract:
    for contract in runtime_contracts(bundle):
        if contract.expected_stdout is not None:
            return contract
    raise BundleError("bundle declares no runtime contract with expected output")


def run_unit(unit: Unit, bundle: ProofBundle, resolver, workdir,
             timeout: float = DEFAULT_TIMEOUT) -> Optional[ExecutionRecord]:
    """Build (if declared) and execute one runtime unit.

    Returns None and lets the caller mark FAIL via exceptions; build failures
    raise SpawnError-like conditions translated by run_suite.
    """
    workdir = Path(workdir)
    for index, step in enumerate(unit.build):
        record = execute_candidate(step, workdir, cwd=bundle.root, resolver=resolver,
                                   unit_id=unit.id, capture_prefix=f"build{index}",
                                   timeout=timeout)
        if record.exit_code != 0:
            raise BuildFailed(unit.id, record.exit_code)
    return execute_candidate(unit.run, workdir, cwd=bundle.root, resolver=resolver,
                             unit_id=unit.id, timeout=timeout)


class BuildFailed(Exception):
    def __init__(self, unit_id: str, exit_code: int):
        self.unit_id = unit_id
        self.exit_code = exit_code
        super().__init__(f"build failed for {unit_id} with exit {exit_code}")


def run_suite(bundle: ProofBundle, resolver, workroot, *,
              timeout: float = DEFAULT_TIMEOUT) -> "SuiteRun":
    """Run every runtime unit and evaluate the declared runtime contracts.

    Missing toolchains are SKIP (reason lists the missing commands); SKIP is
    never counted as contract satisfaction. pass+skip+fail equals the number
    of runtime units. Units are processed in id order for determinism.
    """
    primary = primary_runtime_contract(bundle)
    expected = primary.expected_stdout or b""
    dependents = [c for c in runtime_contracts(bundle)
                  if c.id != primary.id and primary.id in c.depends_on]
    workroot = Path(workroot)

    summary = RunSummary()
    rows: List[ReportRow] = []
    units = sorted((u for u in bundle.dag.units if u.runtime), key=lambda u: u.id)
    for unit in units:
        probe = probe_toolchain(unit.required_tools, resolver, unit_id=unit.id)
        if not probe.available:
            outcome = skipped("missing tools: " + ", ".join(probe.missing))
            summary.add(unit.id, outcome)
            rows.append(ReportRow(primary.id, unit.id, outcome))
            for contract in dependents:
                rows.append(ReportRow(contract.id, unit.id, outcome))
            continue

        record = None
        try:
            record = run_unit(unit, bundle, resolver, workroot / unit.id, timeout)
        except SpawnError as exc:
            outcome = failed(f"spawn-error: {exc}")
        except BuildFailed:
            outcome = failed("build-error")
        except subprocess.TimeoutExpired:
            outcome = failed("timeout")
        else:
            outcome = check_c01(record, ExpectedOutput(expected))

        rows.append(ReportRow(primary.id, unit.id, outcome))
        stdout_bytes = record.stdout_bytes() if record is not None else None
        for contract in dependents:
            if stdout_bytes is None:
                rows.append(ReportRow(contract.id, unit.id, outcome))
            else:
                rows.append(ReportRow(
                    contract.id, unit.id,
                    _dependent_check(contract, stdout_bytes, expected)))
        summary.add(unit.id, _unit_outcome(outcome, rows, unit.id))
    return SuiteRun(summary=summary, rows=rows)


def _unit_outcome(primary_outcome: Outcome, rows: List[ReportRow], unit_id: str) -> Outcome:
    # A unit fails if any of its contract rows fail; the primary reason wins.
    if not primary_outcome.is_pass:
        return primary_outcome
    for row in rows:
        if row.subject == unit_id and row.outcome.status.value == "FAIL":
            return row.outcome
    return primary_outcome


@dataclass
class SuiteRun:
    summary: RunSummary
    rows: List[ReportRow]

    @property
    def exit_code(self) -> int:
        return 0 if self.summary.ok else 1

    def human_lines(self) -> List[str]:
        lines = []
        for unit_id, outcome in sorted(self.summary.per_unit.items()):
            suffix = f" ({outcome.reason})" if outcome.reason else ""
            lines.append(f"{outcome.status.value:<4} {unit_id}{suffix}")
        if self.summary.all_skipped:
            lines.append("warning: all units were skipped; nothing was verified")
        lines.append(self.summary.line())
        return lines
