"""Operator command line: validate, replay, bench, serve.

Exit codes follow one convention across subcommands: 0 success, 1 domain
failure (invalid catalog, failed replay, missed budget), 2 usage or IO
failure (missing files, malformed replay lines, bad arguments).
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .catalog import Catalog, CatalogParseError, load_catalog
from .replay import ReplayFormatError, golden_sequence, parse_replay, run_replay
from .session import LogicalClock, Mode, TaskError, start_task

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_BUDGET_MS = 1000.0 / 90.0  # one action per frame at 90fps


@dataclass(frozen=True)
class BenchReport:
    actions_executed: int
    median_latency_ms: float
    p99_latency_ms: float
    max_latency_ms: float
    budget_ms: float

    @property
    def passed(self) -> bool:
        return (self.median_latency_ms < self.budget_ms
                and self.p99_latency_ms < 2 * self.budget_ms)

    def as_dict(self) -> dict:
        return {
            "actions_executed": self.actions_executed,
            "median_latency_ms": self.median_latency_ms,
            "p99_latency_ms": self.p99_latency_ms,
            "max_latency_ms": self.max_latency_ms,
            "budget_ms": self.budget_ms,
            "passed": self.passed,
        }


def _fail(message: str, code: int) -> int:
    print(message, file=sys.stderr)
    return code


def _load(directory: Path) -> Catalog | int:
    """Load and validate a catalog directory, or return an exit code."""
    try:
        catalog, report = load_catalog(directory)
    except FileNotFoundError as exc:
        return _fail(f"error: {exc.filename or exc}", EXIT_USAGE)
    except CatalogParseError as exc:
        for issue in exc.issues:
            print(str(issue), file=sys.stderr)
        return EXIT_DOMAIN
    if not report.ok:
        for issue in report.errors:
            print(str(issue), file=sys.stderr)
        return EXIT_DOMAIN
    return catalog


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(directory: Path, as_json: bool) -> int:
    try:
        catalog, report = load_catalog(directory)
    except FileNotFoundError as exc:
        return _fail(f"error: {exc.filename or exc}", EXIT_USAGE)
    except CatalogParseError as exc:
        if as_json:
            issues = [{"code": "PARSE_ERROR", "file": i.file, "row": i.row,
                       "detail": i.message} for i in exc.issues]
            print(json.dumps({"ok": False, "errors": issues, "warnings": []}, indent=2))
        else:
            for issue in exc.issues:
                print(str(issue))
        return EXIT_DOMAIN

    if as_json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        for issue in report.errors + report.warnings:
            print(str(issue))
        counts = (f"{len(catalog.tools)} tools, {len(catalog.parts)} parts, "
                  f"{len(catalog.plans)} tasks")
        print(f"{'ok' if report.ok else 'invalid'}: {counts}, "
              f"{len(report.errors)} errors, {len(report.warnings)} warnings")
    return EXIT_OK if report.ok else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def _describe(action) -> str:
    bits = [action.op]
    if action.base:
        bits.append(f"base={action.base}")
    if action.attachment:
        bits.append(f"attachment={action.attachment}")
    if action.tool:
        bits.append("tool=" + "+".join(action.tool))
    if action.part:
        bits.append(action.part)
    if action.torque is not None:
        bits.append(f"torque={action.torque}")
    return " ".join(bits)


def cmd_replay(directory: Path, task_id: str, mode: Mode, replay_file: Path) -> int:
    catalog = _load(directory)
    if isinstance(catalog, int):
        return catalog
    try:
        text = replay_file.read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(f"error: {exc}", EXIT_USAGE)
    try:
        actions = parse_replay(text)
    except ReplayFormatError as exc:
        return _fail(f"error: {exc}", EXIT_USAGE)

    try:
        result = run_replay(catalog, task_id, mode, actions, clock=LogicalClock())
    except TaskError as exc:
        return _fail(f"error: {exc.code}: {exc.detail}", EXIT_DOMAIN)

    for number, (action, outcome) in enumerate(zip(actions, result.outcomes), start=1):
        line = f"{number:3d} {_describe(action)} -> {outcome.kind}"
        if outcome.step_index is not None:
            line += f" step={outcome.step_index}"
        if outcome.error is not None:
            line += f" [{outcome.error['code']}]"
        print(line)

    if not result.submitted:
        return _fail("session not submitted", EXIT_DOMAIN)
    print(json.dumps({"scorecard": result.scorecard.as_dict()}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def run_bench(catalog: Catalog, task_id: str, iterations: int,
              budget_ms: float = DEFAULT_BUDGET_MS) -> BenchReport:
    """Replay the golden sequence repeatedly, timing each action."""
    actions = golden_sequence(catalog, task_id)
    latencies: list[float] = []
    reference: list[str] | None = None
    for _ in range(iterations):
        session = start_task(catalog, task_id, Mode.TRAINING, clock=LogicalClock())
        kinds: list[str] = []
        for action in actions:
            started = time.perf_counter()
            if action.op == "submit":
                session.submit()
                kinds.append("submitted")
            else:
                kinds.append(session.handle_action(action).kind)
            latencies.append((time.perf_counter() - started) * 1000.0)
        if reference is None:
            reference = kinds
        elif kinds != reference:
            raise AssertionError("bench replay diverged between iterations")
    return BenchReport(
        actions_executed=len(latencies),
        median_latency_ms=statistics.median(latencies),
        p99_latency_ms=statistics.quantiles(latencies, n=100)[98],
        max_latency_ms=max(latencies),
        budget_ms=budget_ms,
    )


def cmd_bench(directory: Path, task_id: str, iterations: int, budget_ms: float) -> int:
    catalog = _load(directory)
    if isinstance(catalog, int):
        return catalog
    try:
        report = run_bench(catalog, task_id, iterations, budget_ms)
    except TaskError as exc:
        return _fail(f"error: {exc.code}: {exc.detail}", EXIT_DOMAIN)
    print(json.dumps(report.as_dict(), indent=2))
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------

def cmd_serve(directory: Path, bind: str, snapshot_dir: Path | None,
              ui_dir: Path | None = None) -> int:
    from .service import SnapshotCorruptionError, create_app

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        return _fail(f"error: --bind must be addr:port, got {bind!r}", EXIT_USAGE)
    try:
        app = create_app(directory, snapshot_dir=snapshot_dir, ui_dir=ui_dir)
    except FileNotFoundError as exc:
        return _fail(f"error: {exc.filename or exc}", EXIT_USAGE)
    except (ValueError, SnapshotCorruptionError) as exc:
        return _fail(f"error: {exc}", EXIT_DOMAIN)

    import uvicorn

    uvicorn.run(app, host=host, port=int(port_text), log_level="info")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parse_mode(text: str) -> Mode:
    try:
        return Mode[text.upper()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"{text!r} is not one of LEARNING, TRAINING, EXAM")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="Catalog validation, session replay, latency benchmarks, "
                    "and the HTTP session service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a catalog directory")
    p.add_argument("dir", type=Path)
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("replay", help="run a recorded action sequence")
    p.add_argument("dir", type=Path)
    p.add_argument("--task", required=True)
    p.add_argument("--mode", required=True, type=_parse_mode,
                   metavar="{LEARNING,TRAINING,EXAM}")
    p.add_argument("file", type=Path)

    p = sub.add_parser("bench", help="measure per-action latency")
    p.add_argument("dir", type=Path)
    p.add_argument("--task", required=True)
    p.add_argument("--iterations", required=True, type=int)
    p.add_argument("--budget-ms", type=float, default=DEFAULT_BUDGET_MS)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("dir", type=Path)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.add_argument("--snapshot-dir", type=Path, default=None)
    p.add_argument("--ui-dir", type=Path, default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    if args.command == "validate":
        return cmd_validate(args.dir, args.as_json)
    if args.command == "replay":
        return cmd_replay(args.dir, args.task, args.mode, args.file)
    if args.command == "bench":
        if args.iterations < 100:
            return _fail("error: --iterations must be at least 100", EXIT_USAGE)
        return cmd_bench(args.dir, args.task, args.iterations, args.budget_ms)
    if args.command == "serve":
        return cmd_serve(args.dir, args.bind, args.snapshot_dir, args.ui_dir)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
