"""Command-line behavior: exit codes, renderings, and the serve smoke test."""

import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest
from fastapi.testclient import TestClient

from engine_workbench.catalog import builtin_catalog_dir
from engine_workbench.cli import main, run_bench
from engine_workbench.service import create_app
from conftest import FIXTURE_TASK

GOLDEN = builtin_catalog_dir() / "golden.jsonl"


def copy_catalog(src: Path, dest: Path) -> Path:
    dest.mkdir()
    for name in ("tools.csv", "parts.csv", "tasks.csv"):
        dest.joinpath(name).write_text((src / name).read_text())
    return dest


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def test_validate_fixture_dir_exit_0(catalog_dir, capsys):
    assert main(["validate", str(catalog_dir)]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_json_rendering(catalog_dir, capsys):
    assert main(["validate", str(catalog_dir), "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body == {"ok": True, "errors": [], "warnings": []}


def test_validate_cycle_exit_1(catalog_dir, tmp_path, capsys):
    broken = copy_catalog(catalog_dir, tmp_path / "cat")
    parts = (broken / "parts.csv").read_text()
    parts = parts.replace("turbo_nut,Turbocharger nut,1,,",
                          "turbo_nut,Turbocharger nut,1,exhaust_manifold,")
    (broken / "parts.csv").write_text(parts)
    assert main(["validate", str(broken)]) == 1
    assert "PRECONDITION_CYCLE" in capsys.readouterr().out


def test_validate_missing_tasks_csv_exit_2(catalog_dir, tmp_path, capsys):
    broken = copy_catalog(catalog_dir, tmp_path / "cat")
    (broken / "tasks.csv").unlink()
    assert main(["validate", str(broken)]) == 2
    assert "tasks.csv" in capsys.readouterr().err


def test_validate_parse_error_exit_1(catalog_dir, tmp_path, capsys):
    broken = copy_catalog(catalog_dir, tmp_path / "cat")
    (broken / "tools.csv").write_text("tool_id,name,kind,kit\nW1,Wrench,LASER,\n")
    assert main(["validate", str(broken), "--json"]) == 1
    body = json.loads(capsys.readouterr().out)
    assert body["ok"] is False
    assert body["errors"][0]["file"] == "tools.csv"


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def replay_args(catalog_dir, file, mode="TRAINING"):
    return ["replay", str(catalog_dir), "--task", FIXTURE_TASK,
            "--mode", mode, str(file)]


def test_replay_golden_scores_100(catalog_dir, capsys):
    assert main(replay_args(catalog_dir, GOLDEN)) == 0
    out = capsys.readouterr().out
    card = json.loads(out.strip().splitlines()[-1])["scorecard"]
    assert card["final_score"] == 100
    assert card["errors"] == {}


def test_replay_one_bad_action_scores_98(catalog_dir, tmp_path, capsys):
    lines = GOLDEN.read_text().splitlines()
    lines.insert(0, json.dumps({"op": "apply_tool", "tool": ["W2"], "part": "turbo_nut"}))
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    assert main(replay_args(catalog_dir, bad)) == 0
    out = capsys.readouterr().out
    assert "rejected [WRENCH_CONDITION_FAILED]" in out
    card = json.loads(out.strip().splitlines()[-1])["scorecard"]
    assert card["final_score"] == 98


def test_replay_truncated_exit_1(catalog_dir, tmp_path, capsys):
    lines = GOLDEN.read_text().splitlines()[:-1]
    cut = tmp_path / "cut.jsonl"
    cut.write_text("\n".join(lines) + "\n")
    assert main(replay_args(catalog_dir, cut)) == 1
    assert "session not submitted" in capsys.readouterr().err


def test_replay_malformed_line_exit_2(catalog_dir, tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"op": "detach", "part": "oil_filter"}\n{nope\n')
    assert main(replay_args(catalog_dir, bad)) == 2
    assert "line 2" in capsys.readouterr().err


def test_replay_unknown_task_exit_1(catalog_dir, capsys):
    args = ["replay", str(catalog_dir), "--task", "ghost", "--mode", "EXAM", str(GOLDEN)]
    assert main(args) == 1
    assert "NOT_FOUND" in capsys.readouterr().err


def test_replay_missing_file_exit_2(catalog_dir, tmp_path):
    assert main(replay_args(catalog_dir, tmp_path / "none.jsonl")) == 2


def test_replay_scorecard_matches_service_submit(catalog_dir, capsys):
    assert main(replay_args(catalog_dir, GOLDEN)) == 0
    out = capsys.readouterr().out
    cli_card = json.loads(out.strip().splitlines()[-1])["scorecard"]

    with TestClient(create_app(catalog_dir)) as client:
        sid = client.post("/sessions", json={
            "task_id": FIXTURE_TASK, "mode": "TRAINING"}).json()["session_id"]
        for line in GOLDEN.read_text().splitlines():
            response = client.post(f"/sessions/{sid}/actions", json=json.loads(line))
            assert response.status_code == 200
        service_card = client.get(f"/sessions/{sid}").json()["scorecard"]
    assert cli_card == service_card


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def test_bench_small_run_reports_and_passes(catalog_dir, capsys):
    code = main(["bench", str(catalog_dir), "--task", FIXTURE_TASK,
                 "--iterations", "100"])
    out = capsys.readouterr().out
    report = json.loads(out[:out.rindex("}") + 1])
    assert report["actions_executed"] == 100 * 14
    assert report["median_latency_ms"] <= report["p99_latency_ms"] <= report["max_latency_ms"]
    assert code == (0 if report["passed"] else 1)


def test_bench_impossible_budget_fails(catalog_dir, capsys):
    code = main(["bench", str(catalog_dir), "--task", FIXTURE_TASK,
                 "--iterations", "100", "--budget-ms", "0.000001"])
    assert code == 1
    assert capsys.readouterr().out.strip().endswith("FAIL")


def test_bench_too_few_iterations_exit_2(catalog_dir, capsys):
    code = main(["bench", str(catalog_dir), "--task", FIXTURE_TASK,
                 "--iterations", "99"])
    assert code == 2


def test_bench_outcomes_stable_across_iteration_counts(fixture_catalog):
    # run_bench asserts internally that every iteration repeats the same
    # outcome kinds; differing iteration counts only change the sample size
    small = run_bench(fixture_catalog, FIXTURE_TASK, 100)
    large = run_bench(fixture_catalog, FIXTURE_TASK, 150)
    assert small.actions_executed == 100 * 14
    assert large.actions_executed == 150 * 14


def test_usage_errors_exit_2():
    assert main([]) == 2
    assert main(["replay", "somewhere"]) == 2
    assert main(["replay", "x", "--task", "t", "--mode", "TURBO", "file"]) == 2


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------

def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def wait_for(url: str, timeout_s: float = 15.0):
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        try:
            return httpx.get(url, timeout=1.0)
        except httpx.HTTPError:
            time.sleep(0.05)
    raise TimeoutError(f"service never answered at {url}")


def test_serve_smoke_and_sigint_snapshot(catalog_dir, tmp_path):
    port = free_port()
    snap = tmp_path / "snaps"
    proc = subprocess.Popen(
        [sys.executable, "-m", "engine_workbench", "serve", str(catalog_dir),
         "--bind", f"127.0.0.1:{port}", "--snapshot-dir", str(snap)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        base = f"http://127.0.0.1:{port}"
        assert wait_for(f"{base}/catalog/tasks").status_code == 200
        created = httpx.post(f"{base}/sessions", json={
            "task_id": FIXTURE_TASK, "mode": "TRAINING"})
        assert created.status_code == 201
        sid = created.json()["session_id"]
        action = {"op": "apply_tool", "tool": ["W2"], "part": "oil_drain_plug"}
        posted = httpx.post(f"{base}/sessions/{sid}/actions", json=action)
        assert posted.json()["outcome"]["kind"] == "step_completed"
        live_view = httpx.get(f"{base}/sessions/{sid}").json()
    finally:
        proc.send_signal(signal.SIGINT)
        assert proc.wait(timeout=15) == 0

    assert (snap / f"{sid}.json").exists()
    with TestClient(create_app(catalog_dir, snapshot_dir=snap)) as client:
        assert client.get(f"/sessions/{sid}").json() == live_view


def test_serve_broken_catalog_refuses_before_binding(catalog_dir, tmp_path):
    broken = copy_catalog(catalog_dir, tmp_path / "cat")
    plan = (broken / "tasks.csv").read_text()
    plan = plan.replace("heat_shield", "TMP").replace("exhaust_manifold", "heat_shield")
    (broken / "tasks.csv").write_text(plan.replace("TMP", "exhaust_manifold"))
    port = free_port()
    proc = subprocess.run(
        [sys.executable, "-m", "engine_workbench", "serve", str(broken),
         "--bind", f"127.0.0.1:{port}"],
        capture_output=True, text=True, timeout=30,
    )
    assert proc.returncode == 1
    assert "PLAN_ORDER_CONFLICT" in proc.stderr
    with pytest.raises(httpx.HTTPError):
        httpx.get(f"http://127.0.0.1:{port}/catalog/tasks", timeout=0.5)


def test_serve_malformed_bind_exit_2(catalog_dir, capsys):
    assert main(["serve", str(catalog_dir), "--bind", "nonsense"]) == 2
    assert "addr:port" in capsys.readouterr().err
