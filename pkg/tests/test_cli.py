"""Command line surface: check, replay, batch, and the serve smoke test."""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest
from click.testing import CliRunner

from crewdrill.batch import run_one
from crewdrill.cli import main
from crewdrill.scoring import DEFAULT_CRITERIA


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture()
def winch_path(tmp_path, winch_text) -> str:
    path = tmp_path / "winch.lora.txt"
    path.write_text(winch_text, encoding="utf-8")
    return str(path)


@pytest.fixture()
def winch_agents_path(tmp_path) -> str:
    from crewdrill.scenarios import agents_text

    path = tmp_path / "winch_agents.cfg"
    path.write_text(agents_text("winch"), encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# check


def test_check_accepts_bundled_scenario(runner, winch_path):
    result = runner.invoke(main, ["check", "--scenario", winch_path])
    assert result.exit_code == 0
    assert "winch-removal: 9 steps, 8 actions, 2 roles" in result.output


def test_check_reports_parse_errors_and_fails(runner, tmp_path):
    bad = tmp_path / "bad.lora.txt"
    bad.write_text("SCENARIO broken\nGRAPH\n  step s1 no-such-action\n", encoding="utf-8")
    result = runner.invoke(main, ["check", "--scenario", str(bad)])
    assert result.exit_code == 1
    assert "error" in result.output
    # Diagnostics come out in a fixed order, so two runs print the same text.
    again = runner.invoke(main, ["check", "--scenario", str(bad)])
    assert again.output == result.output


# ---------------------------------------------------------------------------
# replay


def _write_log(tmp_path: Path, winch_text, winch_agents, seed: int = 42) -> Path:
    outcome = run_one(winch_text, winch_agents, DEFAULT_CRITERIA, seed=seed)
    path = tmp_path / "session.events"
    path.write_text(outcome.log_text, encoding="utf-8")
    return path


def test_replay_verifies_a_clean_log(runner, tmp_path, winch_text, winch_agents):
    path = _write_log(tmp_path, winch_text, winch_agents)
    result = runner.invoke(main, ["replay", "--log", str(path)])
    assert result.exit_code == 0
    assert "finished: True" in result.output

    as_json = runner.invoke(main, ["replay", "--log", str(path), "--json"])
    assert as_json.exit_code == 0
    payload = json.loads(as_json.output)
    assert payload["ok"] is True
    assert payload["finished"] is True
    assert payload["trailer_present"] is True


def test_replay_notes_a_truncated_log(runner, tmp_path, winch_text, winch_agents):
    path = _write_log(tmp_path, winch_text, winch_agents)
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:6]) + "\n", encoding="utf-8")
    result = runner.invoke(main, ["replay", "--log", str(path)])
    assert result.exit_code == 0
    assert "truncated" in result.output


def test_replay_rejects_a_tampered_log(runner, tmp_path, winch_text, winch_agents):
    path = _write_log(tmp_path, winch_text, winch_agents)
    lines = path.read_text(encoding="utf-8").splitlines()
    record = json.loads(lines[4])
    record["tick"] += 1
    lines[4] = json.dumps(record, sort_keys=True, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    result = runner.invoke(main, ["replay", "--log", str(path), "--json"])
    assert result.exit_code == 2
    payload = json.loads(result.output)
    assert payload["ok"] is False
    # A forward-jumped tick only contradicts the log once a later event
    # carries the original clock, so detection lands at or just after it.
    assert payload["seq"] >= record["seq"]


# ---------------------------------------------------------------------------
# batch


def test_batch_runs_verifies_and_writes_artifacts(
    runner, tmp_path, winch_path, winch_agents_path
):
    logs_dir = tmp_path / "logs"
    report_path = tmp_path / "report.txt"
    result = runner.invoke(
        main,
        [
            "batch",
            "--scenario",
            winch_path,
            "--agents",
            winch_agents_path,
            "--seed",
            "42",
            "--runs",
            "3",
            "--logs-dir",
            str(logs_dir),
            "--report",
            str(report_path),
            "--verify",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "runs: 3  completed: 3" in result.output
    assert "verified: 3/3 logs replay clean" in result.output
    assert sorted(p.name for p in logs_dir.iterdir()) == [
        "run_42.events",
        "run_43.events",
        "run_44.events",
    ]
    assert "pull-cable" in report_path.read_text(encoding="utf-8")


def test_batch_exits_nonzero_when_runs_cannot_finish(
    runner, winch_path, winch_agents_path
):
    result = runner.invoke(
        main,
        [
            "batch",
            "--scenario",
            winch_path,
            "--agents",
            winch_agents_path,
            "--runs",
            "2",
            "--max-ticks",
            "2",
        ],
    )
    assert result.exit_code == 1
    assert "completed: 0" in result.output


# ---------------------------------------------------------------------------
# serve


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_serve_smoke_over_http(tmp_path, winch_path, winch_agents_path):
    tcp_port, http_port = _free_port(), _free_port()
    process = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "crewdrill.cli",
            "serve",
            "--scenario",
            winch_path,
            "--agents",
            winch_agents_path,
            "--seed",
            "5",
            "--port",
            str(tcp_port),
            "--http-port",
            str(http_port),
            "--tick-ms",
            "20",
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    base = f"http://127.0.0.1:{http_port}"
    try:
        health = None
        for _ in range(100):
            try:
                health = httpx.get(f"{base}/health", timeout=1.0).json()
                break
            except httpx.TransportError:
                time.sleep(0.1)
        assert health is not None, "server never came up"
        assert health["scenario"] == "winch-removal"

        reply = httpx.post(
            f"{base}/command", json={"type": "claim_role", "name": "Pat", "role": "operator"}
        ).json()
        assert reply["type"] == "ok"
        httpx.post(f"{base}/command", json={"type": "start"})
        for _ in range(100):
            snapshot = httpx.get(f"{base}/snapshot").json()["snapshot"]
            if snapshot["phase"] == "running":
                break
            time.sleep(0.05)
        assert snapshot["phase"] == "running"
    finally:
        process.terminate()
        process.wait(timeout=10)
