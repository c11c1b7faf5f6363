"""Command line entry points.

The CLI is a thin shell: ``serve`` hosts a session over TCP and HTTP,
``batch`` runs headless exercises, ``replay`` verifies a log, ``check``
lints a scenario file.  All heavy lifting lives in the library.
"""

from __future__ import annotations

import asyncio
import json
import logging
import sys

import click
import uvicorn

from . import batch as batchmod
from . import replay as replaymod
from . import scoring
from .configs import parse_agents_file, parse_criteria_file
from .dsl.parser import ScenarioParseError, parse
from .dsl.validator import validate_static
from .errors import ReplayDivergence
from .server import SessionServer, serve_tcp
from .service import create_app
from .session import Session, SessionConfig


def _load_inputs(scenario: str, agents: str | None, criteria: str | None):
    with open(scenario, "r", encoding="utf-8") as handle:
        text = handle.read()
    doc = parse(text)
    agent_specs = parse_agents_file(agents) if agents else []
    crits = parse_criteria_file(criteria) if criteria else scoring.DEFAULT_CRITERIA
    return text, doc, agent_specs, crits


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """Collaborative procedure training sessions."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True), help="Scenario file.")
@click.option("--agents", type=click.Path(exists=True), help="Virtual-human cast file.")
@click.option("--criteria", type=click.Path(exists=True), help="Scoring criteria file.")
@click.option("--seed", default=0, show_default=True, help="Session seed.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=7420, show_default=True, help="TCP stream port.")
@click.option("--http-port", default=7421, show_default=True, help="HTTP/WebSocket port.")
@click.option("--tick-ms", default=200, show_default=True, help="Tick interval.")
@click.option("--auto-start", is_flag=True, help="Skip the lobby and start at once.")
@click.option("--log", "log_path", type=click.Path(), help="Write the event log here.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True), help="Serve this directory at /.")
def serve(
    scenario: str,
    agents: str | None,
    criteria: str | None,
    seed: int,
    host: str,
    port: int,
    http_port: int,
    tick_ms: int,
    auto_start: bool,
    log_path: str | None,
    ui_dir: str | None,
) -> None:
    """Host one live session over TCP and HTTP."""
    text, doc, agent_specs, crits = _load_inputs(scenario, agents, criteria)
    session = Session(doc, agent_specs, crits, SessionConfig(seed=seed), scenario_text=text)
    # Line buffered: signal-driven shutdown must not lose tail events.
    log_handle = open(log_path, "w", encoding="utf-8", buffering=1) if log_path else None
    if log_handle is not None:
        session.attach_log(log_handle)
    server = SessionServer(session, tick_seconds=tick_ms / 1000.0)
    if auto_start:
        session.start()

    async def run() -> None:
        tcp = await serve_tcp(server, host, port)
        app = create_app(server, static_dir=ui_dir)
        config = uvicorn.Config(app, host=host, port=http_port, log_level="warning")
        http = uvicorn.Server(config)
        click.echo(f"tcp on {host}:{port}, http on {host}:{http_port}")
        ticker = asyncio.ensure_future(server.run_ticks())
        try:
            await http.serve()
        finally:
            server.close()
            ticker.cancel()
            tcp.close()
            await tcp.wait_closed()
            if log_handle is not None:
                session.close_log()
                log_handle.close()

    asyncio.run(run())


@main.command("batch")
@click.option("--scenario", required=True, type=click.Path(exists=True))
@click.option("--agents", required=True, type=click.Path(exists=True))
@click.option("--criteria", type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, help="Seed of the first run.")
@click.option("--runs", default=1, show_default=True)
@click.option("--report", "report_path", type=click.Path(), help="Write the report here too.")
@click.option("--logs-dir", type=click.Path(), help="Write one event log per run.")
@click.option("--max-ticks", type=int, help="Abort a run after this many ticks.")
@click.option("--verify", is_flag=True, help="Replay every log and compare state hashes.")
def batch(
    scenario: str,
    agents: str,
    criteria: str | None,
    seed: int,
    runs: int,
    report_path: str | None,
    logs_dir: str | None,
    max_ticks: int | None,
    verify: bool,
) -> None:
    """Run the scenario headless with an all-virtual cast."""
    text, _, agent_specs, crits = _load_inputs(scenario, agents, criteria)
    report = batchmod.run_batch(
        text,
        agent_specs,
        crits,
        seed=seed,
        runs=runs,
        logs_dir=logs_dir,
        max_ticks=max_ticks,
    )
    rendered = report.render()
    click.echo(rendered, nl=False)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as handle:
            handle.write(rendered)
    if verify:
        divergences = 0
        for outcome in report.runs:
            try:
                result = replaymod.replay_text(outcome.log_text)
                if result.final_state_hash != outcome.final_state_hash:
                    divergences += 1
            except ReplayDivergence:
                divergences += 1
        click.echo(f"verified: {len(report.runs) - divergences}/{len(report.runs)} logs replay clean")
        if divergences:
            sys.exit(2)
    if report.completed_runs != len(report.runs):
        sys.exit(1)


@main.command()
@click.option("--log", "log", required=True, type=click.Path(exists=True), help="Event log to verify.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable result.")
def replay(log: str, as_json: bool) -> None:
    """Re-run a recorded session and verify every event."""
    try:
        result = replaymod.replay_file(log)
    except ReplayDivergence as exc:
        if as_json:
            click.echo(json.dumps({"ok": False, "seq": exc.seq, "reason": str(exc)}))
        else:
            click.echo(f"divergence at seq {exc.seq}: {exc}", err=True)
        sys.exit(2)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "ok": True,
                    "events": result.events_applied,
                    "final_tick": result.final_tick,
                    "finished": result.finished,
                    "final_state_hash": result.final_state_hash,
                    "trailer_present": result.trailer_hash is not None,
                }
            )
        )
    else:
        click.echo(
            f"replayed {result.events_applied} events to tick {result.final_tick}; "
            f"finished: {result.finished}; hash {result.final_state_hash[:16]}..."
        )
        if result.trailer_hash is None:
            click.echo("log is truncated (no trailer); state verified up to the last event")


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True), help="Scenario file to lint.")
def check(scenario: str) -> None:
    """Parse and lint a scenario file."""
    with open(scenario, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        doc = parse(text)
    except ScenarioParseError as exc:
        for diagnostic in exc.diagnostics:
            click.echo(str(diagnostic))
        sys.exit(1)
    diagnostics = validate_static(doc)
    for diagnostic in diagnostics:
        click.echo(str(diagnostic))
    click.echo(
        f"{doc.name}: {len(doc.graph.steps)} steps, {len(doc.actions)} actions, "
        f"{len(doc.roles)} roles; {len(diagnostics)} warning(s)"
    )


if __name__ == "__main__":
    main()
