"""FastAPI application exposing one live session.

REST endpoints give read access plus a connectionless command channel;
the WebSocket endpoint carries the same protocol messages as the TCP
stream, one JSON document per text frame, with events pushed as they
are emitted.
"""

from __future__ import annotations

import asyncio
import json
import logging
from typing import Any

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .. import events as ev
from ..server import Connection, SessionServer
from .schemas import (
    CommandReply,
    CommandRequest,
    EventRecord,
    EventsReply,
    HealthReply,
    ScenarioInfo,
    ScoresReply,
    SnapshotReply,
)

logger = logging.getLogger(__name__)


def create_app(server: SessionServer, static_dir: str | None = None) -> FastAPI:
    session = server.session
    app = FastAPI(title="crewdrill", version="0.1.0")

    @app.get("/health", response_model=HealthReply)
    def health() -> HealthReply:
        return HealthReply(scenario=session.doc.name, phase=session.phase, tick=session.tick)

    @app.get("/scenario", response_model=ScenarioInfo)
    def scenario() -> ScenarioInfo:
        return ScenarioInfo(
            name=session.doc.name,
            scenario_hash=ev.scenario_text_hash(session.scenario_text),
            text=session.scenario_text,
            steps=len(session.doc.graph.steps),
            actions=len(session.doc.actions),
            roles=sorted(session.doc.roles),
        )

    @app.get("/snapshot", response_model=SnapshotReply)
    def snapshot() -> SnapshotReply:
        return SnapshotReply(snapshot=session.snapshot())

    @app.get("/events", response_model=EventsReply)
    def events(since: int = -1) -> EventsReply:
        rows = [
            EventRecord(seq=e.seq, tick=e.tick, kind=e.kind, payload=dict(e.payload))
            for e in session.events
            if e.seq > since
        ]
        return EventsReply(events=rows, latest_seq=session.seq - 1)

    @app.get("/scores", response_model=ScoresReply)
    def scores() -> ScoresReply:
        return ScoresReply(
            scores={
                action: [row.to_payload() for row in rows]
                for action, rows in sorted(session.latest_scores.items())
            }
        )

    @app.post("/command", response_model=CommandReply)
    async def command(request: CommandRequest) -> CommandReply:
        connection = Connection(name=request.name or "rest")
        connection.humanoid_id = request.humanoid
        message = {k: v for k, v in request.model_dump().items() if v is not None}
        reply = await server.handle_message(connection, message)
        if reply is None:
            reply = {"type": "ok"}
        if connection.humanoid_id and "humanoid" not in reply:
            reply["humanoid"] = connection.humanoid_id
        return CommandReply(**reply)

    @app.websocket("/ws")
    async def websocket(ws: WebSocket) -> None:
        await ws.accept()
        connection = Connection()
        server.attach(connection)

        async def pump_outbox() -> None:
            while True:
                message = await connection.outbox.get()
                await ws.send_text(json.dumps(message))

        pump = asyncio.ensure_future(pump_outbox())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    message: dict[str, Any] = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps({"type": "error", "reason": "bad json"}))
                    continue
                reply = await server.handle_message(connection, message)
                if reply is not None:
                    await ws.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()
            server.detach(connection)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
