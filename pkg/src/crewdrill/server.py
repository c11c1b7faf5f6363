"""Async host around a Session: ticking, command routing, broadcast.

One SessionServer owns the session and drives the tick loop on the
event loop.  Connections (TCP or WebSocket) register an outbound queue
to receive every emitted event, and route client messages through
``handle_message``.  Commands that mutate a running exercise are
serialized through the session's command queue so they execute in
arrival order at a deterministic point of the tick.
"""

from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field
from typing import Any

from . import protocol
from .errors import CrewdrillError
from .events import Event
from .session import Session

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Connection:
    """Per-client state: a display name and, once cast, an avatar."""

    name: str = ""
    humanoid_id: str | None = None
    outbox: asyncio.Queue = field(default_factory=asyncio.Queue)


class SessionServer:
    def __init__(self, session: Session, tick_seconds: float = 0.2):
        self.session = session
        self.tick_seconds = tick_seconds
        self.connections: set[Connection] = set()
        self._closed = asyncio.Event()
        session.on_event(self._broadcast_event)

    # ------------------------------------------------------------------

    def _broadcast_event(self, event: Event) -> None:
        message = {"type": "event", "event": json.loads(event.to_line())}
        for connection in self.connections:
            connection.outbox.put_nowait(message)

    def attach(self, connection: Connection) -> None:
        self.connections.add(connection)

    def detach(self, connection: Connection) -> None:
        self.connections.discard(connection)

    async def run_ticks(self) -> None:
        """Advance the session until the server is closed."""
        log_closed = False
        while not self._closed.is_set():
            if self.session.phase == "running":
                if self.session.state.finished and not self.session.running:
                    if not log_closed:
                        self.session.close_log()
                        log_closed = True
                    self.session.drain_commands()
                else:
                    self.session.tick_once()
            else:
                self.session.drain_commands()
            try:
                await asyncio.wait_for(self._closed.wait(), timeout=self.tick_seconds)
            except asyncio.TimeoutError:
                pass

    def close(self) -> None:
        self._closed.set()

    # ------------------------------------------------------------------

    async def _submit(self, fn, *args: Any, **kwargs: Any) -> dict:
        """Queue a session command; resolves after the next tick runs it."""
        loop = asyncio.get_running_loop()
        future: asyncio.Future = loop.create_future()

        def run() -> dict:
            try:
                result = fn(*args, **kwargs)
            except CrewdrillError as exc:
                result = {"status": "rejected", "reason": str(exc)}
            if not future.done():
                future.set_result(result)
            return result

        self.session.enqueue(run)
        return await future

    async def handle_message(self, connection: Connection, message: dict) -> dict | None:
        kind = message.get("type")
        session = self.session
        if kind == "hello":
            connection.name = str(message.get("name", "")) or "guest"
            humanoid = message.get("humanoid")
            if isinstance(humanoid, str) and humanoid in session.world.humanoids:
                # A reconnecting client resumes its avatar by id, the same
                # rebind the REST command channel performs per request.
                connection.humanoid_id = humanoid
            reply = {"type": "welcome", "snapshot": session.snapshot()}
            if connection.humanoid_id is not None:
                reply["humanoid"] = connection.humanoid_id
            return reply
        if kind == "claim_role":
            role = str(message.get("role", ""))
            try:
                humanoid = session.claim_role(connection.name or "guest", role)
            except CrewdrillError as exc:
                return {"type": "rejected", "reason": str(exc), "snapshot": session.snapshot()}
            connection.humanoid_id = humanoid.id
            return {"type": "ok", "humanoid": humanoid.id, "snapshot": session.snapshot()}
        if kind == "start":
            session.start()
            return {"type": "ok", "snapshot": session.snapshot()}
        if kind == "snapshot":
            return {"type": "snapshot", "snapshot": session.snapshot()}
        if kind == "query_allowed":
            if connection.humanoid_id is None:
                return protocol.error_reply("claim a role first")
            reply = session.query_allowed(connection.humanoid_id)
            reply["type"] = "allowed" if reply.get("status") == "ok" else "rejected"
            return reply
        if kind == "perform":
            if connection.humanoid_id is None:
                return protocol.error_reply("claim a role first")
            reply = await self._submit(
                session.perform_action, connection.humanoid_id, str(message.get("action", ""))
            )
            reply["type"] = "ok" if reply.get("status") == "ok" else "rejected"
            return reply
        if kind == "communicate":
            if connection.humanoid_id is None:
                return protocol.error_reply("claim a role first")
            reply = await self._submit(
                session.communicate,
                connection.humanoid_id,
                str(message.get("recipient_role", "")),
                str(message.get("message", "")),
            )
            reply["type"] = "ok" if reply.get("status") == "ok" else "rejected"
            return reply
        if kind == "notify":
            if connection.humanoid_id is None:
                return protocol.error_reply("claim a role first")
            reply = await self._submit(
                session.notify_intent, connection.humanoid_id, str(message.get("action", ""))
            )
            reply["type"] = "ok" if reply.get("status") == "ok" else "rejected"
            return reply
        if kind == "demand":
            session.demand(str(message.get("humanoid", "")), str(message.get("action", "")))
            return {"type": "ok"}
        return protocol.error_reply(f"unknown message type {kind!r}")


async def serve_tcp(server: SessionServer, host: str, port: int) -> asyncio.AbstractServer:
    """Expose the session over a length-prefixed JSON stream socket."""

    async def handle(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        connection = Connection()
        server.attach(connection)

        async def pump_outbox() -> None:
            while True:
                message = await connection.outbox.get()
                writer.write(protocol.encode(message))
                await writer.drain()

        pump = asyncio.ensure_future(pump_outbox())
        buffer = bytearray()
        try:
            while True:
                chunk = await reader.read(65536)
                if not chunk:
                    break
                buffer.extend(chunk)
                for message in protocol.decode_stream(buffer):
                    reply = await server.handle_message(connection, message)
                    if reply is not None:
                        writer.write(protocol.encode(reply))
                        await writer.drain()
        except (ConnectionResetError, ValueError) as exc:
            logger.debug("connection dropped: %s", exc)
        finally:
            pump.cancel()
            server.detach(connection)
            writer.close()

    return await asyncio.start_server(handle, host, port)
