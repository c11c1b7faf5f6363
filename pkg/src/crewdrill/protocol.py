"""Wire protocol shared by the TCP stream server and the WebSocket feed.

Every message in either direction is one UTF-8 JSON document with a
``type`` field.  On the raw TCP transport, each document is preceded by
a 4-byte big-endian length; WebSocket text frames carry the documents
as-is.

Client to server:
    hello          {name}                    introduce the connection
    claim_role     {role}                    join the team (creates an avatar)
    start          {}                        leave the lobby
    perform        {action}                  start an action as this avatar
    communicate    {recipient_role, message} say something
    notify         {action}                  declare intent for a collab slot
    demand         {humanoid, action}        queue a pedagogical demand
    query_allowed  {}                        what could this avatar do now
    snapshot       {}                        full state view

Server to client:
    welcome, ok, rejected, allowed, snapshot, event, error
"""

from __future__ import annotations

import json
import struct
from typing import Any

MAX_FRAME = 8 * 1024 * 1024

CLIENT_TYPES = (
    "hello",
    "claim_role",
    "start",
    "perform",
    "communicate",
    "notify",
    "demand",
    "query_allowed",
    "snapshot",
)


def encode(message: dict[str, Any]) -> bytes:
    """Length-prefixed frame for the TCP transport."""
    body = json.dumps(message, sort_keys=True, separators=(",", ":")).encode("utf-8")
    if len(body) > MAX_FRAME:
        raise ValueError("message too large")
    return struct.pack(">I", len(body)) + body


def decode_stream(buffer: bytearray) -> list[dict[str, Any]]:
    """Consume as many complete frames as the buffer holds."""
    messages = []
    while len(buffer) >= 4:
        (length,) = struct.unpack(">I", buffer[:4])
        if length > MAX_FRAME:
            raise ValueError("frame too large")
        if len(buffer) < 4 + length:
            break
        body = bytes(buffer[4 : 4 + length])
        del buffer[: 4 + length]
        messages.append(json.loads(body.decode("utf-8")))
    return messages


def error_reply(reason: str) -> dict[str, Any]:
    return {"type": "error", "reason": reason}
