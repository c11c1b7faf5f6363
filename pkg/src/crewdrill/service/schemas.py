"""Request and response models for the HTTP surface."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field


class HealthReply(BaseModel):
    status: Literal["ok"] = "ok"
    scenario: str
    phase: str
    tick: int


class ScenarioInfo(BaseModel):
    name: str
    scenario_hash: str
    text: str
    steps: int
    actions: int
    roles: list[str]


class SnapshotReply(BaseModel):
    model_config = ConfigDict(extra="allow")

    snapshot: dict[str, Any]


class EventRecord(BaseModel):
    seq: int
    tick: int
    kind: str
    payload: dict[str, Any]


class EventsReply(BaseModel):
    events: list[EventRecord]
    latest_seq: int


class ScoresReply(BaseModel):
    scores: dict[str, list[dict[str, Any]]]


class CommandRequest(BaseModel):
    """One protocol message carried over REST instead of a socket.

    ``humanoid`` binds the command to an avatar for connectionless
    clients; socket clients are bound by their claim instead.
    """

    type: str
    name: str | None = None
    role: str | None = None
    action: str | None = None
    recipient_role: str | None = None
    message: str | None = None
    humanoid: str | None = None


class CommandReply(BaseModel):
    model_config = ConfigDict(extra="allow")

    type: str
    reason: str | None = None


class DiagnosticRecord(BaseModel):
    severity: str
    code: str
    line: int
    message: str


class CheckReply(BaseModel):
    ok: bool
    diagnostics: list[DiagnosticRecord] = Field(default_factory=list)
