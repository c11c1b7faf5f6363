"""Session events: the append-only record every run is made of.

Events are immutable and fully describe a session; replaying them must
reconstruct the exact final state.  Canonical JSON (sorted keys, compact
separators) keeps logs byte-stable across runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Any

PARTICIPANT_JOINED = "ParticipantJoined"
ROLE_CLAIMED = "RoleClaimed"
ACTION_STARTED = "ActionStarted"
ACTION_COMPLETED = "ActionCompleted"
IMPLICIT_GRASP = "ImplicitGrasp"
IMPLICIT_LAY = "ImplicitLay"
NOTIFY_INTENT_RECORDED = "NotifyIntentRecorded"
NOTIFICATION_EXPIRED = "NotificationExpired"
COLLABORATIVE_STARTED = "CollaborativeStarted"
COMMUNICATION_SENT = "CommunicationSent"
SCENARIO_COMPLETED = "ScenarioCompleted"
SCORES_PUBLISHED = "ScoresPublished"

EVENT_KINDS = frozenset(
    {
        PARTICIPANT_JOINED,
        ROLE_CLAIMED,
        ACTION_STARTED,
        ACTION_COMPLETED,
        IMPLICIT_GRASP,
        IMPLICIT_LAY,
        NOTIFY_INTENT_RECORDED,
        NOTIFICATION_EXPIRED,
        COLLABORATIVE_STARTED,
        COMMUNICATION_SENT,
        SCENARIO_COMPLETED,
        SCORES_PUBLISHED,
    }
)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Event:
    """One fact that happened at a tick.  seq is strictly increasing."""

    seq: int
    tick: int
    kind: str
    payload: dict

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def with_seq(self, seq: int) -> "Event":
        return replace(self, seq=seq)

    def to_line(self) -> str:
        return canonical_json(
            {"seq": self.seq, "tick": self.tick, "kind": self.kind, "payload": self.payload}
        )

    @staticmethod
    def from_line(line: str) -> "Event":
        data = json.loads(line)
        return Event(
            seq=int(data["seq"]),
            tick=int(data["tick"]),
            kind=str(data["kind"]),
            payload=dict(data["payload"]),
        )


def draft(tick: int, kind: str, payload: dict) -> Event:
    """An event awaiting its sequence number (assigned by the session log)."""
    return Event(seq=-1, tick=tick, kind=kind, payload=payload)


def state_hash(world_payload: dict, scenario_payload: dict, hands_payload: dict) -> str:
    """Stable digest of the replay-relevant state triple."""
    blob = canonical_json(
        {"world": world_payload, "scenario": scenario_payload, "hands": hands_payload}
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def scenario_text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
