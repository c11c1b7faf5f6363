"""Hand states for two-handed humanoids.

Every humanoid owns a left and a right hand.  A hand is Free, Holding a
specific world object, or Busy (occupied in a way no planner may undo).
Indifferent exists only inside action requirements and means "any state
is acceptable"; it is never a real hand state.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class HandKind(str, Enum):
    FREE = "free"
    HOLDING = "holding"
    BUSY = "busy"
    INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class HandState:
    """State of one hand, or a requirement on one hand.

    ``item`` is a concrete object id in an actual hand state.  Inside a
    requirement it may also be an ability token; a held object satisfies
    the requirement when its id or one of its abilities matches.
    """

    kind: HandKind
    item: str | None = None

    @staticmethod
    def free() -> "HandState":
        return HandState(HandKind.FREE)

    @staticmethod
    def busy() -> "HandState":
        return HandState(HandKind.BUSY)

    @staticmethod
    def indifferent() -> "HandState":
        return HandState(HandKind.INDIFFERENT)

    @staticmethod
    def holding(item: str) -> "HandState":
        return HandState(HandKind.HOLDING, item)

    @property
    def is_free(self) -> bool:
        return self.kind is HandKind.FREE

    @property
    def is_busy(self) -> bool:
        return self.kind is HandKind.BUSY

    @property
    def is_holding(self) -> bool:
        return self.kind is HandKind.HOLDING

    @property
    def is_indifferent(self) -> bool:
        return self.kind is HandKind.INDIFFERENT

    def to_token(self) -> str:
        """Render as a DSL/wire token: free, busy, any or hold(x)."""
        if self.kind is HandKind.HOLDING:
            return f"hold({self.item})"
        if self.kind is HandKind.INDIFFERENT:
            return "any"
        return self.kind.value

    @staticmethod
    def from_token(token: str) -> "HandState":
        """Inverse of :meth:`to_token`.  Raises ValueError on junk."""
        if token == "free":
            return HandState.free()
        if token == "busy":
            return HandState.busy()
        if token in ("any", "indifferent"):
            return HandState.indifferent()
        if token.startswith("hold(") and token.endswith(")"):
            item = token[5:-1]
            if item:
                return HandState.holding(item)
        raise ValueError(f"bad hand-state token: {token!r}")


HAND_NAMES = ("left", "right")


@dataclass(frozen=True)
class Hands:
    """The pair of hand states of one humanoid (or one requirement side)."""

    left: HandState
    right: HandState

    @staticmethod
    def both_free() -> "Hands":
        return Hands(HandState.free(), HandState.free())

    @staticmethod
    def both_indifferent() -> "Hands":
        return Hands(HandState.indifferent(), HandState.indifferent())

    def get(self, hand: str) -> HandState:
        if hand == "left":
            return self.left
        if hand == "right":
            return self.right
        raise KeyError(hand)

    def replace(self, hand: str, state: HandState) -> "Hands":
        if hand == "left":
            return Hands(state, self.right)
        if hand == "right":
            return Hands(self.left, state)
        raise KeyError(hand)

    def held_items(self) -> list[str]:
        return [h.item for h in (self.left, self.right) if h.is_holding and h.item]

    def to_payload(self) -> dict[str, str]:
        return {"left": self.left.to_token(), "right": self.right.to_token()}

    @staticmethod
    def from_payload(payload: dict[str, str]) -> "Hands":
        return Hands(
            HandState.from_token(payload["left"]),
            HandState.from_token(payload["right"]),
        )


@dataclass(frozen=True)
class HandRequirement:
    """Hand states an interaction demands before it starts and imposes after.

    Requirements are written for (left, right) but may be satisfied with the
    hands swapped; the planner picks the cheaper assignment.
    """

    before: Hands
    after: Hands


# Hand states per humanoid id; the session's live resource table.
HandsModel = dict[str, Hands]
