"""Humanoid participants: human-driven avatars and virtual humans."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .hands import Hands
from .profiles import PedagogicalProfile

Position = tuple[float, float]


class HumanoidKind(str, Enum):
    AVATAR = "avatar"
    VIRTUAL = "virtual"


@dataclass
class Humanoid:
    """One team member inside a session.

    ``abilities`` is the effective set: general abilities plus everything
    granted by the claimed roles.  An avatar is driven by a connection and
    carries no profile; a virtual human carries a profile and its own
    seeded decision RNG.
    """

    id: str
    kind: HumanoidKind
    roles: tuple[str, ...]
    abilities: frozenset[str]
    position: Position
    profile: PedagogicalProfile | None = None
    rng: random.Random | None = None
    # (action id, completion tick) while an action is running.
    current_action: tuple[str, int] | None = None
    base_abilities: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.kind is HumanoidKind.AVATAR and self.profile is not None:
            raise ValueError(f"avatar {self.id} must not carry a profile")
        if self.kind is HumanoidKind.VIRTUAL and self.profile is None:
            raise ValueError(f"virtual human {self.id} needs a profile")
        if not self.roles:
            raise ValueError(f"humanoid {self.id} has no role")

    @property
    def is_virtual(self) -> bool:
        return self.kind is HumanoidKind.VIRTUAL

    @property
    def mid_action(self) -> bool:
        return self.current_action is not None

    def to_payload(self) -> dict:
        payload: dict = {
            "id": self.id,
            "kind": self.kind.value,
            "roles": list(self.roles),
            "abilities": sorted(self.abilities),
            "position": [self.position[0], self.position[1]],
        }
        if self.profile is not None:
            payload["profile"] = self.profile.to_payload()
        return payload
