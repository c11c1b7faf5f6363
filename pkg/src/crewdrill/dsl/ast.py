"""Scenario document structure produced by the parser.

A scenario is a token state machine over steps and transitions (parallel
splits and joins included) plus the world it plays in, the role slots of
the team and the catalogue of actions the steps refer to.  Source line
numbers ride along for diagnostics but never take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..hands import HandRequirement
from ..world import WorldState

# Wildcard role: any participant with the suitable abilities.
ANYONE = "anyone"


class ActionKind(str, Enum):
    INTERACTION = "interaction"
    COMMUNICATION = "communication"
    NOTIFY_INTENT = "notify_intent"
    COLLABORATIVE = "collaborative"


@dataclass(frozen=True)
class RoleSpec:
    """One (role, priority) entry of an action; priority 1 is strongest."""

    role: str
    priority: int


@dataclass(frozen=True)
class RoleDecl:
    """A role slot of the scenario and the abilities it grants."""

    name: str
    grants: frozenset[str] = frozenset()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ActionSpec:
    """One action of the catalogue; fields beyond its kind stay None."""

    id: str
    kind: ActionKind
    roles: tuple[RoleSpec, ...] = ()
    urgent: bool = False
    # interaction
    relation: str | None = None
    target: str | None = None
    hands: HandRequirement | None = None
    # communication
    recipient_role: str | None = None
    message: str | None = None
    # notify_intent
    collaborative_id: str | None = None
    # collaborative
    member_slots: tuple[str, ...] = ()
    timeout_ticks: int | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Step:
    """A place of the token machine; action-less steps are pass-throughs
    (or terminal rest places)."""

    id: str
    action: str | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Transition:
    """Fires when every from-step has run its action; moves the tokens on."""

    from_steps: frozenset[str]
    to_steps: frozenset[str]
    line: int = field(default=0, compare=False)

    @property
    def sort_key(self) -> tuple:
        return (tuple(sorted(self.from_steps)), tuple(sorted(self.to_steps)))


@dataclass(frozen=True)
class ScenarioGraph:
    steps: dict[str, Step]
    transitions: tuple[Transition, ...]
    initial: frozenset[str]
    terminal: frozenset[str]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioGraph):
            return NotImplemented
        return (
            self.steps == other.steps
            and sorted(t.sort_key for t in self.transitions)
            == sorted(t.sort_key for t in other.transitions)
            and self.initial == other.initial
            and self.terminal == other.terminal
        )

    def __hash__(self) -> int:  # keep usable as dict key despite custom eq
        return hash((frozenset(self.steps), self.initial, self.terminal))

    def outgoing(self, step_id: str) -> list[Transition]:
        return [t for t in self.transitions if step_id in t.from_steps]


@dataclass
class ScenarioDoc:
    """A parsed scenario: world, role slots, action catalogue and graph."""

    name: str
    world: WorldState
    roles: dict[str, RoleDecl]
    actions: dict[str, ActionSpec]
    graph: ScenarioGraph

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioDoc):
            return NotImplemented
        return (
            self.name == other.name
            and self.world.to_payload() == other.world.to_payload()
            and self.roles == other.roles
            and self.actions == other.actions
            and self.graph == other.graph
        )

    def steps_for_action(self, action_id: str) -> list[Step]:
        return sorted(
            (s for s in self.graph.steps.values() if s.action == action_id),
            key=lambda s: s.id,
        )

    def collaborative_of_slot(self, notify_action_id: str) -> ActionSpec | None:
        spec = self.actions.get(notify_action_id)
        if spec is None or spec.kind is not ActionKind.NOTIFY_INTENT:
            return None
        if spec.collaborative_id is None:
            return None
        return self.actions.get(spec.collaborative_id)
