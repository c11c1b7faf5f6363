"""World model: objects, ability-gated relations and tag effects.

Objects advertise ability tokens; relations demand ability sets from the
actor and the target (plus, optionally, one ability the used tool must
carry).  What a humanoid can do right now is therefore a pure
set-inclusion question, cheap enough to recompute after every change.
Effects of an interaction are limited to adding and removing state tags
on the target object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import IllegalInteraction, UnknownHumanoid, UnknownObject
from .participants import Humanoid, Position


@dataclass(frozen=True)
class StateEffect:
    """Add or remove one tag on the interaction target."""

    op: str  # "add" | "remove"
    tag: str

    def __post_init__(self) -> None:
        if self.op not in ("add", "remove"):
            raise ValueError(f"bad effect op: {self.op!r}")


@dataclass(frozen=True)
class Relation:
    """A named interaction kind with its ability requirements."""

    name: str
    actor_abilities: frozenset[str]
    target_abilities: frozenset[str]
    tool_ability: str | None = None
    effects: tuple[StateEffect, ...] = ()


@dataclass(frozen=True)
class WorldObject:
    id: str
    name: str
    abilities: frozenset[str]
    position: Position
    state_tags: frozenset[str] = frozenset()
    # (humanoid id, hand name) while held, else None.
    held_by: tuple[str, str] | None = None


@dataclass
class WorldState:
    """Objects and relations, plus the humanoids sharing the space."""

    objects: dict[str, WorldObject] = field(default_factory=dict)
    relations: dict[str, Relation] = field(default_factory=dict)
    humanoids: dict[str, Humanoid] = field(default_factory=dict)

    def object(self, object_id: str) -> WorldObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise UnknownObject(object_id) from None

    def humanoid(self, humanoid_id: str) -> Humanoid:
        try:
            return self.humanoids[humanoid_id]
        except KeyError:
            raise UnknownHumanoid(humanoid_id) from None

    def with_object(self, obj: WorldObject) -> "WorldState":
        objects = dict(self.objects)
        objects[obj.id] = obj
        return WorldState(objects, self.relations, self.humanoids)

    def to_payload(self) -> dict:
        """Canonical JSON-safe snapshot of the object space."""
        return {
            "objects": [
                {
                    "id": o.id,
                    "name": o.name,
                    "abilities": sorted(o.abilities),
                    "position": [o.position[0], o.position[1]],
                    "state_tags": sorted(o.state_tags),
                    "held_by": list(o.held_by) if o.held_by else None,
                }
                for _, o in sorted(self.objects.items())
            ],
            "relations": [
                {
                    "name": r.name,
                    "actor_abilities": sorted(r.actor_abilities),
                    "target_abilities": sorted(r.target_abilities),
                    "tool_ability": r.tool_ability,
                    "effects": [{"op": e.op, "tag": e.tag} for e in r.effects],
                }
                for _, r in sorted(self.relations.items())
            ],
        }


@dataclass(frozen=True)
class PossibleInteraction:
    """One (relation, target) pair currently open to an actor."""

    relation: str
    target: str
    tool_ability: str | None = None


def distance(a: Position, b: Position) -> float:
    return math.dist(a, b)


def possible_interactions(world: WorldState, actor_id: str) -> list[PossibleInteraction]:
    """Every (relation, target) pair the actor's abilities currently allow.

    Pure ability filtering: the actor set must cover the relation's actor
    requirements and the target object's abilities must cover the target
    requirements.  Tool availability is the hand planner's concern, not a
    filter here.  Sorted by (relation name, target id) for determinism.
    """
    actor = world.humanoid(actor_id)
    found: list[PossibleInteraction] = []
    for rel_name in sorted(world.relations):
        rel = world.relations[rel_name]
        if not rel.actor_abilities <= actor.abilities:
            continue
        for obj_id in sorted(world.objects):
            obj = world.objects[obj_id]
            if rel.target_abilities <= obj.abilities:
                found.append(PossibleInteraction(rel_name, obj_id, rel.tool_ability))
    return found


def interaction_allowed(world: WorldState, actor_id: str, relation: str, target: str) -> bool:
    """True when the relation's ability requirements hold for actor and target."""
    actor = world.humanoid(actor_id)
    rel = world.relations.get(relation)
    if rel is None:
        return False
    obj = world.objects.get(target)
    if obj is None:
        return False
    return rel.actor_abilities <= actor.abilities and rel.target_abilities <= obj.abilities


def apply_effects(world: WorldState, actor_id: str, relation: str, target: str) -> WorldState:
    """Apply an interaction's tag effects to the target object.

    The update is transactional: the input world is left untouched and a
    new state is returned.  Raises IllegalInteraction when the ability
    requirements do not hold.
    """
    if not interaction_allowed(world, actor_id, relation, target):
        raise IllegalInteraction(f"{actor_id} cannot {relation} {target}")
    rel = world.relations[relation]
    obj = world.object(target)
    tags = set(obj.state_tags)
    for effect in rel.effects:
        if effect.op == "add":
            tags.add(effect.tag)
        else:
            tags.discard(effect.tag)
    return world.with_object(replace(obj, state_tags=frozenset(tags)))


def grasp_object(world: WorldState, humanoid_id: str, object_id: str, hand: str) -> WorldState:
    """Mark an unheld object as held."""
    obj = world.object(object_id)
    if obj.held_by is not None:
        raise IllegalInteraction(f"{object_id} already held by {obj.held_by[0]}")
    return world.with_object(replace(obj, held_by=(humanoid_id, hand)))


def lay_object(world: WorldState, humanoid_id: str, object_id: str, at: Position) -> WorldState:
    """Put a held object down at the humanoid's position."""
    obj = world.object(object_id)
    if obj.held_by is None or obj.held_by[0] != humanoid_id:
        raise IllegalInteraction(f"{object_id} not held by {humanoid_id}")
    return world.with_object(replace(obj, held_by=None, position=at))
