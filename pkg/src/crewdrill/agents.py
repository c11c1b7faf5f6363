"""Virtual-human decision making: collect, tag, select.

Each decision tick an agent gathers what it could do (enabled scenario
actions it qualifies for, world interactions outside the scenario, and
pedagogy demands), tags every candidate, then draws one of four branches
from its profile: follow the procedure, commit an off-scenario error,
hinder somebody, or idle.  Empty branches fall back to follow, then to
Idle, so a decision always exists and is fully determined by the RNG
state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from . import engine, scoring
from .dsl.ast import ActionKind, ScenarioDoc
from .profiles import PedagogicalProfile
from .world import WorldState, possible_interactions


class Tag(str, Enum):
    IMPORTANT = "important"
    COLLABORATIVE = "collaborative"
    URGENT = "urgent"
    HINDERING = "hindering"
    BEST_FOR_ME = "best_for_me"
    SOLE_CANDIDATE = "sole_candidate"
    PEDAGOGICAL_DEMAND = "pedagogical_demand"
    OFF_SCENARIO = "off_scenario"


@dataclass(frozen=True)
class CandidateAction:
    """Something one humanoid could do right now.

    Scenario candidates carry ``action_id``; world candidates carry
    ``relation``/``target``.  ``ref`` is the stable ordering key.
    """

    action_id: str | None = None
    relation: str | None = None
    target: str | None = None
    tags: frozenset[Tag] = frozenset()
    score: float = 0.0
    rank: int = 0

    @property
    def ref(self) -> str:
        if self.action_id is not None:
            return f"action:{self.action_id}"
        return f"world:{self.relation}:{self.target}"

    def with_tags(self, tags: set[Tag]) -> "CandidateAction":
        if Tag.COLLABORATIVE in tags or Tag.URGENT in tags:
            tags.add(Tag.IMPORTANT)
        return CandidateAction(
            self.action_id, self.relation, self.target, frozenset(tags), self.score, self.rank
        )


@dataclass(frozen=True)
class Decision:
    kind: str  # "perform" | "notify" | "interact_world" | "idle"
    action_id: str | None = None
    relation: str | None = None
    target: str | None = None

    @staticmethod
    def idle() -> "Decision":
        return Decision("idle")


def collect_candidates(
    doc: ScenarioDoc,
    state: engine.ScenarioState,
    world: WorldState,
    humanoid_id: str,
    scores: dict[str, list[scoring.CandidateScore]],
    demands: tuple[str, ...] = (),
) -> list[CandidateAction]:
    """Deduplicated union of scenario actions, world interactions and demands.

    A world interaction matching an enabled scenario interaction is the
    same deed and appears once, as the scenario candidate.
    """
    out: list[CandidateAction] = []
    enabled_pairs: set[tuple[str, str]] = set()
    for action_id, rows in sorted(scores.items()):
        spec = doc.actions[action_id]
        mine = next((r for r in rows if r.humanoid == humanoid_id), None)
        if spec.kind is ActionKind.INTERACTION and spec.relation and spec.target:
            enabled_pairs.add((spec.relation, spec.target))
        if mine is None:
            continue
        out.append(
            CandidateAction(action_id=action_id, score=mine.score, rank=mine.rank)
        )
    if humanoid_id in world.humanoids:
        for interaction in possible_interactions(world, humanoid_id):
            if (interaction.relation, interaction.target) in enabled_pairs:
                continue
            out.append(
                CandidateAction(relation=interaction.relation, target=interaction.target)
            )
    known = {c.ref for c in out}
    for demand in demands:
        ref = f"action:{demand}"
        if ref not in known and demand in doc.actions:
            out.append(CandidateAction(action_id=demand))
    return sorted(out, key=lambda c: c.ref)


def _needed_objects(doc: ScenarioDoc, world: WorldState, action_id: str) -> set[str]:
    """Objects an action needs: its target plus tools matching its holds."""
    spec = doc.actions.get(action_id)
    if spec is None or spec.kind is not ActionKind.INTERACTION:
        return set()
    needed: set[str] = set()
    if spec.target:
        needed.add(spec.target)
    if spec.hands is not None:
        for hand_state in (spec.hands.before.left, spec.hands.before.right):
            if hand_state.is_holding and hand_state.item:
                token = hand_state.item
                for obj_id, obj in world.objects.items():
                    if obj_id == token or token in obj.abilities:
                        needed.add(obj_id)
    return needed


def tag_candidates(
    candidates: list[CandidateAction],
    doc: ScenarioDoc,
    world: WorldState,
    humanoid_id: str,
    scores: dict[str, list[scoring.CandidateScore]],
    demands: tuple[str, ...] = (),
) -> list[CandidateAction]:
    """Attach the behaviour tags every candidate carries into selection."""
    # Objects wanted by enabled actions whose best candidate is someone else.
    contested: set[str] = set()
    for action_id, rows in scores.items():
        if not rows or rows[0].humanoid == humanoid_id:
            continue
        contested |= _needed_objects(doc, world, action_id)

    tagged = []
    demand_set = set(demands)
    for candidate in candidates:
        tags: set[Tag] = set()
        touched: set[str] = set()
        if candidate.action_id is not None:
            spec = doc.actions[candidate.action_id]
            rows = scores.get(candidate.action_id, [])
            mine = next((r for r in rows if r.humanoid == humanoid_id), None)
            if spec.kind is ActionKind.NOTIFY_INTENT:
                tags.add(Tag.COLLABORATIVE)
            if spec.urgent:
                tags.add(Tag.URGENT)
            if mine is not None:
                if mine.rank == 1:
                    tags.add(Tag.BEST_FOR_ME)
                if mine.sole_candidate:
                    tags.add(Tag.SOLE_CANDIDATE)
            if candidate.action_id in demand_set:
                tags.add(Tag.PEDAGOGICAL_DEMAND)
            if mine is None and candidate.action_id not in scores:
                tags.add(Tag.OFF_SCENARIO)
            if spec.kind is ActionKind.INTERACTION and spec.target:
                touched = {spec.target}
        else:
            tags.add(Tag.OFF_SCENARIO)
            if candidate.target:
                touched = {candidate.target}
        if touched & contested:
            tags.add(Tag.HINDERING)
        tagged.append(candidate.with_tags(tags))
    return tagged


def _follow_pick(tagged: list[CandidateAction]) -> CandidateAction | None:
    demands = [c for c in tagged if Tag.PEDAGOGICAL_DEMAND in c.tags]
    if demands:
        return min(demands, key=lambda c: c.ref)
    pool = [c for c in tagged if Tag.OFF_SCENARIO not in c.tags and c.action_id is not None]
    if not pool:
        return None

    def bracket(c: CandidateAction) -> int:
        if Tag.SOLE_CANDIDATE in c.tags:
            return 0
        if Tag.BEST_FOR_ME in c.tags:
            return 1
        if Tag.IMPORTANT in c.tags:
            return 2
        return 3

    return min(pool, key=lambda c: (bracket(c), -c.score, c.ref))


def _as_decision(doc: ScenarioDoc, candidate: CandidateAction) -> Decision:
    if candidate.action_id is not None:
        spec = doc.actions[candidate.action_id]
        if spec.kind is ActionKind.NOTIFY_INTENT:
            return Decision("notify", action_id=candidate.action_id)
        return Decision("perform", action_id=candidate.action_id)
    return Decision("interact_world", relation=candidate.relation, target=candidate.target)


def select_action(
    doc: ScenarioDoc,
    tagged: list[CandidateAction],
    profile: PedagogicalProfile,
    rng: random.Random,
) -> Decision:
    """Draw a behaviour branch and pick its action.

    Follow prefers demands, then sole-candidate duties, then actions the
    scoring assigns to this agent, then important (collaborative/urgent)
    ones, then the rest by score.  Error draws uniformly among
    off-scenario interactions, hinder among hindering candidates; an
    empty branch falls back to follow and finally to Idle.
    """
    draw = rng.random()
    if draw < profile.p_follow:
        branch = "follow"
    elif draw < profile.p_follow + profile.p_error:
        branch = "error"
    elif draw < profile.p_follow + profile.p_error + profile.p_hinder:
        branch = "hinder"
    else:
        branch = "idle"

    if branch == "error":
        pool = sorted((c for c in tagged if Tag.OFF_SCENARIO in c.tags), key=lambda c: c.ref)
        if pool:
            return _as_decision(doc, pool[rng.randrange(len(pool))])
        branch = "follow"
    if branch == "hinder":
        pool = sorted((c for c in tagged if Tag.HINDERING in c.tags), key=lambda c: c.ref)
        if pool:
            return _as_decision(doc, pool[rng.randrange(len(pool))])
        branch = "follow"
    if branch == "follow":
        choice = _follow_pick(tagged)
        if choice is not None:
            return _as_decision(doc, choice)
    return Decision.idle()


def decide(
    doc: ScenarioDoc,
    state: engine.ScenarioState,
    world: WorldState,
    humanoid_id: str,
    scores: dict[str, list[scoring.CandidateScore]],
    profile: PedagogicalProfile,
    rng: random.Random,
    demands: tuple[str, ...] = (),
) -> Decision:
    """Full collect/tag/select pipeline for one agent."""
    candidates = collect_candidates(doc, state, world, humanoid_id, scores, demands)
    tagged = tag_candidates(candidates, doc, world, humanoid_id, scores, demands)
    return select_action(doc, tagged, profile, rng)
