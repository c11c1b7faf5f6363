"""Repartition scoring: who should perform each enabled action.

Every candidate gets score = sum over criteria of weight * coefficient,
where the coefficient is looked up by the bucketed value the criterion
extracts (positive favours the candidate, negative penalises).  Ranking
is deterministic: descending score, ties broken by ascending humanoid
id.  Built-in criteria: role_priority, proximity, easiness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import engine, planner
from .dsl.ast import ANYONE, ActionKind, ActionSpec, ScenarioDoc
from .errors import ConfigError, NoCandidate
from .hands import Hands, HandsModel
from .participants import Humanoid
from .world import WorldState, distance


@dataclass(frozen=True)
class Criterion:
    """One weighted voice in the repartition score."""

    name: str
    weight: float
    coefficients: dict[str, float]

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ConfigError(f"criterion {self.name}: weight must be >= 0")


@dataclass(frozen=True)
class CandidateScore:
    action: str
    humanoid: str
    score: float
    rank: int
    sole_candidate: bool
    # (criterion, extracted value, weight * coefficient)
    breakdown: tuple[tuple[str, str, float], ...]

    def to_payload(self) -> dict:
        return {
            "action": self.action,
            "humanoid": self.humanoid,
            "score": self.score,
            "rank": self.rank,
            "sole_candidate": self.sole_candidate,
            "breakdown": [
                {"criterion": c, "value": v, "contribution": x} for c, v, x in self.breakdown
            ],
        }


@dataclass
class ScoreInputs:
    """Everything extractors may look at for one (action, humanoid) pair."""

    doc: ScenarioDoc
    world: WorldState
    hands: HandsModel
    verdicts: dict[str, dict[str, planner.Verdict]]  # humanoid -> action -> verdict
    priorities: dict[tuple[str, str], int]  # (action, humanoid) -> matched priority


def _role_priority_value(inputs: ScoreInputs, spec: ActionSpec, humanoid: Humanoid) -> str:
    priority = inputs.priorities.get((spec.id, humanoid.id))
    if priority is None:
        return "none"
    if priority <= 2:
        return str(priority)
    return "3plus"


def _proximity_value(inputs: ScoreInputs, spec: ActionSpec, humanoid: Humanoid) -> str:
    if spec.kind is not ActionKind.INTERACTION or spec.target not in inputs.world.objects:
        return "na"
    d = distance(humanoid.position, inputs.world.objects[spec.target].position)
    if d < 1.0:
        return "lt1"
    if d < 3.0:
        return "lt3"
    if d < 10.0:
        return "lt10"
    return "ge10"


def _easiness_value(inputs: ScoreInputs, spec: ActionSpec, humanoid: Humanoid) -> str:
    verdict = inputs.verdicts.get(humanoid.id, {}).get(spec.id, planner.Verdict.INFEASIBLE)
    return verdict.value


Extractor = Callable[[ScoreInputs, ActionSpec, Humanoid], str]

_EXTRACTORS: dict[str, Extractor] = {
    "role_priority": _role_priority_value,
    "proximity": _proximity_value,
    "easiness": _easiness_value,
}


def register_extractor(name: str, fn: Extractor) -> None:
    """Install a custom criterion extractor (name must then appear in the
    criteria list to take part in scoring)."""
    _EXTRACTORS[name] = fn


def known_criteria() -> frozenset[str]:
    return frozenset(_EXTRACTORS)


DEFAULT_CRITERIA: tuple[Criterion, ...] = (
    Criterion("role_priority", 1.0, {"1": 3.0, "2": 2.0, "3plus": 1.0, "none": 0.0}),
    Criterion(
        "proximity", 1.0, {"lt1": 2.0, "lt3": 1.0, "lt10": 0.0, "ge10": -1.0, "na": 0.0}
    ),
    Criterion(
        "easiness",
        1.0,
        {"feasible": 1.0, "requires_collaboration": -4.0, "infeasible": -8.0},
    ),
)


def _matched_priority(spec: ActionSpec, humanoid: Humanoid, world: WorldState) -> int | None:
    """Best (lowest) priority this humanoid matches, or None."""
    best: int | None = None
    for role_spec in spec.roles:
        if role_spec.role in humanoid.roles:
            if best is None or role_spec.priority < best:
                best = role_spec.priority
        elif role_spec.role == ANYONE and _suitable(spec, humanoid, world):
            if best is None or role_spec.priority < best:
                best = role_spec.priority
    return best


def _suitable(spec: ActionSpec, humanoid: Humanoid, world: WorldState) -> bool:
    """Ability gate used for the anyone wildcard."""
    if spec.kind is not ActionKind.INTERACTION:
        return True
    rel = world.relations.get(spec.relation or "")
    return rel is not None and rel.actor_abilities <= humanoid.abilities


def score_candidates(
    doc: ScenarioDoc,
    state: engine.ScenarioState,
    world: WorldState,
    hands: HandsModel,
    criteria: tuple[Criterion, ...] = DEFAULT_CRITERIA,
    lookahead_depth: int = planner.DEFAULT_LOOKAHEAD_DEPTH,
) -> dict[str, list[CandidateScore]]:
    """Ranked candidate scores per enabled action.

    Humanoids currently mid-action never appear.  Raises ConfigError when
    the criteria list is empty or references an unregistered criterion.
    """
    if not criteria:
        raise ConfigError("criteria list is empty")
    for criterion in criteria:
        if criterion.name not in _EXTRACTORS:
            raise ConfigError(f"unknown criterion {criterion.name!r}")

    enabled = engine.enabled_actions(state, doc)
    idle = [
        world.humanoids[h]
        for h in sorted(world.humanoids)
        if not world.humanoids[h].mid_action
    ]

    inputs = ScoreInputs(doc=doc, world=world, hands=hands, verdicts={}, priorities={})
    candidates: dict[str, list[Humanoid]] = {}
    for action_id, _ in enabled:
        spec = doc.actions[action_id]
        row = []
        for humanoid in idle:
            priority = _matched_priority(spec, humanoid, world)
            if priority is None:
                continue
            inputs.priorities[(action_id, humanoid.id)] = priority
            row.append(humanoid)
        candidates[action_id] = row

    needed = {h.id for row in candidates.values() for h in row}
    for humanoid_id in sorted(needed):
        humanoid = world.humanoids[humanoid_id]
        inputs.verdicts[humanoid_id] = planner.lookahead_blocking(
            world,
            doc,
            state,
            humanoid_id,
            hands.get(humanoid_id, Hands.both_free()),
            humanoid.roles,
            depth=lookahead_depth,
        )

    out: dict[str, list[CandidateScore]] = {}
    for action_id, _ in enabled:
        spec = doc.actions[action_id]
        rows = []
        for humanoid in candidates[action_id]:
            breakdown = []
            total = 0.0
            for criterion in criteria:
                value = _EXTRACTORS[criterion.name](inputs, spec, humanoid)
                contribution = criterion.weight * criterion.coefficients.get(value, 0.0)
                total += contribution
                breakdown.append((criterion.name, value, contribution))
            rows.append((total, humanoid.id, tuple(breakdown)))
        rows.sort(key=lambda r: (-r[0], r[1]))
        out[action_id] = [
            CandidateScore(
                action=action_id,
                humanoid=humanoid_id,
                score=total,
                rank=index + 1,
                sole_candidate=len(rows) == 1,
                breakdown=breakdown,
            )
            for index, (total, humanoid_id, breakdown) in enumerate(rows)
        ]
    return out


def best_candidate(scores: dict[str, list[CandidateScore]], action_id: str) -> CandidateScore:
    """The rank-1 candidate for an action; raises NoCandidate when empty."""
    rows = scores.get(action_id, [])
    if not rows:
        raise NoCandidate(action_id)
    return rows[0]
