"""Randomized scoring configs plus a direct-recompute ranking oracle.

The oracle recomputes candidacy, bucket values, weighted sums and the
ranking order from scratch, sharing nothing with the scoring module but
the criterion extractor callables registered by the test itself and the
planner verdicts, which are treated as given inputs (the planner is
validated independently against an exhaustive search elsewhere).
"""

from __future__ import annotations

import math
import random
from dataclasses import replace

from crewdrill import engine, planner, scoring
from crewdrill.dsl.ast import ActionKind
from crewdrill.dsl.parser import parse
from crewdrill.hands import HandKind, Hands, HandState
from crewdrill.participants import Humanoid, HumanoidKind
from crewdrill.world import WorldState

ACTOR_ABILITIES = ("a1", "a2", "a3")
ROLE_POOL = ("r1", "r2")


def _id_parity(inputs, spec, humanoid) -> str:
    return "even" if (len(spec.id) + len(humanoid.id)) % 2 == 0 else "odd"


def _near_origin(inputs, spec, humanoid) -> str:
    return "yes" if math.hypot(*humanoid.position) < 6.0 else "no"


CUSTOM_EXTRACTORS = {"id_parity": _id_parity, "near_origin": _near_origin}
for _name, _fn in CUSTOM_EXTRACTORS.items():
    scoring.register_extractor(_name, _fn)

VALUE_DOMAINS: dict[str, tuple[str, ...]] = {
    "role_priority": ("1", "2", "3plus", "none"),
    "proximity": ("lt1", "lt3", "lt10", "ge10", "na"),
    "easiness": ("feasible", "requires_collaboration", "infeasible"),
    "id_parity": ("even", "odd"),
    "near_origin": ("yes", "no"),
}


def random_criteria(rng: random.Random) -> tuple[scoring.Criterion, ...]:
    names = [rng.choice(sorted(VALUE_DOMAINS)) for _ in range(rng.randint(1, 5))]
    out = []
    for name in names:
        coefficients = {
            value: round(rng.uniform(-5.0, 5.0), 3)
            for value in VALUE_DOMAINS[name]
            if rng.random() < 0.85
        }
        out.append(scoring.Criterion(name, round(rng.uniform(0.0, 5.0), 3), coefficients))
    return tuple(out)


def random_config(rng: random.Random):
    """One scenario doc with every action enabled, plus world and hands."""
    n_actions = rng.randint(1, 4)
    n_participants = rng.randint(1, 4)

    action_lines = []
    object_lines = []
    relation_lines = []
    for i in range(1, n_actions + 1):
        roles = rng.sample(["r1", "r2", "anyone"], rng.randint(1, 3))
        role_clause = " ".join(f"{r}:{rng.randint(1, 4)}" for r in roles)
        if rng.random() < 0.7:
            object_lines.append(f"  object obj-{i} at {rng.randint(0, 12)} {rng.randint(0, 12)} abilities t-{i} holdable")
            actors = " ".join(rng.sample(ACTOR_ABILITIES, rng.randint(1, 2)))
            relation_lines.append(f"  relation rel-{i} actor {actors} target t-{i}")
            hands = ""
            if rng.random() < 0.4:
                before = rng.choice(["free free", "any any", f"hold(t-{i}) any", "free busy"])
                after = rng.choice(["free free", "any any", f"any hold(t-{i})", "busy any"])
                hands = f" hands {before} -> {after}"
            urgent = " urgent" if rng.random() < 0.15 else ""
            action_lines.append(
                f"  action act-{i} interact rel-{i} obj-{i} roles {role_clause}{hands}{urgent}"
            )
        else:
            recipient = rng.choice(ROLE_POOL)
            action_lines.append(f"  action act-{i} say {recipient} \"message {i}\" roles {role_clause}")
    if not object_lines:
        object_lines.append("  object anchor at 0 0 abilities fixed")

    step_ids = [f"p{i}" for i in range(1, n_actions + 1)]
    graph = ["  init s0", "  step s0"]
    graph.append(f"  t s0 -> {'+'.join(step_ids)}")
    for sid, i in zip(step_ids, range(1, n_actions + 1)):
        graph.append(f"  step {sid} act-{i}")
    graph.append(f"  t {'+'.join(step_ids)} -> end")
    graph.append("  step end")
    graph.append("  terminal end")

    text = "\n".join(
        ["SCENARIO scoring-config", "WORLD"]
        + object_lines
        + relation_lines
        + ["ROLES", "  role r1", "  role r2", "ACTIONS"]
        + action_lines
        + ["GRAPH"]
        + graph
    ) + "\n"
    doc = parse(text)

    world = WorldState(objects=dict(doc.world.objects), relations=dict(doc.world.relations))
    hands: dict[str, Hands] = {}
    holdable = sorted(o for o in world.objects if o.startswith("obj-"))
    for p in range(1, n_participants + 1):
        hid = f"h{p}"
        roles = tuple(rng.sample(ROLE_POOL, rng.randint(1, 2)))
        abilities = frozenset(a for a in ACTOR_ABILITIES if rng.random() < 0.6)
        position = (round(rng.uniform(0.0, 12.0), 2), round(rng.uniform(0.0, 12.0), 2))
        current = ("act-busy", 5) if rng.random() < 0.15 else None
        world.humanoids[hid] = Humanoid(
            id=hid,
            kind=HumanoidKind.AVATAR,
            roles=roles,
            abilities=abilities,
            position=position,
            current_action=current,
        )
        pair = Hands.both_free()
        for hand in ("left", "right"):
            draw = rng.random()
            if draw < 0.15:
                pair = pair.replace(hand, HandState(kind=HandKind.BUSY))
            elif draw < 0.3 and holdable:
                obj_id = rng.choice(holdable)
                obj = world.objects[obj_id]
                if obj.held_by is None:
                    world.objects[obj_id] = replace(obj, held_by=(hid, hand))
                    pair = pair.replace(hand, HandState(kind=HandKind.HOLDING, item=obj_id))
        hands[hid] = pair
    return doc, world, hands


def _oracle_suitable(doc, world, spec, humanoid) -> bool:
    if spec.kind is not ActionKind.INTERACTION:
        return True
    relation = world.relations.get(spec.relation or "")
    return relation is not None and relation.actor_abilities <= humanoid.abilities


def _oracle_priority(doc, world, spec, humanoid):
    best = None
    for role_spec in spec.roles:
        if role_spec.role in humanoid.roles:
            matched = True
        elif role_spec.role == "anyone":
            matched = _oracle_suitable(doc, world, spec, humanoid)
        else:
            matched = False
        if matched and (best is None or role_spec.priority < best):
            best = role_spec.priority
    return best


def _oracle_value(name, doc, world, spec, humanoid, priority, verdicts):
    if name == "role_priority":
        if priority is None:
            return "none"
        return str(priority) if priority <= 2 else "3plus"
    if name == "proximity":
        if spec.kind is not ActionKind.INTERACTION or spec.target not in world.objects:
            return "na"
        d = math.dist(humanoid.position, world.objects[spec.target].position)
        for bound, label in ((1.0, "lt1"), (3.0, "lt3"), (10.0, "lt10")):
            if d < bound:
                return label
        return "ge10"
    if name == "easiness":
        verdict = verdicts.get(humanoid.id, {}).get(spec.id)
        return verdict.value if verdict is not None else "infeasible"
    return CUSTOM_EXTRACTORS[name](None, spec, humanoid)


def oracle_scores(doc, state, world, hands, criteria) -> dict:
    """Recompute the full ranking table from first principles."""
    verdicts = {}
    for hid in sorted(world.humanoids):
        humanoid = world.humanoids[hid]
        if humanoid.mid_action:
            continue
        verdicts[hid] = planner.lookahead_blocking(
            world, doc, state, hid, hands.get(hid, Hands.both_free()), humanoid.roles
        )
    out = {}
    for action_id in sorted(doc.actions):
        spec = doc.actions[action_id]
        rows = []
        for hid in sorted(world.humanoids):
            humanoid = world.humanoids[hid]
            if humanoid.mid_action:
                continue
            priority = _oracle_priority(doc, world, spec, humanoid)
            if priority is None:
                continue
            total = 0.0
            breakdown = []
            for criterion in criteria:
                value = _oracle_value(
                    criterion.name, doc, world, spec, humanoid, priority, verdicts
                )
                contribution = criterion.weight * criterion.coefficients.get(value, 0.0)
                total += contribution
                breakdown.append((criterion.name, value, contribution))
            rows.append((total, hid, tuple(breakdown)))
        rows.sort(key=lambda r: (-r[0], r[1]))
        out[action_id] = [
            (hid, total, index + 1, len(rows) == 1, breakdown)
            for index, (total, hid, breakdown) in enumerate(rows)
        ]
    return out


def normalize(scores: dict) -> dict:
    """Impl output reshaped into the oracle's row tuples."""
    return {
        action: [(c.humanoid, c.score, c.rank, c.sole_candidate, c.breakdown) for c in rows]
        for action, rows in scores.items()
    }


def compare_once(rng: random.Random):
    doc, world, hands = random_config(rng)
    state, _ = engine.initial_state(doc)
    criteria = random_criteria(rng)
    got = normalize(scoring.score_candidates(doc, state, world, hands, criteria))
    want = oracle_scores(doc, state, world, hands, criteria)
    return got, want, (doc, world, hands, state, criteria)
