"""Virtual-human decision tests: candidate algebra, tags and statistics.

Candidate collection and tagging are checked against independent
set-algebra recomputations over randomized configs; branch selection is
checked statistically with binomial three-sigma bounds over seeded
draws.
"""

from __future__ import annotations

import math
import random
from collections import Counter

from crewdrill import agents, engine, profiles, scoring
from crewdrill.agents import Decision, Tag
from crewdrill.dsl.ast import ActionKind
from crewdrill.dsl.parser import parse
from crewdrill.errors import ConfigError
from crewdrill.participants import Humanoid, HumanoidKind
from crewdrill.world import WorldState

from scoring_oracle import random_config

PLAYGROUND = """SCENARIO playground
WORLD
  object knob at 1 1 abilities turnable
  object p1 at 2 2 abilities pokeable
  object p2 at 2 3 abilities pokeable
  object p3 at 3 2 abilities pokeable
  object p4 at 3 3 abilities pokeable
  relation turn actor deft target turnable
  relation poke actor deft target pokeable
ROLES
  role crew
ACTIONS
  action twist interact turn knob roles crew:1
  action later interact turn knob roles crew:1
GRAPH
  init s
  step s twist
  t s -> mid
  step mid later
  t mid -> end
  step end
  terminal end
"""


def _crew(humanoid_id: str, position=(1.0, 1.0), abilities=("deft",), roles=("crew",)):
    return Humanoid(
        id=humanoid_id,
        kind=HumanoidKind.AVATAR,
        roles=tuple(roles),
        abilities=frozenset(abilities),
        position=position,
    )


def _playground(*humanoids):
    doc = parse(PLAYGROUND)
    state, _ = engine.initial_state(doc)
    world = WorldState(objects=dict(doc.world.objects), relations=dict(doc.world.relations))
    for h in humanoids:
        world.humanoids[h.id] = h
    scores = scoring.score_candidates(doc, state, world, {})
    return doc, state, world, scores


# ---------------------------------------------------------------------------
# candidate collection


def _oracle_refs(doc, world, humanoid_id, scores, demands):
    """Expected candidate refs recomputed from first principles."""
    refs = []
    enabled_pairs = set()
    for action_id in scores:
        spec = doc.actions[action_id]
        if spec.kind is ActionKind.INTERACTION and spec.relation and spec.target:
            enabled_pairs.add((spec.relation, spec.target))
        if any(r.humanoid == humanoid_id for r in scores[action_id]):
            refs.append(f"action:{action_id}")
    humanoid = world.humanoids.get(humanoid_id)
    if humanoid is not None:
        for relation in world.relations.values():
            if not relation.actor_abilities <= humanoid.abilities:
                continue
            for obj in world.objects.values():
                if relation.target_abilities <= obj.abilities:
                    if (relation.name, obj.id) not in enabled_pairs:
                        refs.append(f"world:{relation.name}:{obj.id}")
    for demand in demands:
        if f"action:{demand}" not in refs and demand in doc.actions:
            refs.append(f"action:{demand}")
    return sorted(refs)


def test_collected_candidates_match_set_algebra_oracle():
    for seed in range(200):
        rng = random.Random(seed)
        doc, world, hands = random_config(rng)
        state, _ = engine.initial_state(doc)
        scores = scoring.score_candidates(doc, state, world, hands)
        pool = sorted(doc.actions) + ["ghost-action"]
        demands = tuple(rng.sample(pool, rng.randint(0, min(2, len(pool)))))
        for humanoid_id in sorted(world.humanoids):
            got = [
                c.ref
                for c in agents.collect_candidates(doc, state, world, humanoid_id, scores, demands)
            ]
            want = _oracle_refs(doc, world, humanoid_id, scores, demands)
            assert got == want, f"seed {seed} {humanoid_id}: {got} != {want}"
            assert got == sorted(got)


# ---------------------------------------------------------------------------
# tagging


def _oracle_needed(doc, world, action_id):
    spec = doc.actions.get(action_id)
    if spec is None or spec.kind is not ActionKind.INTERACTION:
        return set()
    needed = {spec.target} if spec.target else set()
    if spec.hands is not None:
        for hand_state in (spec.hands.before.left, spec.hands.before.right):
            if hand_state.is_holding and hand_state.item:
                for obj_id, obj in world.objects.items():
                    if obj_id == hand_state.item or hand_state.item in obj.abilities:
                        needed.add(obj_id)
    return needed


def _oracle_tags(doc, world, humanoid_id, scores, demands, candidate):
    contested = set()
    for action_id, rows in scores.items():
        if rows and rows[0].humanoid != humanoid_id:
            contested |= _oracle_needed(doc, world, action_id)
    tags = set()
    touched = set()
    if candidate.action_id is None:
        tags.add(Tag.OFF_SCENARIO)
        touched = {candidate.target}
    else:
        spec = doc.actions[candidate.action_id]
        mine = next(
            (r for r in scores.get(candidate.action_id, []) if r.humanoid == humanoid_id), None
        )
        if spec.kind is ActionKind.NOTIFY_INTENT:
            tags.add(Tag.COLLABORATIVE)
        if spec.urgent:
            tags.add(Tag.URGENT)
        if mine is not None and mine.rank == 1:
            tags.add(Tag.BEST_FOR_ME)
        if mine is not None and mine.sole_candidate:
            tags.add(Tag.SOLE_CANDIDATE)
        if candidate.action_id in demands:
            tags.add(Tag.PEDAGOGICAL_DEMAND)
        if mine is None and candidate.action_id not in scores:
            tags.add(Tag.OFF_SCENARIO)
        if spec.kind is ActionKind.INTERACTION and spec.target:
            touched = {spec.target}
    if touched & contested:
        tags.add(Tag.HINDERING)
    if Tag.COLLABORATIVE in tags or Tag.URGENT in tags:
        tags.add(Tag.IMPORTANT)
    return frozenset(tags)


def test_tags_match_recomputation_over_random_configs():
    for seed in range(200):
        rng = random.Random(10_000 + seed)
        doc, world, hands = random_config(rng)
        state, _ = engine.initial_state(doc)
        scores = scoring.score_candidates(doc, state, world, hands)
        demands = tuple(rng.sample(sorted(doc.actions), rng.randint(0, 1)))
        for humanoid_id in sorted(world.humanoids):
            raw = agents.collect_candidates(doc, state, world, humanoid_id, scores, demands)
            tagged = agents.tag_candidates(raw, doc, world, humanoid_id, scores, demands)
            for candidate in tagged:
                want = _oracle_tags(doc, world, humanoid_id, scores, demands, candidate)
                assert candidate.tags == want, (
                    f"seed {seed} {humanoid_id} {candidate.ref}: {set(candidate.tags)} != {set(want)}"
                )


# ---------------------------------------------------------------------------
# branch statistics


def _tagged_for(doc, state, world, scores, humanoid_id, demands=()):
    raw = agents.collect_candidates(doc, state, world, humanoid_id, scores, demands)
    return agents.tag_candidates(raw, doc, world, humanoid_id, scores, demands)


def test_pure_error_profile_is_uniform_over_off_scenario_pool():
    doc, state, world, scores = _playground(_crew("h1"))
    tagged = _tagged_for(doc, state, world, scores, "h1")
    pool = sorted(c.ref for c in tagged if Tag.OFF_SCENARIO in c.tags)
    assert pool == [
        "world:poke:p1",
        "world:poke:p2",
        "world:poke:p3",
        "world:poke:p4",
    ]
    profile = profiles.PedagogicalProfile(0.0, 1.0, 0.0, 0.0)
    draws = 10_000
    counts: Counter[str] = Counter()
    for i in range(draws):
        decision = agents.select_action(doc, tagged, profile, random.Random(i))
        assert decision.kind == "interact_world"
        counts[f"world:{decision.relation}:{decision.target}"] += 1
    expected = draws / len(pool)
    bound = 3 * math.sqrt(draws * (1 / len(pool)) * (1 - 1 / len(pool)))
    for ref in pool:
        assert abs(counts[ref] - expected) <= bound, (ref, counts[ref], expected, bound)


def test_pure_idle_profile_always_idles():
    doc, state, world, scores = _playground(_crew("h1"))
    tagged = _tagged_for(doc, state, world, scores, "h1")
    profile = profiles.PedagogicalProfile(0.0, 0.0, 0.0, 1.0)
    for i in range(10_000):
        assert agents.select_action(doc, tagged, profile, random.Random(i)) == Decision.idle()


def test_follow_profile_is_deterministic_and_prefers_demands():
    doc, state, world, scores = _playground(_crew("h1"))
    tutor = profiles.TUTOR
    tagged = _tagged_for(doc, state, world, scores, "h1")
    for i in range(50):
        decision = agents.select_action(doc, tagged, tutor, random.Random(i))
        assert decision == Decision("perform", action_id="twist")
    # A pedagogy demand wins over the scored pick, even off the marking.
    tagged = _tagged_for(doc, state, world, scores, "h1", demands=("later",))
    decision = agents.select_action(doc, tagged, tutor, random.Random(0))
    assert decision == Decision("perform", action_id="later")


def test_empty_branches_fall_back_to_follow_then_idle():
    # No hindering candidates: a pure-hinder profile follows instead.
    doc, state, world, scores = _playground(_crew("h1"))
    tagged = _tagged_for(doc, state, world, scores, "h1")
    hinderer = profiles.PedagogicalProfile(0.0, 0.0, 1.0, 0.0)
    assert agents.select_action(doc, tagged, hinderer, random.Random(1)) == Decision(
        "perform", action_id="twist"
    )
    # No candidates at all: every branch ends in Idle.
    lost = _crew("h9", roles=("bystander",), abilities=())
    doc2, state2, world2, scores2 = _playground(lost)
    tagged2 = _tagged_for(doc2, state2, world2, scores2, "h9")
    errorer = profiles.PedagogicalProfile(0.0, 1.0, 0.0, 0.0)
    assert agents.select_action(doc2, tagged2, errorer, random.Random(2)) == Decision.idle()


def test_hinder_branch_targets_contested_objects():
    # h2 sits on the knob, h1 far away: twist's best candidate is h2.
    far = _crew("h1", position=(9.0, 9.0))
    near = _crew("h2", position=(1.0, 1.0))
    doc, state, world, scores = _playground(far, near)
    assert scores["twist"][0].humanoid == "h2"
    tagged = _tagged_for(doc, state, world, scores, "h1")
    hindering = {c.ref for c in tagged if Tag.HINDERING in c.tags}
    assert hindering == {"action:twist"}
    # Every hinder decision lands on a hindering candidate.
    hinderer = profiles.PedagogicalProfile(0.0, 0.0, 1.0, 0.0)
    for i in range(200):
        decision = agents.select_action(doc, tagged, hinderer, random.Random(i))
        if decision.kind == "interact_world":
            ref = f"world:{decision.relation}:{decision.target}"
        else:
            ref = f"action:{decision.action_id}"
        assert ref in hindering


def test_decide_pipeline_is_seed_deterministic():
    doc, state, world, scores = _playground(_crew("h1"))
    profile = profiles.TROUBLEMAKER
    first = [
        agents.decide(doc, state, world, "h1", scores, profile, random.Random(i))
        for i in range(100)
    ]
    second = [
        agents.decide(doc, state, world, "h1", scores, profile, random.Random(i))
        for i in range(100)
    ]
    assert first == second
    assert len({d.kind for d in first}) > 1


# ---------------------------------------------------------------------------
# profiles


def test_profile_validation_and_presets():
    for preset in profiles.PRESETS.values():
        total = preset.p_follow + preset.p_error + preset.p_hinder + preset.p_idle
        assert abs(total - 1.0) < 1e-9
    try:
        profiles.PedagogicalProfile(0.5, 0.5, 0.5, 0.0)
    except ConfigError:
        pass
    else:
        raise AssertionError("expected ConfigError for bad sum")
    try:
        profiles.PedagogicalProfile(-0.1, 1.1, 0.0, 0.0)
    except ConfigError:
        pass
    else:
        raise AssertionError("expected ConfigError for negative probability")


def test_profile_resolution_and_round_trip():
    assert profiles.resolve_profile("tutor") is profiles.TUTOR
    payload = profiles.COMPANION.to_payload()
    assert profiles.resolve_profile(payload) == profiles.COMPANION
    assert profiles.resolve_profile(profiles.TROUBLEMAKER) is profiles.TROUBLEMAKER
    try:
        profiles.resolve_profile("drill-sergeant")
    except ConfigError:
        pass
    else:
        raise AssertionError("expected ConfigError for unknown preset")
