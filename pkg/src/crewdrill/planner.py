"""Hand resource planning: implicit grasp/lay insertion and lookahead.

plan_hands answers "can this humanoid arrange its two hands for that
action, and with which implicit steps".  A requirement written for
(left, right) may be satisfied with the hands swapped; the planner
evaluates both assignments and keeps the cheaper one (ties prefer the
literal one).  Busy hands are untouchable: no implicit step creates or
clears Busy.

lookahead_blocking walks the graph a few actions deep to predict whether
starting an action would strand the humanoid in a sequence it cannot
finish alone; such actions are flagged RequiresCollaboration so the
repartition scoring can steer them toward somebody else.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from . import engine
from .dsl.ast import ANYONE, ActionKind, ActionSpec, ScenarioDoc
from .errors import HandsUnavailable, InvalidHandState
from .hands import HAND_NAMES, HandKind, Hands, HandState
from .world import WorldState, grasp_object, lay_object

DEFAULT_LOOKAHEAD_DEPTH = 4


class Verdict(str, Enum):
    FEASIBLE = "feasible"
    REQUIRES_COLLABORATION = "requires_collaboration"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class ImplicitStep:
    """One planner-inserted step: grasp an object or lay one down."""

    op: str  # "grasp" | "lay"
    object_id: str
    hand: str


@dataclass(frozen=True)
class HandPlan:
    """Shortest implicit-step sequence reaching an action's before states."""

    steps: tuple[ImplicitStep, ...]
    final: Hands
    swapped: bool


def _check_actual(hands: Hands) -> None:
    for name in HAND_NAMES:
        state = hands.get(name)
        if state.is_indifferent:
            raise InvalidHandState(f"{name} hand cannot actually be Indifferent")
        if state.is_holding and not state.item:
            raise InvalidHandState(f"{name} hand holds nothing nameable")


def _matches(world: WorldState, object_id: str, token: str) -> bool:
    if object_id == token:
        return True
    obj = world.objects.get(object_id)
    return obj is not None and token in obj.abilities


def _available_objects(world: WorldState, humanoid_id: str, token: str) -> list[str]:
    """Objects matching a hold token that nobody else has in hand."""
    found = []
    for obj_id in sorted(world.objects):
        obj = world.objects[obj_id]
        if obj.held_by is not None:
            continue
        if obj_id == token or token in obj.abilities:
            found.append(obj_id)
    return found


def _plan_one_assignment(
    hands: Hands, humanoid_id: str, requirement: Hands, world: WorldState
) -> tuple[list[ImplicitStep], Hands] | None:
    lays: list[ImplicitStep] = []
    grasp_needs: list[tuple[str, str]] = []  # (hand, token)
    kept: set[str] = set()
    released: list[str] = []

    for name in HAND_NAMES:
        current = hands.get(name)
        wanted = requirement.get(name)
        if wanted.is_indifferent:
            if current.is_holding and current.item:
                kept.add(current.item)
            continue
        if wanted.is_busy:
            if not current.is_busy:
                return None
            continue
        if wanted.is_free:
            if current.is_busy:
                return None
            if current.is_holding:
                lays.append(ImplicitStep("lay", current.item or "", name))
                released.append(current.item or "")
            continue
        # wanted holds a token
        if not wanted.item:
            raise InvalidHandState("requirement holds nothing nameable")
        if current.is_busy:
            return None
        if current.is_holding and current.item and _matches(world, current.item, wanted.item):
            kept.add(current.item)
            continue
        if current.is_holding:
            lays.append(ImplicitStep("lay", current.item or "", name))
            released.append(current.item or "")
        grasp_needs.append((name, wanted.item))

    grasps: list[ImplicitStep] = []
    claimed: set[str] = set()
    for name, token in grasp_needs:
        pool = [
            obj_id
            for obj_id in _available_objects(world, humanoid_id, token) + sorted(released)
            if obj_id not in claimed
            and obj_id not in kept
            and _matches(world, obj_id, token)
        ]
        pool = sorted(dict.fromkeys(pool))
        if not pool:
            return None
        choice = pool[0]
        claimed.add(choice)
        grasps.append(ImplicitStep("grasp", choice, name))

    final = hands
    for step in lays:
        final = final.replace(step.hand, HandState.free())
    for step in grasps:
        final = final.replace(step.hand, HandState.holding(step.object_id))
    return lays + grasps, final


def plan_hands(
    hands: Hands, humanoid_id: str, action: ActionSpec, world: WorldState
) -> HandPlan | None:
    """Shortest implicit grasp/lay sequence reaching the action's before
    states, or None when no arrangement works."""
    _check_actual(hands)
    requirement = action.hands
    if requirement is None:
        return HandPlan((), hands, swapped=False)

    literal = _plan_one_assignment(hands, humanoid_id, requirement.before, world)
    mirrored = _plan_one_assignment(
        hands,
        humanoid_id,
        Hands(requirement.before.right, requirement.before.left),
        world,
    )
    if literal is None and mirrored is None:
        return None
    if mirrored is None or (literal is not None and len(literal[0]) <= len(mirrored[0])):
        steps, final = literal  # type: ignore[misc]
        return HandPlan(tuple(steps), final, swapped=False)
    steps, final = mirrored
    return HandPlan(tuple(steps), final, swapped=True)


def simulate_plan(
    world: WorldState, hands: Hands, humanoid_id: str, plan: HandPlan
) -> tuple[WorldState, Hands]:
    """Carry out a plan's implicit steps on world and hands."""
    position = (
        world.humanoids[humanoid_id].position
        if humanoid_id in world.humanoids
        else None
    )
    for step in plan.steps:
        if step.op == "lay":
            at = position or world.object(step.object_id).position
            world = lay_object(world, humanoid_id, step.object_id, at)
            hands = hands.replace(step.hand, HandState.free())
        else:
            world = grasp_object(world, humanoid_id, step.object_id, step.hand)
            hands = hands.replace(step.hand, HandState.holding(step.object_id))
    return world, hands


def complete_action(
    world: WorldState, hands: Hands, humanoid_id: str, action: ActionSpec, swapped: bool
) -> tuple[WorldState, Hands]:
    """Apply the action's after states to the performer's hands.

    Raises HandsUnavailable when an after state demands holding an object
    that no longer exists unheld (a conflicting grab since planning).
    """
    requirement = action.hands
    if requirement is None:
        return world, hands
    after = requirement.after
    if swapped:
        after = Hands(after.right, after.left)
    position = (
        world.humanoids[humanoid_id].position
        if humanoid_id in world.humanoids
        else None
    )

    def release(hand_name: str) -> None:
        nonlocal world, hands
        state = hands.get(hand_name)
        if state.is_holding and state.item:
            at = position or world.object(state.item).position
            world = lay_object(world, humanoid_id, state.item, at)
        hands = hands.replace(hand_name, HandState.free())

    settled_holds: set[str] = set()
    for name in HAND_NAMES:
        wanted = after.get(name)
        current = hands.get(name)
        if wanted.is_indifferent:
            continue
        if wanted.is_free:
            release(name)
            continue
        if wanted.is_busy:
            release(name)
            hands = hands.replace(name, HandState.busy())
            continue
        if not wanted.item:
            raise InvalidHandState("after state holds nothing nameable")
        if current.is_holding and current.item and _matches(world, current.item, wanted.item):
            settled_holds.add(name)
            continue
        release(name)
        target = None
        transfer_from = None
        if wanted.item in world.objects:
            obj = world.objects[wanted.item]
            if obj.held_by is None:
                target = wanted.item
            elif (
                obj.held_by[0] == humanoid_id
                and obj.held_by[1] != name
                and obj.held_by[1] not in settled_holds
            ):
                # Hand-to-hand transfer: the object never touches the ground.
                # Stealing from a hand whose own after state already holds
                # it would be unsatisfiable, hence the guard.
                target = wanted.item
                transfer_from = obj.held_by[1]
        else:
            pool = _available_objects(world, humanoid_id, wanted.item)
            pool = [o for o in pool if o not in hands.held_items()]
            if pool:
                target = pool[0]
        if target is None:
            raise HandsUnavailable(
                f"{action.id}: nothing matching {wanted.item!r} left for the {name} hand"
            )
        if transfer_from is not None:
            obj = world.objects[target]
            world = world.with_object(replace(obj, held_by=(humanoid_id, name)))
            hands = hands.replace(transfer_from, HandState.free())
        else:
            world = grasp_object(world, humanoid_id, target, name)
        hands = hands.replace(name, HandState.holding(target))
        settled_holds.add(name)
    return world, hands


def _role_compatible(spec: ActionSpec, roles: tuple[str, ...]) -> bool:
    for role_spec in spec.roles:
        if role_spec.role == ANYONE or role_spec.role in roles:
            return True
    return False


def _successor_steps(doc: ScenarioDoc, step_id: str) -> list[str]:
    out: set[str] = set()
    for trans in doc.graph.transitions:
        if step_id in trans.from_steps:
            out |= trans.to_steps
    return sorted(out)


def _continuation_blocked(
    doc: ScenarioDoc,
    world: WorldState,
    hands: Hands,
    humanoid_id: str,
    roles: tuple[str, ...],
    step_id: str,
    depth: int,
) -> bool:
    """True when every role-compatible path onward hits an infeasible action."""
    if depth <= 0:
        return False
    branches = []
    for next_step in _successor_steps(doc, step_id):
        action_id = doc.graph.steps[next_step].action
        if action_id is None:
            branches.append((next_step, None))
            continue
        spec = doc.actions.get(action_id)
        if spec is None or spec.kind is ActionKind.COLLABORATIVE:
            continue
        if not _role_compatible(spec, roles):
            continue
        branches.append((next_step, spec))
    if not branches:
        return False
    for next_step, spec in branches:
        if spec is None or spec.kind is not ActionKind.INTERACTION:
            if not _continuation_blocked(doc, world, hands, humanoid_id, roles, next_step, depth - 1):
                return False
            continue
        plan = plan_hands(hands, humanoid_id, spec, world)
        if plan is None:
            continue  # this branch is blocked, check the others
        w2, h2 = simulate_plan(world, hands, humanoid_id, plan)
        try:
            w2, h2 = complete_action(w2, h2, humanoid_id, spec, plan.swapped)
        except HandsUnavailable:
            continue
        if not _continuation_blocked(doc, w2, h2, humanoid_id, roles, next_step, depth - 1):
            return False
    return True


def lookahead_blocking(
    world: WorldState,
    doc: ScenarioDoc,
    state: engine.ScenarioState,
    humanoid_id: str,
    hands: Hands,
    roles: tuple[str, ...],
    depth: int = DEFAULT_LOOKAHEAD_DEPTH,
) -> dict[str, Verdict]:
    """Verdict per enabled action for one humanoid.

    Feasible: hands can be arranged now and some continuation stays open.
    RequiresCollaboration: doable now, but every role-compatible path of
    up to ``depth`` further actions dead-ends in an infeasible plan.
    Infeasible: no implicit-step arrangement satisfies the action at all.
    """
    verdicts: dict[str, Verdict] = {}
    for action_id, _ in engine.enabled_actions(state, doc):
        spec = doc.actions[action_id]
        plan = plan_hands(hands, humanoid_id, spec, world)
        if plan is None:
            verdicts[action_id] = Verdict.INFEASIBLE
            continue
        w2, h2 = simulate_plan(world, hands, humanoid_id, plan)
        try:
            w2, h2 = complete_action(w2, h2, humanoid_id, spec, plan.swapped)
        except HandsUnavailable:
            verdicts[action_id] = Verdict.INFEASIBLE
            continue
        blocked = False
        for step in doc.steps_for_action(action_id):
            if step.id not in state.marked or step.id in state.done:
                continue
            if _continuation_blocked(doc, w2, h2, humanoid_id, roles, step.id, depth):
                blocked = True
            break
        verdicts[action_id] = (
            Verdict.REQUIRES_COLLABORATION if blocked else Verdict.FEASIBLE
        )
    return verdicts
