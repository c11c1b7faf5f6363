"""Token state machine running a scenario graph.

Marking rules: every marked step offers its action; once the action has
run the step is done; a transition fires as soon as all of its from-steps
are done, moving the tokens onward (splits fan out, joins wait).  Steps
without an action pass tokens straight through.  Collaborative steps
start on their own the moment the join over their notify steps fires,
which happens exactly when every required notification is simultaneously
pending.  All operations are pure: they return a new state plus the
events that describe what happened.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from . import events as ev
from .dsl.ast import ANYONE, ActionKind, ScenarioDoc
from .errors import (
    ActionNotEnabled,
    ClockRegression,
    RoleNotAllowed,
    SafenessViolation,
    UnknownAction,
)


@dataclass(frozen=True)
class CompletedAction:
    """One entry of the append-only completion log."""

    tick: int
    index: int
    action: str
    performers: tuple[str, ...]

    def to_payload(self) -> dict:
        return {
            "tick": self.tick,
            "index": self.index,
            "action": self.action,
            "performers": list(self.performers),
        }


@dataclass(frozen=True)
class ScenarioState:
    """Marking of the graph plus notification bookkeeping.

    ``done`` is the subset of marked steps whose action already ran this
    visit; joins watch it.  ``pending`` maps a collaborative action id to
    {notify action id: (humanoid, expiry tick)}.
    """

    marked: frozenset[str]
    done: frozenset[str]
    clock: int = 0
    finished: bool = False
    pending: dict[str, dict[str, tuple[str, int]]] = None  # type: ignore[assignment]
    completed: tuple[CompletedAction, ...] = ()

    def __post_init__(self) -> None:
        if self.pending is None:
            object.__setattr__(self, "pending", {})

    def to_payload(self) -> dict:
        return {
            "marked": sorted(self.marked),
            "done": sorted(self.done),
            "clock": self.clock,
            "finished": self.finished,
            "pending": {
                collab: {
                    slot: {"humanoid": who, "expiry": expiry}
                    for slot, (who, expiry) in sorted(slots.items())
                }
                for collab, slots in sorted(self.pending.items())
            },
            "completed": [c.to_payload() for c in self.completed],
        }


def _copy_pending(pending: dict[str, dict[str, tuple[str, int]]]) -> dict:
    return {collab: dict(slots) for collab, slots in pending.items()}


def initial_state(doc: ScenarioDoc) -> tuple[ScenarioState, list[ev.Event]]:
    """Marking of the initial steps, with pass-through steps already settled."""
    state = ScenarioState(marked=frozenset(doc.graph.initial), done=frozenset())
    return _settle(state, doc, tick=0)


def enabled_actions(state: ScenarioState, doc: ScenarioDoc) -> list[tuple[str, tuple]]:
    """Actions currently offered by the marking, sorted by action id.

    Collaborative actions never appear: they start automatically.
    """
    offered: dict[str, tuple] = {}
    for step_id in state.marked - state.done:
        step = doc.graph.steps.get(step_id)
        if step is None or step.action is None:
            continue
        spec = doc.actions.get(step.action)
        if spec is None or spec.kind is ActionKind.COLLABORATIVE:
            continue
        offered[spec.id] = spec.roles
    return sorted(offered.items())


def roles_permit(spec_roles: tuple, performers: Iterable[str], roles_of: Mapping[str, tuple[str, ...]]) -> bool:
    """True when at least one performer carries an allowed role."""
    allowed = {r.role for r in spec_roles}
    if ANYONE in allowed:
        return True
    for who in performers:
        if allowed & set(roles_of.get(who, ())):
            return True
    return False


_roles_permit = roles_permit


def _expire(
    state: ScenarioState, doc: ScenarioDoc, tick: int
) -> tuple[ScenarioState, list[ev.Event]]:
    """Drop notifications whose expiry tick has been reached (closed bound)."""
    drops: list[tuple[str, str, str, int]] = []
    for collab, slots in sorted(state.pending.items()):
        for slot, (who, expiry) in sorted(slots.items()):
            if expiry <= tick:
                drops.append((collab, slot, who, expiry))
    if not drops:
        return state, []
    pending = _copy_pending(state.pending)
    done = set(state.done)
    out = []
    for collab, slot, who, expiry in drops:
        del pending[collab][slot]
        if not pending[collab]:
            del pending[collab]
        # The notify step becomes performable again.
        for step in doc.steps_for_action(slot):
            done.discard(step.id)
        out.append(
            ev.draft(
                tick,
                ev.NOTIFICATION_EXPIRED,
                {"action": slot, "collaborative": collab, "humanoid": who, "expiry_tick": expiry},
            )
        )
    return replace(state, pending=pending, done=frozenset(done)), out


def _settle(
    state: ScenarioState, doc: ScenarioDoc, tick: int
) -> tuple[ScenarioState, list[ev.Event]]:
    """Fire every ready transition until the marking is stable."""
    marked = set(state.marked)
    done = set(state.done)
    pending = _copy_pending(state.pending)
    completed = list(state.completed)
    out: list[ev.Event] = []

    def absorb(step_id: str) -> None:
        """Handle a token arriving on a step."""
        step = doc.graph.steps.get(step_id)
        if step is None:
            return
        if step.action is None:
            done.add(step_id)
            return
        spec = doc.actions.get(step.action)
        if spec is not None and spec.kind is ActionKind.COLLABORATIVE:
            performers = tuple(sorted(who for who, _ in pending.get(spec.id, {}).values()))
            pending.pop(spec.id, None)
            out.append(
                ev.draft(tick, ev.COLLABORATIVE_STARTED, {"action": spec.id, "performers": list(performers)})
            )
            completed.append(CompletedAction(tick, len(completed), spec.id, performers))
            out.append(
                ev.draft(tick, ev.ACTION_COMPLETED, {"action": spec.id, "performers": list(performers)})
            )
            done.add(step_id)

    for step_id in sorted(marked):
        step = doc.graph.steps.get(step_id)
        if step is not None and step.action is None:
            done.add(step_id)

    changed = True
    while changed:
        changed = False
        for trans in sorted(doc.graph.transitions, key=lambda t: t.sort_key):
            if not trans.from_steps:
                continue
            if trans.from_steps <= done and trans.from_steps <= marked:
                marked -= trans.from_steps
                done -= trans.from_steps
                for to_step in sorted(trans.to_steps):
                    if to_step in marked:
                        raise SafenessViolation(f"step {to_step!r} would carry two tokens")
                    marked.add(to_step)
                    absorb(to_step)
                changed = True

    new_state = replace(
        state,
        marked=frozenset(marked),
        done=frozenset(done),
        pending=pending,
        completed=tuple(completed),
        clock=tick,
    )
    if not new_state.finished and new_state.marked and new_state.marked == doc.graph.terminal:
        new_state = replace(new_state, finished=True)
        out.append(
            ev.draft(tick, ev.SCENARIO_COMPLETED, {"final_marking": sorted(new_state.marked)})
        )
    return new_state, out


def perform(
    state: ScenarioState,
    doc: ScenarioDoc,
    action_id: str,
    performers: Iterable[str],
    tick: int,
    roles_of: Mapping[str, tuple[str, ...]] | None = None,
) -> tuple[ScenarioState, list[ev.Event]]:
    """Run an enabled action and advance the marking.

    Notify-intent actions record a pending notification; if that makes
    every slot of the collaboration simultaneously pending, the
    collaborative action starts (and completes) within this same call.
    """
    performers = tuple(performers)
    if tick < state.clock:
        raise ClockRegression(f"tick {tick} < clock {state.clock}")
    spec = doc.actions.get(action_id)
    if spec is None:
        raise UnknownAction(action_id)
    if spec.kind is ActionKind.COLLABORATIVE:
        raise ActionNotEnabled(f"{action_id}: collaborative actions start automatically")
    if not performers:
        raise RoleNotAllowed(f"{action_id}: no performers given")

    state, out = _expire(state, doc, tick)

    steps = [
        s.id
        for s in doc.steps_for_action(action_id)
        if s.id in state.marked and s.id not in state.done
    ]
    if not steps:
        raise ActionNotEnabled(action_id)
    step_id = steps[0]

    if roles_of is not None and not _roles_permit(spec.roles, performers, roles_of):
        raise RoleNotAllowed(f"{action_id}: roles of {list(performers)} not in its role list")

    done = set(state.done)
    pending = _copy_pending(state.pending)
    completed = list(state.completed)

    if spec.kind is ActionKind.NOTIFY_INTENT:
        collab = doc.actions.get(spec.collaborative_id or "")
        if collab is None or collab.timeout_ticks is None:
            raise UnknownAction(f"{action_id}: dangling collaborative reference")
        expiry = tick + collab.timeout_ticks
        who = sorted(performers)[0]
        pending.setdefault(collab.id, {})[action_id] = (who, expiry)
        out.append(
            ev.draft(
                tick,
                ev.NOTIFY_INTENT_RECORDED,
                {"action": action_id, "collaborative": collab.id, "humanoid": who, "expiry_tick": expiry},
            )
        )
    else:
        out.append(
            ev.draft(tick, ev.ACTION_COMPLETED, {"action": action_id, "performers": sorted(performers)})
        )
    completed.append(CompletedAction(tick, len(completed), action_id, tuple(sorted(performers))))
    done.add(step_id)

    state = replace(
        state, done=frozenset(done), pending=pending, completed=tuple(completed), clock=tick
    )
    state, settle_events = _settle(state, doc, tick)
    return state, out + settle_events


def advance_clock(
    state: ScenarioState, doc: ScenarioDoc, tick: int
) -> tuple[ScenarioState, list[ev.Event]]:
    """Move the clock forward, expiring notifications on the way."""
    if tick < state.clock:
        raise ClockRegression(f"tick {tick} < clock {state.clock}")
    state, out = _expire(state, doc, tick)
    return replace(state, clock=tick), out


def progress(state: ScenarioState, doc: ScenarioDoc) -> dict:
    """Completion summary used by snapshots and reports."""
    total = len(doc.graph.steps)
    visited = {c.action for c in state.completed}
    return {
        "steps_total": total,
        "actions_completed": len(state.completed),
        "distinct_actions": len(visited),
        "finished": state.finished,
    }
