"""Deterministic log replay and verification.

Replay rebuilds session state from an event log by re-running the same
engine, world and hand-planner operations the recorded events claim
happened.  Events that those operations produce themselves (completions,
collaborative starts, expiries, scenario completion) are matched against
the log instead of applied blindly: the next produced event must equal
the next logged event, byte for byte.  Any mismatch raises
ReplayDivergence carrying the sequence number of the offending event.

A truncated log (no trailer) replays fine up to its last event.  When the
trailer is present, the recomputed state hash must match it.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from . import engine
from . import events as ev
from . import planner
from .dsl.ast import ActionKind, ScenarioDoc
from .dsl.parser import parse
from .errors import CrewdrillError, ReplayDivergence
from .hands import Hands, HandsModel
from .participants import Humanoid, HumanoidKind
from .profiles import resolve_profile
from .session import split_world_action
from .world import WorldState, apply_effects, grasp_object, interaction_allowed, lay_object


@dataclass
class ReplayResult:
    header: dict
    events_applied: int
    final_tick: int
    finished: bool
    final_state_hash: str
    trailer_hash: str | None


@dataclass
class _Running:
    action_id: str
    performer: str
    completes: int
    swapped: bool
    is_world: bool


@dataclass
class _Replayer:
    doc: ScenarioDoc
    world: WorldState
    state: engine.ScenarioState
    hands: HandsModel = field(default_factory=dict)
    running: dict[str, _Running] = field(default_factory=dict)
    expected: deque = field(default_factory=deque)
    next_seq: int = 0

    # -- plumbing ------------------------------------------------------

    def _fail(self, event: ev.Event, message: str) -> None:
        raise ReplayDivergence(event.seq, message)

    def _queue(self, produced: list[ev.Event]) -> None:
        self.expected.extend(produced)

    def _match_head(self, event: ev.Event) -> bool:
        """Consume the event if it is the next one the engine produced."""
        if not self.expected:
            return False
        head = self.expected[0]
        if head.kind == event.kind and head.tick == event.tick and head.payload == event.payload:
            self.expected.popleft()
            return True
        self._fail(
            event,
            f"engine produced {head.kind} {ev.canonical_json(head.payload)}, "
            f"log has {event.kind} {ev.canonical_json(event.payload)}",
        )
        return False

    def _advance_to(self, tick: int, event: ev.Event) -> None:
        if tick < self.state.clock:
            self._fail(event, f"tick went backwards: {self.state.clock} -> {tick}")
        while True:
            expiries = [
                expiry
                for slots in self.state.pending.values()
                for (_, expiry) in slots.values()
                if expiry <= tick
            ]
            if not expiries:
                break
            target = min(expiries)
            self.state, produced = engine.advance_clock(self.state, self.doc, target)
            self._queue(produced)
        if tick > self.state.clock:
            self.state, produced = engine.advance_clock(self.state, self.doc, tick)
            self._queue(produced)

    # -- per-kind application -----------------------------------------

    def apply(self, event: ev.Event) -> None:
        if event.seq != self.next_seq:
            self._fail(event, f"sequence gap: expected {self.next_seq}, got {event.seq}")
        self.next_seq += 1
        self._advance_to(event.tick, event)
        if self.expected:
            self._match_head(event)
            return
        handler = {
            ev.PARTICIPANT_JOINED: self._participant_joined,
            ev.ROLE_CLAIMED: self._role_claimed,
            ev.ACTION_STARTED: self._action_started,
            ev.ACTION_COMPLETED: self._action_completed,
            ev.IMPLICIT_GRASP: self._implicit_grasp,
            ev.IMPLICIT_LAY: self._implicit_lay,
            ev.NOTIFY_INTENT_RECORDED: self._notify_intent,
            ev.COMMUNICATION_SENT: self._communication,
            ev.SCORES_PUBLISHED: self._scores,
        }.get(event.kind)
        if handler is None:
            # Expiries, collaborative starts and completion cascades are
            # only ever produced by the engine; a bare one means the log
            # claims something the state does not support.
            self._fail(event, f"{event.kind} not justified by current state")
            return
        handler(event)

    def _roles_of(self) -> dict[str, tuple[str, ...]]:
        return {h: hum.roles for h, hum in self.world.humanoids.items()}

    def _participant_joined(self, event: ev.Event) -> None:
        p = event.payload
        humanoid_id = p["id"]
        if humanoid_id in self.world.humanoids:
            self._fail(event, f"duplicate participant {humanoid_id!r}")
        kind = HumanoidKind(p["kind"])
        profile = resolve_profile(p["profile"]) if "profile" in p else None
        humanoid = Humanoid(
            id=humanoid_id,
            kind=kind,
            roles=tuple(p["roles"]),
            abilities=frozenset(p["abilities"]),
            position=(float(p["position"][0]), float(p["position"][1])),
            profile=profile,
        )
        self.world.humanoids[humanoid_id] = humanoid
        hands = Hands.from_payload(p["hands"])
        self.hands[humanoid_id] = hands
        for hand_name in ("left", "right"):
            state = hands.get(hand_name)
            if state.is_holding and state.item:
                self.world = grasp_object(self.world, humanoid_id, state.item, hand_name)

    def _role_claimed(self, event: ev.Event) -> None:
        p = event.payload
        humanoid = self.world.humanoids.get(p["humanoid"])
        if humanoid is None:
            self._fail(event, f"role claimed by unknown humanoid {p['humanoid']!r}")
            return
        if p["role"] not in humanoid.roles:
            humanoid.roles = humanoid.roles + (p["role"],)
        humanoid.abilities = frozenset(p["abilities"])

    def _implicit_grasp(self, event: ev.Event) -> None:
        p = event.payload
        try:
            self.world = grasp_object(self.world, p["humanoid"], p["object"], p["hand"])
        except CrewdrillError as exc:
            self._fail(event, f"grasp impossible: {exc}")
            return
        hands = self.hands[p["humanoid"]]
        self.hands[p["humanoid"]] = hands.replace(p["hand"], hands.get(p["hand"]).holding(p["object"]))

    def _implicit_lay(self, event: ev.Event) -> None:
        p = event.payload
        try:
            self.world = lay_object(
                self.world, p["humanoid"], p["object"], self.world.humanoids[p["humanoid"]].position
            )
        except CrewdrillError as exc:
            self._fail(event, f"lay impossible: {exc}")
            return
        hands = self.hands[p["humanoid"]]
        from .hands import HandState

        self.hands[p["humanoid"]] = hands.replace(p["hand"], HandState.free())

    def _action_started(self, event: ev.Event) -> None:
        p = event.payload
        action_id = p["action"]
        performers = list(p["performers"])
        if len(performers) != 1:
            self._fail(event, "an interaction starts with exactly one performer")
        performer = performers[0]
        humanoid = self.world.humanoids.get(performer)
        if humanoid is None:
            self._fail(event, f"unknown performer {performer!r}")
            return
        if performer in self.running:
            self._fail(event, f"{performer} is already mid-action")
        world_ref = split_world_action(action_id)
        if world_ref is not None:
            relation, target = world_ref
            if not interaction_allowed(self.world, performer, relation, target):
                self._fail(event, f"{performer} cannot {relation} {target}")
        else:
            spec = self.doc.actions.get(action_id)
            if spec is None:
                self._fail(event, f"unknown action {action_id!r}")
                return
            enabled = {a for a, _ in engine.enabled_actions(self.state, self.doc)}
            if action_id not in enabled:
                self._fail(event, f"action {action_id!r} not enabled")
            if not engine.roles_permit(spec.roles, [performer], self._roles_of()):
                self._fail(event, f"{performer} lacks a role for {action_id!r}")
        self.running[performer] = _Running(
            action_id=action_id,
            performer=performer,
            completes=event.tick + int(p["duration"]),
            swapped=bool(p.get("swapped", False)),
            is_world=world_ref is not None,
        )

    def _action_completed(self, event: ev.Event) -> None:
        p = event.payload
        action_id = p["action"]
        performers = list(p["performers"])
        world_ref = split_world_action(action_id)
        if world_ref is not None:
            relation, target = world_ref
            run = self.running.get(performers[0]) if performers else None
            if run is None or run.action_id != action_id:
                self._fail(event, f"{action_id!r} completed without starting")
                return
            if run.completes != event.tick:
                self._fail(event, f"{action_id!r} completed at {event.tick}, due {run.completes}")
            del self.running[performers[0]]
            try:
                self.world = apply_effects(self.world, performers[0], relation, target)
            except CrewdrillError as exc:
                self._fail(event, f"effects impossible: {exc}")
            return
        run = self.running.get(performers[0]) if performers else None
        if run is None or run.action_id != action_id:
            self._fail(event, f"{action_id!r} completed without starting")
            return
        if run.completes != event.tick:
            self._fail(event, f"{action_id!r} completed at {event.tick}, due {run.completes}")
        del self.running[performers[0]]
        spec = self.doc.actions[action_id]
        try:
            self.state, produced = engine.perform(
                self.state, self.doc, action_id, performers, event.tick, self._roles_of()
            )
        except CrewdrillError as exc:
            self._fail(event, f"completion rejected: {exc}")
            return
        self._queue(produced)
        self._match_head(event)
        if spec.kind is ActionKind.INTERACTION:
            try:
                self.world = apply_effects(
                    self.world, performers[0], spec.relation or "", spec.target or ""
                )
                self.world, self.hands[performers[0]] = planner.complete_action(
                    self.world, self.hands[performers[0]], performers[0], spec, run.swapped
                )
            except CrewdrillError as exc:
                self._fail(event, f"after-state impossible: {exc}")

    def _notify_intent(self, event: ev.Event) -> None:
        p = event.payload
        try:
            self.state, produced = engine.perform(
                self.state, self.doc, p["action"], [p["humanoid"]], event.tick, self._roles_of()
            )
        except CrewdrillError as exc:
            self._fail(event, f"notification rejected: {exc}")
            return
        self._queue(produced)
        self._match_head(event)

    def _communication(self, event: ev.Event) -> None:
        p = event.payload
        if p.get("sender") not in self.world.humanoids:
            self._fail(event, f"unknown sender {p.get('sender')!r}")
        matched = p.get("action")
        if matched is None:
            return
        try:
            self.state, produced = engine.perform(
                self.state, self.doc, matched, [p["sender"]], event.tick, self._roles_of()
            )
        except CrewdrillError as exc:
            self._fail(event, f"communication rejected: {exc}")
            return
        self._queue(produced)

    def _scores(self, event: ev.Event) -> None:
        # Informational; scores are a function of state, not state itself.
        return

    def state_hash(self) -> str:
        return ev.state_hash(
            self.world.to_payload(),
            self.state.to_payload(),
            {h: hands.to_payload() for h, hands in sorted(self.hands.items())},
        )


def _parse_header(line: str) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayDivergence(-1, f"unreadable header: {exc}") from exc
    if header.get("format") != "crewdrill-events":
        raise ReplayDivergence(-1, "not a crewdrill event log")
    if "scenario" not in header:
        raise ReplayDivergence(-1, "header carries no scenario text")
    return header


def replay_text(text: str) -> ReplayResult:
    """Replay a full log document; raises ReplayDivergence on mismatch."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ReplayDivergence(-1, "empty log")
    header = _parse_header(lines[0])
    scenario_text = header["scenario"]
    if ev.scenario_text_hash(scenario_text) != header.get("scenario_hash"):
        raise ReplayDivergence(-1, "scenario text does not match its hash")
    doc = parse(scenario_text)
    world = WorldState(objects=dict(doc.world.objects), relations=dict(doc.world.relations))
    state, boot = engine.initial_state(doc)
    replayer = _Replayer(doc=doc, world=world, state=state)
    replayer._queue(boot)

    trailer_hash: str | None = None
    applied = 0
    for line in lines[1:]:
        record = json.loads(line)
        if "final_state_hash" in record and "kind" not in record:
            trailer_hash = record["final_state_hash"]
            continue
        event = ev.Event.from_line(line)
        replayer.apply(event)
        applied += 1

    if trailer_hash is not None and replayer.expected:
        head = replayer.expected[0]
        raise ReplayDivergence(
            head.seq if head.seq >= 0 else applied,
            f"log ends but engine still expects {head.kind}",
        )
    final_hash = replayer.state_hash()
    if trailer_hash is not None and final_hash != trailer_hash:
        raise ReplayDivergence(applied, "final state hash does not match trailer")
    return ReplayResult(
        header={k: v for k, v in header.items() if k != "scenario"},
        events_applied=applied,
        final_tick=replayer.state.clock,
        finished=replayer.state.finished,
        final_state_hash=final_hash,
        trailer_hash=trailer_hash,
    )


def replay_file(path: str) -> ReplayResult:
    with open(path, "r", encoding="utf-8") as handle:
        return replay_text(handle.read())
