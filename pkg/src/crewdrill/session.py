"""Session: one running training exercise.

Composes the scenario engine, world, hand planner, scoring and agent
decisions into a tick loop, and records everything as an append-only
event log.  A session is deterministic: same scenario, cast, seed and
command schedule give byte-identical logs.

Tick phases, in order: notification expiries, queued client commands
(arrival order), virtual-human decisions (ascending id), due action
completions (ascending id).  An action started with duration d at tick T
completes during tick T+d, so its successors first appear to deciders at
tick T+d+1.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from typing import Any, Callable, IO

from . import agents as agentmod
from . import engine
from . import events as ev
from . import planner, scoring
from .configs import AgentSpec
from .dsl.ast import ActionKind, ScenarioDoc
from .dsl.serializer import serialize
from .errors import (
    ActionNotEnabled,
    ConfigError,
    CrewdrillError,
    HandsUnavailable,
    RoleNotAllowed,
    RoleTaken,
    UnknownAction,
    UnknownHumanoid,
)
from .hands import Hands, HandsModel, HandState
from .participants import Humanoid, HumanoidKind
from .world import WorldState, apply_effects, grasp_object, interaction_allowed

logger = logging.getLogger(__name__)

LOG_FORMAT = "crewdrill-events"
LOG_VERSION = 1

WORLD_ACTION_PREFIX = "world:"


def world_action_id(relation: str, target: str) -> str:
    return f"{WORLD_ACTION_PREFIX}{relation}:{target}"


def split_world_action(action_id: str) -> tuple[str, str] | None:
    if not action_id.startswith(WORLD_ACTION_PREFIX):
        return None
    relation, _, target = action_id[len(WORLD_ACTION_PREFIX) :].partition(":")
    if not relation or not target:
        return None
    return relation, target


@dataclass
class RunningAction:
    """An interaction in flight for one performer."""

    action_id: str
    performer: str
    started: int
    completes: int
    swapped: bool = False
    is_world: bool = False
    relation: str | None = None
    target: str | None = None


@dataclass
class SessionConfig:
    seed: int = 0
    default_action_ticks: int = 1
    lookahead_depth: int = planner.DEFAULT_LOOKAHEAD_DEPTH
    max_ticks: int | None = None


def _slug(name: str) -> str:
    cleaned = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return cleaned or "guest"


class Session:
    """Authoritative state of one exercise plus its event log."""

    def __init__(
        self,
        doc: ScenarioDoc,
        agent_specs: list[AgentSpec],
        criteria: tuple[scoring.Criterion, ...] = scoring.DEFAULT_CRITERIA,
        config: SessionConfig | None = None,
        scenario_text: str | None = None,
    ):
        self.doc = doc
        self.agent_specs = list(agent_specs)
        self.criteria = criteria
        self.config = config or SessionConfig()
        self.scenario_text = scenario_text if scenario_text is not None else serialize(doc)

        self.world = WorldState(
            objects=dict(doc.world.objects), relations=dict(doc.world.relations)
        )
        self.state, self._boot_events = engine.initial_state(doc)
        self.hands: HandsModel = {}
        self.phase = "lobby"
        self.tick = 0
        self.seq = 0
        self.events: list[ev.Event] = []
        self.running: dict[str, RunningAction] = {}
        self.in_flight: set[str] = set()
        self.demands: dict[str, list[str]] = {}
        self.claimed_roles: dict[str, str] = {}  # role -> humanoid id
        self._queue: list[tuple[Callable[..., dict], tuple, dict]] = []
        self._listeners: list[Callable[[ev.Event], None]] = []
        self._log: IO[str] | None = None
        self._last_scores_payload: str | None = None
        self.latest_scores: dict[str, list[scoring.CandidateScore]] = {}
        self._avatar_count = 0

    # ------------------------------------------------------------------
    # event plumbing

    def on_event(self, callback: Callable[[ev.Event], None]) -> None:
        self._listeners.append(callback)

    def _emit(self, draft: ev.Event) -> ev.Event:
        event = draft.with_seq(self.seq)
        self.seq += 1
        self.events.append(event)
        if self._log is not None:
            self._log.write(event.to_line() + "\n")
        for callback in self._listeners:
            callback(event)
        return event

    def _emit_all(self, drafts: list[ev.Event]) -> None:
        for draft in drafts:
            self._emit(draft)

    def attach_log(self, handle: IO[str]) -> None:
        """Start writing the event log; emits the header line immediately."""
        self._log = handle
        header = {
            "format": LOG_FORMAT,
            "version": LOG_VERSION,
            "scenario_hash": ev.scenario_text_hash(self.scenario_text),
            "seed": self.config.seed,
            "scenario": self.scenario_text,
        }
        handle.write(ev.canonical_json(header) + "\n")
        for event in self.events:
            handle.write(event.to_line() + "\n")

    def close_log(self) -> None:
        if self._log is not None:
            trailer = {"final_state_hash": self.state_hash()}
            self._log.write(ev.canonical_json(trailer) + "\n")
            self._log = None

    def state_hash(self) -> str:
        return ev.state_hash(
            self.world.to_payload(),
            self.state.to_payload(),
            {h: hands.to_payload() for h, hands in sorted(self.hands.items())},
        )

    # ------------------------------------------------------------------
    # participants

    def _roles_of(self) -> dict[str, tuple[str, ...]]:
        return {h: hum.roles for h, hum in self.world.humanoids.items()}

    def _effective_abilities(self, base: frozenset[str], roles: tuple[str, ...]) -> frozenset[str]:
        granted: set[str] = set(base)
        for role in roles:
            decl = self.doc.roles.get(role)
            if decl is not None:
                granted |= decl.grants
        return frozenset(granted)

    def _register(self, humanoid: Humanoid, hands: Hands) -> None:
        for role in humanoid.roles:
            taken_by = self.claimed_roles.get(role)
            if taken_by is not None and taken_by != humanoid.id:
                raise RoleTaken(role)
        self.world.humanoids[humanoid.id] = humanoid
        self.hands[humanoid.id] = hands
        for role in humanoid.roles:
            self.claimed_roles[role] = humanoid.id
        # Initial holds claim the objects.
        for hand_name in ("left", "right"):
            state = hands.get(hand_name)
            if state.is_holding and state.item:
                if state.item not in self.world.objects:
                    raise ConfigError(f"{humanoid.id}: initial hold of unknown object {state.item!r}")
                self.world = grasp_object(self.world, humanoid.id, state.item, hand_name)
        payload = humanoid.to_payload()
        payload["hands"] = hands.to_payload()
        self._emit(ev.draft(self.tick, ev.PARTICIPANT_JOINED, payload))
        for role in humanoid.roles:
            self._emit(
                ev.draft(
                    self.tick,
                    ev.ROLE_CLAIMED,
                    {
                        "humanoid": humanoid.id,
                        "role": role,
                        "abilities": sorted(humanoid.abilities),
                    },
                )
            )

    def cast_virtual(self, spec: AgentSpec) -> Humanoid:
        """Add one configured virtual human to the team."""
        rng = random.Random(f"{self.config.seed}/{spec.id}/{spec.seed if spec.seed is not None else 0}")
        humanoid = Humanoid(
            id=spec.id,
            kind=HumanoidKind.VIRTUAL,
            roles=spec.roles,
            abilities=self._effective_abilities(spec.abilities, spec.roles),
            position=spec.position,
            profile=spec.profile,
            rng=rng,
            base_abilities=spec.abilities,
        )
        self._register(humanoid, spec.hands)
        return humanoid

    def claim_role(self, display_name: str, role: str) -> Humanoid:
        """A human joins (or extends an existing avatar) by claiming a role."""
        if role not in self.doc.roles:
            raise RoleNotAllowed(f"role {role!r} not declared by the scenario")
        taken_by = self.claimed_roles.get(role)
        if taken_by is not None:
            raise RoleTaken(role)
        slug = _slug(display_name)
        avatar_id = f"av-{slug}"
        existing = self.world.humanoids.get(avatar_id)
        if existing is not None and existing.kind is HumanoidKind.AVATAR:
            roles = existing.roles + (role,)
            existing.roles = roles
            existing.abilities = self._effective_abilities(existing.base_abilities, roles)
            self.claimed_roles[role] = avatar_id
            self._emit(
                ev.draft(
                    self.tick,
                    ev.ROLE_CLAIMED,
                    {"humanoid": avatar_id, "role": role, "abilities": sorted(existing.abilities)},
                )
            )
            return existing
        if existing is not None:
            self._avatar_count += 1
            avatar_id = f"av-{slug}-{self._avatar_count}"
        humanoid = Humanoid(
            id=avatar_id,
            kind=HumanoidKind.AVATAR,
            roles=(role,),
            abilities=self._effective_abilities(frozenset(), (role,)),
            position=(0.0, 0.0),
            base_abilities=frozenset(),
        )
        self._register(humanoid, Hands.both_free())
        return humanoid

    def start(self) -> None:
        """Leave the lobby: auto-cast unclaimed roles and begin ticking."""
        if self.phase != "lobby":
            return
        self.phase = "running"
        self._emit_all(self._boot_events)
        self._boot_events = []
        for spec in self.agent_specs:
            if any(role in self.claimed_roles for role in spec.roles):
                continue
            self.cast_virtual(spec)
        self._publish_scores()

    # ------------------------------------------------------------------
    # scoring helpers

    def _scores(self) -> dict[str, list[scoring.CandidateScore]]:
        return scoring.score_candidates(
            self.doc,
            self.state,
            self.world,
            self.hands,
            self.criteria,
            lookahead_depth=self.config.lookahead_depth,
        )

    def _publish_scores(self) -> None:
        self.latest_scores = self._scores()
        payload = {
            "scores": {
                action: [row.to_payload() for row in rows]
                for action, rows in sorted(self.latest_scores.items())
            }
        }
        blob = ev.canonical_json(payload)
        if blob != self._last_scores_payload:
            self._last_scores_payload = blob
            self._emit(ev.draft(self.tick, ev.SCORES_PUBLISHED, payload))

    # ------------------------------------------------------------------
    # command surface (serialized through the queue in live servers)

    def enqueue(self, fn: Callable[..., dict], *args: Any, **kwargs: Any) -> None:
        self._queue.append((fn, args, kwargs))

    def drain_commands(self) -> None:
        """Run queued commands in arrival order."""
        queue, self._queue = self._queue, []
        for fn, args, kwargs in queue:
            try:
                fn(*args, **kwargs)
            except CrewdrillError as exc:
                logger.debug("queued command failed: %s", exc)

    def snapshot(self) -> dict:
        steps = []
        for step_id in sorted(self.doc.graph.steps):
            step = self.doc.graph.steps[step_id]
            steps.append(
                {
                    "id": step_id,
                    "action": step.action,
                    "marked": step_id in self.state.marked,
                    "done": step_id in self.state.done,
                    "terminal": step_id in self.doc.graph.terminal,
                }
            )
        pending = []
        for collab, slots in sorted(self.state.pending.items()):
            for slot, (who, expiry) in sorted(slots.items()):
                pending.append(
                    {"collaborative": collab, "action": slot, "humanoid": who, "expiry_tick": expiry}
                )
        enabled = [
            {
                "action": action_id,
                "kind": self.doc.actions[action_id].kind.value,
                "roles": [
                    {"role": r.role, "priority": r.priority}
                    for r in self.doc.actions[action_id].roles
                ],
                "in_flight": action_id in self.in_flight,
            }
            for action_id, _ in engine.enabled_actions(self.state, self.doc)
        ]
        participants = []
        for humanoid_id in sorted(self.world.humanoids):
            humanoid = self.world.humanoids[humanoid_id]
            item = humanoid.to_payload()
            item["hands"] = self.hands[humanoid_id].to_payload()
            item["current_action"] = (
                None
                if humanoid.current_action is None
                else {"action": humanoid.current_action[0], "completes": humanoid.current_action[1]}
            )
            participants.append(item)
        return {
            "seq": self.seq - 1,
            "tick": self.tick,
            "phase": self.phase,
            "scenario": self.doc.name,
            "scenario_hash": ev.scenario_text_hash(self.scenario_text),
            "roles": {
                name: {"grants": sorted(decl.grants), "claimed_by": self.claimed_roles.get(name)}
                for name, decl in sorted(self.doc.roles.items())
            },
            "participants": participants,
            "objects": self.world.to_payload()["objects"],
            "steps": steps,
            "enabled": enabled,
            "pending_notifications": pending,
            "scores": {
                action: [row.to_payload() for row in rows]
                for action, rows in sorted(self.latest_scores.items())
            },
            "progress": engine.progress(self.state, self.doc),
            "finished": self.state.finished,
        }

    def _reject(self, reason: str) -> dict:
        return {"status": "rejected", "reason": reason, "snapshot": self.snapshot()}

    def query_allowed(self, humanoid_id: str) -> dict:
        """Actions this humanoid could start right now, with its standing."""
        if humanoid_id not in self.world.humanoids:
            return self._reject(f"unknown humanoid {humanoid_id!r}")
        humanoid = self.world.humanoids[humanoid_id]
        roles_of = self._roles_of()
        rows = []
        for action_id, role_specs in engine.enabled_actions(self.state, self.doc):
            spec = self.doc.actions[action_id]
            if not engine.roles_permit(role_specs, [humanoid_id], roles_of):
                continue
            plan = planner.plan_hands(
                self.hands[humanoid_id], humanoid_id, spec, self.world
            )
            mine = next(
                (
                    row
                    for row in self.latest_scores.get(action_id, [])
                    if row.humanoid == humanoid_id
                ),
                None,
            )
            rows.append(
                {
                    "action": action_id,
                    "kind": spec.kind.value,
                    "urgent": spec.urgent,
                    "recipient_role": spec.recipient_role,
                    "message": spec.message,
                    "in_flight": action_id in self.in_flight,
                    "feasible": plan is not None,
                    "implicit_steps": None
                    if plan is None
                    else [
                        {"op": s.op, "object": s.object_id, "hand": s.hand} for s in plan.steps
                    ],
                    "score": None if mine is None else mine.score,
                    "rank": None if mine is None else mine.rank,
                    "sole_candidate": bool(mine.sole_candidate) if mine else False,
                }
            )
        return {
            "status": "ok",
            "humanoid": humanoid_id,
            "seq": self.seq - 1,
            "tick": self.tick,
            "allowed": rows,
        }

    def perform_action(self, humanoid_id: str, action_id: str, client_seq: int | None = None) -> dict:
        if self.phase != "running":
            return self._reject("session not running")
        if humanoid_id not in self.world.humanoids:
            return self._reject(f"unknown humanoid {humanoid_id!r}")
        humanoid = self.world.humanoids[humanoid_id]
        if humanoid.mid_action:
            return self._reject("already performing an action")
        spec = self.doc.actions.get(action_id)
        if spec is None:
            world_ref = split_world_action(action_id)
            if world_ref is None:
                return self._reject(f"unknown action {action_id!r}")
            relation, target = world_ref
            if not interaction_allowed(self.world, humanoid_id, relation, target):
                return self._reject(f"abilities do not allow {relation} on {target}")
            self._start_world_action(humanoid_id, relation, target)
            return {"status": "ok", "action": action_id}
        if spec.kind is ActionKind.COMMUNICATION:
            return self.communicate(humanoid_id, spec.recipient_role or "", spec.message or "")
        if spec.kind is ActionKind.NOTIFY_INTENT:
            return self.notify_intent(humanoid_id, action_id)
        if spec.kind is ActionKind.COLLABORATIVE:
            return self._reject("collaborative actions start on their own")
        if action_id in self.in_flight:
            return self._reject("action already in progress")
        enabled = {a for a, _ in engine.enabled_actions(self.state, self.doc)}
        if action_id not in enabled:
            return self._reject("action not enabled")
        roles_of = self._roles_of()
        if not engine.roles_permit(spec.roles, [humanoid_id], roles_of):
            return self._reject("role not allowed")
        plan = planner.plan_hands(self.hands[humanoid_id], humanoid_id, spec, self.world)
        if plan is None:
            return self._reject("hands cannot be arranged")
        self._start_scenario_action(humanoid_id, spec.id, plan)
        return {"status": "ok", "action": action_id}

    def communicate(self, humanoid_id: str, recipient_role: str, message: str) -> dict:
        if self.phase != "running":
            return self._reject("session not running")
        if humanoid_id not in self.world.humanoids:
            return self._reject(f"unknown humanoid {humanoid_id!r}")
        matched = self._matching_communication(humanoid_id, recipient_role, message)
        self._emit(
            ev.draft(
                self.tick,
                ev.COMMUNICATION_SENT,
                {
                    "sender": humanoid_id,
                    "recipient_role": recipient_role,
                    "message": message,
                    "action": matched,
                },
            )
        )
        if matched is not None:
            state, events = engine.perform(
                self.state, self.doc, matched, [humanoid_id], self.tick, self._roles_of()
            )
            self.state = state
            self._emit_all(events)
            self._publish_scores()
        return {"status": "ok", "action": matched}

    def _matching_communication(
        self, humanoid_id: str, recipient_role: str, message: str
    ) -> str | None:
        roles_of = self._roles_of()
        for action_id, role_specs in engine.enabled_actions(self.state, self.doc):
            spec = self.doc.actions[action_id]
            if spec.kind is not ActionKind.COMMUNICATION:
                continue
            if spec.message != message or spec.recipient_role != recipient_role:
                continue
            if engine.roles_permit(role_specs, [humanoid_id], roles_of):
                return action_id
        return None

    def notify_intent(self, humanoid_id: str, action_id: str) -> dict:
        if self.phase != "running":
            return self._reject("session not running")
        if humanoid_id not in self.world.humanoids:
            return self._reject(f"unknown humanoid {humanoid_id!r}")
        spec = self.doc.actions.get(action_id)
        if spec is None or spec.kind is not ActionKind.NOTIFY_INTENT:
            return self._reject(f"{action_id!r} is not a notify action")
        try:
            state, events = engine.perform(
                self.state, self.doc, action_id, [humanoid_id], self.tick, self._roles_of()
            )
        except (ActionNotEnabled, RoleNotAllowed, UnknownAction) as exc:
            return self._reject(str(exc))
        self.state = state
        self._emit_all(events)
        self._publish_scores()
        return {"status": "ok", "action": action_id}

    def demand(self, humanoid_id: str, action_id: str) -> None:
        """Queue a pedagogical demand for a virtual human's next decision."""
        self.demands.setdefault(humanoid_id, []).append(action_id)

    # ------------------------------------------------------------------
    # action execution

    def _start_scenario_action(self, humanoid_id: str, action_id: str, plan: planner.HandPlan) -> None:
        spec = self.doc.actions[action_id]
        humanoid = self.world.humanoids[humanoid_id]
        for step in plan.steps:
            kind = ev.IMPLICIT_GRASP if step.op == "grasp" else ev.IMPLICIT_LAY
            self._emit(
                ev.draft(
                    self.tick,
                    kind,
                    {"humanoid": humanoid_id, "object": step.object_id, "hand": step.hand},
                )
            )
        self.world, self.hands[humanoid_id] = planner.simulate_plan(
            self.world, self.hands[humanoid_id], humanoid_id, plan
        )
        duration = self._duration_of(humanoid_id)
        completes = self.tick + duration
        self._emit(
            ev.draft(
                self.tick,
                ev.ACTION_STARTED,
                {
                    "action": action_id,
                    "performers": [humanoid_id],
                    "duration": duration,
                    "swapped": plan.swapped,
                },
            )
        )
        humanoid.current_action = (action_id, completes)
        self.running[humanoid_id] = RunningAction(
            action_id=action_id,
            performer=humanoid_id,
            started=self.tick,
            completes=completes,
            swapped=plan.swapped,
            relation=spec.relation,
            target=spec.target,
        )
        self.in_flight.add(action_id)

    def _start_world_action(self, humanoid_id: str, relation: str, target: str) -> None:
        humanoid = self.world.humanoids[humanoid_id]
        action_id = world_action_id(relation, target)
        duration = self._duration_of(humanoid_id)
        completes = self.tick + duration
        self._emit(
            ev.draft(
                self.tick,
                ev.ACTION_STARTED,
                {
                    "action": action_id,
                    "performers": [humanoid_id],
                    "duration": duration,
                    "swapped": False,
                },
            )
        )
        humanoid.current_action = (action_id, completes)
        self.running[humanoid_id] = RunningAction(
            action_id=action_id,
            performer=humanoid_id,
            started=self.tick,
            completes=completes,
            is_world=True,
            relation=relation,
            target=target,
        )

    def _duration_of(self, humanoid_id: str) -> int:
        spec = next((s for s in self.agent_specs if s.id == humanoid_id), None)
        if spec is not None:
            return spec.action_ticks
        return self.config.default_action_ticks

    def _complete(self, run: RunningAction) -> None:
        humanoid = self.world.humanoids[run.performer]
        humanoid.current_action = None
        self.running.pop(run.performer, None)
        self.in_flight.discard(run.action_id)
        if run.is_world:
            self.world = apply_effects(self.world, run.performer, run.relation or "", run.target or "")
            self._emit(
                ev.draft(
                    self.tick,
                    ev.ACTION_COMPLETED,
                    {"action": run.action_id, "performers": [run.performer]},
                )
            )
            return
        spec = self.doc.actions[run.action_id]
        state, events = engine.perform(
            self.state, self.doc, run.action_id, [run.performer], self.tick, self._roles_of()
        )
        self.state = state
        self._emit_all(events)
        if spec.kind is ActionKind.INTERACTION:
            self.world = apply_effects(
                self.world, run.performer, spec.relation or "", spec.target or ""
            )
            self.world, self.hands[run.performer] = planner.complete_action(
                self.world, self.hands[run.performer], run.performer, spec, run.swapped
            )

    # ------------------------------------------------------------------
    # decisions

    def _decide_virtual(self, humanoid: Humanoid) -> None:
        scores = {
            action: rows
            for action, rows in self._scores().items()
            if action not in self.in_flight
        }
        demands = tuple(self.demands.pop(humanoid.id, ()))
        decision = agentmod.decide(
            self.doc,
            self.state,
            self.world,
            humanoid.id,
            scores,
            humanoid.profile,  # type: ignore[arg-type]
            humanoid.rng,  # type: ignore[arg-type]
            demands,
        )
        if decision.kind == "idle":
            return
        if decision.kind == "notify":
            reply = self.notify_intent(humanoid.id, decision.action_id or "")
            if reply["status"] != "ok":
                logger.debug("%s notify rejected: %s", humanoid.id, reply.get("reason"))
            return
        if decision.kind == "interact_world":
            if interaction_allowed(
                self.world, humanoid.id, decision.relation or "", decision.target or ""
            ):
                self._start_world_action(humanoid.id, decision.relation or "", decision.target or "")
            return
        spec = self.doc.actions.get(decision.action_id or "")
        if spec is None:
            return
        if spec.kind is ActionKind.COMMUNICATION:
            self.communicate(humanoid.id, spec.recipient_role or "", spec.message or "")
            return
        plan = planner.plan_hands(self.hands[humanoid.id], humanoid.id, spec, self.world)
        if plan is None:
            return
        self._start_scenario_action(humanoid.id, spec.id, plan)

    # ------------------------------------------------------------------
    # tick loop

    def tick_once(self) -> None:
        """Run one tick: expiries, commands, decisions, completions."""
        if self.phase != "running":
            return
        before_seq = self.seq
        state, events = engine.advance_clock(self.state, self.doc, self.tick)
        self.state = state
        self._emit_all(events)

        self.drain_commands()

        if not self.state.finished:
            for humanoid_id in sorted(self.world.humanoids):
                humanoid = self.world.humanoids[humanoid_id]
                if humanoid.is_virtual and not humanoid.mid_action:
                    self._decide_virtual(humanoid)

        due = sorted(
            run.performer for run in self.running.values() if run.completes <= self.tick
        )
        for performer in due:
            run = self.running.get(performer)
            if run is not None:
                self._complete(run)

        if self.seq != before_seq:
            self._publish_scores()
        self.tick += 1

    def run_to_completion(self, max_ticks: int | None = None) -> bool:
        """Tick until the scenario completes; False when the cap is hit."""
        cap = max_ticks
        if cap is None:
            cap = self.config.max_ticks
        if cap is None:
            cap = 10 * max(1, len(self.doc.graph.steps))
        if self.phase == "lobby":
            self.start()
        while not self.state.finished and self.tick < cap:
            self.tick_once()
        if self.state.finished:
            # Let in-flight actions drain so logs end on a quiet tick.
            for _ in range(3):
                if not self.running:
                    break
                self.tick_once()
        return self.state.finished

    # ------------------------------------------------------------------

    def humanoid_for_role(self, role: str) -> Humanoid:
        humanoid_id = self.claimed_roles.get(role)
        if humanoid_id is None:
            raise UnknownHumanoid(f"role {role!r} unclaimed")
        return self.world.humanoids[humanoid_id]
