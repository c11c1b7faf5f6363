"""Static validation of scenario documents.

structural_diagnostics() re-checks every integrity rule (dangling
references, graph shape, collaborative wiring) so that documents built
in code get the same scrutiny as parsed text.  validate_static() adds
the advisory analyses: roles nobody declared and hand-state chains a
single performer could start but never finish.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..hands import HandKind, Hands, HandState
from .ast import ANYONE, ActionKind, ActionSpec, ScenarioDoc

_MAX_CHAIN = 12
_PROBE_STARTS = (
    Hands.both_free(),
    Hands(HandState.busy(), HandState.free()),
    Hands(HandState.free(), HandState.busy()),
)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} {self.code} (line {self.line}): {self.message}"


def _sorted(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: (d.line, d.code, d.message))


def structural_diagnostics(doc: ScenarioDoc) -> list[Diagnostic]:
    """Error-severity findings only; empty for a well-formed document."""
    diags: list[Diagnostic] = []

    def err(code: str, line: int, message: str) -> None:
        diags.append(Diagnostic(code, Severity.ERROR, line, message))

    for spec in doc.actions.values():
        if spec.kind is ActionKind.INTERACTION:
            if spec.relation not in doc.world.relations:
                err("E_UNKNOWN_RELATION", spec.line, f"action {spec.id}: relation {spec.relation!r} not declared")
            if spec.target not in doc.world.objects:
                err("E_UNKNOWN_OBJECT", spec.line, f"action {spec.id}: object {spec.target!r} not declared")
        elif spec.hands is not None:
            err("E_BAD_HANDS", spec.line, f"action {spec.id}: only interactions take hand states")
        if spec.kind is ActionKind.COLLABORATIVE:
            if len(spec.member_slots) < 2:
                err("E_COLLAB_MEMBERS", spec.line, f"action {spec.id}: a collaboration needs at least 2 notify slots")
            if spec.timeout_ticks is None or spec.timeout_ticks < 1:
                err("E_BAD_TIMEOUT", spec.line, f"action {spec.id}: timeout must be a positive tick count")
            for slot in spec.member_slots:
                member = doc.actions.get(slot)
                if member is None or member.kind is not ActionKind.NOTIFY_INTENT:
                    err("E_DANGLING_NOTIFY", spec.line, f"action {spec.id}: slot {slot!r} is not a notify action")
                elif member.collaborative_id != spec.id:
                    err("E_DANGLING_NOTIFY", spec.line, f"slot {slot!r} does not point back to {spec.id}")
        else:
            if not spec.roles:
                err("E_NO_ROLES", spec.line, f"action {spec.id}: needs at least one role spec")
        if spec.kind is ActionKind.NOTIFY_INTENT:
            owner = doc.actions.get(spec.collaborative_id or "")
            if owner is None or owner.kind is not ActionKind.COLLABORATIVE:
                err("E_DANGLING_NOTIFY", spec.line, f"action {spec.id}: no collaborative action {spec.collaborative_id!r}")
            elif spec.id not in owner.member_slots:
                err("E_DANGLING_NOTIFY", spec.line, f"action {spec.id}: {owner.id} does not list it as a slot")
        for role_spec in spec.roles:
            if role_spec.priority < 1:
                err("E_BAD_PRIORITY", spec.line, f"action {spec.id}: priority {role_spec.priority} < 1")

    graph = doc.graph
    if not graph.steps:
        return _sorted(diags + [Diagnostic("E_EMPTY_SCENARIO", Severity.ERROR, 0, "scenario has no steps")])

    for step in graph.steps.values():
        if step.action is not None and step.action not in doc.actions:
            err("E_UNKNOWN_ACTION", step.line, f"step {step.id}: action {step.action!r} not declared")

    def check_refs(ids, line: int, where: str) -> None:
        for step_id in sorted(ids):
            if step_id not in graph.steps:
                err("E_UNKNOWN_STEP", line, f"{where}: step {step_id!r} not declared")

    check_refs(graph.initial, 0, "init")
    check_refs(graph.terminal, 0, "terminal")
    if not graph.initial:
        err("E_NO_INITIAL", 0, "graph declares no initial steps")
    if not graph.terminal:
        err("E_NO_TERMINAL", 0, "graph declares no terminal steps")
    for trans in graph.transitions:
        check_refs(trans.from_steps | trans.to_steps, trans.line, "transition")
        overlap = trans.from_steps & trans.to_steps
        if overlap:
            err(
                "E_TRANSITION_OVERLAP",
                trans.line,
                "transition from and to sets share " + ", ".join(sorted(overlap)),
            )

    # AND-reachability: a transition can ever fire only once every from-step
    # can ever carry a token.
    reachable = set(graph.initial) & set(graph.steps)
    changed = True
    while changed:
        changed = False
        for trans in graph.transitions:
            if trans.from_steps <= reachable and not trans.to_steps <= reachable:
                reachable |= trans.to_steps
                changed = True
    for step_id in sorted(graph.steps):
        if step_id not in reachable and graph.initial:
            err("E_UNREACHABLE_STEP", graph.steps[step_id].line, f"step {step_id!r} can never hold a token")

    # Collaborative steps must be fed by a join over exactly their slots' steps.
    for spec in doc.actions.values():
        if spec.kind is not ActionKind.COLLABORATIVE:
            continue
        slot_steps: set[str] = set()
        ok = True
        for slot in spec.member_slots:
            placed = [s.id for s in doc.steps_for_action(slot)]
            if len(placed) != 1:
                err("E_COLLAB_WIRING", spec.line, f"notify action {slot!r} must sit on exactly one step")
                ok = False
            else:
                slot_steps.add(placed[0])
        collab_steps = doc.steps_for_action(spec.id)
        if len(collab_steps) != 1:
            err("E_COLLAB_WIRING", spec.line, f"collaborative action {spec.id!r} must sit on exactly one step")
            ok = False
        if not ok:
            continue
        joins = [
            t
            for t in graph.transitions
            if t.from_steps == frozenset(slot_steps) and collab_steps[0].id in t.to_steps
        ]
        if not joins:
            err(
                "E_COLLAB_WIRING",
                spec.line,
                f"collaborative action {spec.id!r} needs a join transition from its notify steps",
            )

    return _sorted(diags)


def _interaction_chains(doc: ScenarioDoc) -> list[list[ActionSpec]]:
    """Maximal linear step paths, reduced to their interaction actions."""
    graph = doc.graph
    linear: dict[str, list[str]] = {}
    for trans in graph.transitions:
        if len(trans.from_steps) == 1 and len(trans.to_steps) == 1:
            src = next(iter(trans.from_steps))
            dst = next(iter(trans.to_steps))
            linear.setdefault(src, []).append(dst)
    has_linear_pred = {d for dsts in linear.values() for d in dsts}
    starts = [s for s in sorted(graph.steps) if s not in has_linear_pred]

    paths: list[list[str]] = []

    def walk(step_id: str, path: list[str]) -> None:
        path = path + [step_id]
        nexts = [d for d in sorted(linear.get(step_id, [])) if d not in path]
        if not nexts or len(path) >= _MAX_CHAIN:
            paths.append(path)
            return
        for dst in nexts:
            walk(dst, path)

    for start in starts:
        walk(start, [])

    chains = []
    for path in paths:
        actions = [
            doc.actions[graph.steps[s].action]
            for s in path
            if graph.steps[s].action in doc.actions
        ]
        chains.append([a for a in actions if a.kind is ActionKind.INTERACTION])
    return chains


def _blocking_diagnostics(doc: ScenarioDoc) -> list[Diagnostic]:
    from ..errors import HandsUnavailable
    from ..planner import complete_action, plan_hands, simulate_plan

    diags: list[Diagnostic] = []
    flagged: set[str] = set()

    def flag(spec: ActionSpec, role: str, start: Hands) -> None:
        if spec.id in flagged:
            return
        flagged.add(spec.id)
        diags.append(
            Diagnostic(
                "W_BLOCKING_SEQUENCE",
                Severity.WARNING,
                spec.line,
                f"role {role!r} starting with hands "
                f"({start.left.to_token()}, {start.right.to_token()}) "
                f"can begin this sequence but not perform {spec.id!r}",
            )
        )

    roles = sorted(doc.roles) + [ANYONE]
    for chain in _interaction_chains(doc):
        for role in roles:
            mine = [
                a
                for a in chain
                if any(r.role in (role, ANYONE) for r in a.roles)
            ]
            if len(mine) < 2:
                continue
            for start in _PROBE_STARTS:
                world = doc.world
                hands = start
                started = False
                for spec in mine:
                    plan = plan_hands(hands, "__probe__", spec, world)
                    if plan is None:
                        if started:
                            flag(spec, role, start)
                        break
                    world, hands = simulate_plan(world, hands, "__probe__", plan)
                    try:
                        world, hands = complete_action(world, hands, "__probe__", spec, plan.swapped)
                    except HandsUnavailable:
                        # The before state can be arranged but the after
                        # state asks for something the world cannot supply.
                        if started:
                            flag(spec, role, start)
                        break
                    started = True
    return diags


def validate_static(doc: ScenarioDoc) -> list[Diagnostic]:
    """All structural errors plus advisory warnings, ordered by source line."""
    diags = structural_diagnostics(doc)

    declared = set(doc.roles)
    for spec in doc.actions.values():
        for role_spec in spec.roles:
            if role_spec.role != ANYONE and role_spec.role not in declared:
                diags.append(
                    Diagnostic(
                        "W_UNBOUND_ROLE",
                        Severity.WARNING,
                        spec.line,
                        f"action {spec.id}: role {role_spec.role!r} has no declared slot",
                    )
                )
        if spec.kind is ActionKind.COMMUNICATION:
            if spec.recipient_role != ANYONE and spec.recipient_role not in declared:
                diags.append(
                    Diagnostic(
                        "W_UNBOUND_ROLE",
                        Severity.WARNING,
                        spec.line,
                        f"action {spec.id}: recipient role {spec.recipient_role!r} has no declared slot",
                    )
                )

    if not any(d.severity is Severity.ERROR for d in diags):
        diags.extend(_blocking_diagnostics(doc))
    return _sorted(diags)
