"""Canonical text form of a scenario document.

serialize() is deterministic: sections in fixed order, entries sorted,
floats in shortest round-trip form.  parse(serialize(doc)) == doc for
any valid document, and serializing twice yields identical bytes.
"""

from __future__ import annotations

from ..hands import HandRequirement, Hands
from ..world import Relation, WorldObject
from .ast import ActionKind, ActionSpec, ScenarioDoc


def _num(value: float) -> str:
    return repr(float(value))


def _hands_clause(req: HandRequirement | None) -> str:
    if req is None:
        return ""
    default = Hands.both_indifferent()
    if req.before == default and req.after == default:
        return ""
    return (
        f" hands {req.before.left.to_token()} {req.before.right.to_token()}"
        f" -> {req.after.left.to_token()} {req.after.right.to_token()}"
    )


def _object_line(obj: WorldObject) -> str:
    parts = [f'object {obj.id} "{obj.name}" at {_num(obj.position[0])} {_num(obj.position[1])}']
    if obj.abilities:
        parts.append("abilities " + " ".join(sorted(obj.abilities)))
    if obj.state_tags:
        parts.append("tags " + " ".join(sorted(obj.state_tags)))
    return " ".join(parts)


def _relation_line(rel: Relation) -> str:
    parts = [f"relation {rel.name}"]
    if rel.actor_abilities:
        parts.append("actor " + " ".join(sorted(rel.actor_abilities)))
    if rel.target_abilities:
        parts.append("target " + " ".join(sorted(rel.target_abilities)))
    if rel.tool_ability:
        parts.append(f"tool {rel.tool_ability}")
    if rel.effects:
        rendered = " ".join(("+" if e.op == "add" else "-") + e.tag for e in rel.effects)
        parts.append("effects " + rendered)
    return " ".join(parts)


def _action_line(spec: ActionSpec) -> str:
    if spec.kind is ActionKind.INTERACTION:
        head = f"action {spec.id} interact {spec.relation} {spec.target}"
    elif spec.kind is ActionKind.COMMUNICATION:
        head = f'action {spec.id} say {spec.recipient_role} "{spec.message}"'
    elif spec.kind is ActionKind.NOTIFY_INTENT:
        head = f"action {spec.id} notify {spec.collaborative_id}"
    else:
        head = f"action {spec.id} collab {'+'.join(spec.member_slots)} timeout {spec.timeout_ticks}"
    parts = [head]
    if spec.roles:
        parts.append("roles " + " ".join(f"{r.role}:{r.priority}" for r in spec.roles))
    hands = _hands_clause(spec.hands)
    if hands:
        parts.append(hands.strip())
    if spec.urgent:
        parts.append("urgent")
    return " ".join(parts)


def serialize(doc: ScenarioDoc) -> str:
    """Render the canonical text of a scenario document."""
    out: list[str] = [f"SCENARIO {doc.name}", ""]

    out.append("WORLD")
    for obj_id in sorted(doc.world.objects):
        out.append("  " + _object_line(doc.world.objects[obj_id]))
    for rel_name in sorted(doc.world.relations):
        out.append("  " + _relation_line(doc.world.relations[rel_name]))
    out.append("")

    out.append("ROLES")
    for role_name in sorted(doc.roles):
        decl = doc.roles[role_name]
        line = f"  role {decl.name}"
        if decl.grants:
            line += " grants " + " ".join(sorted(decl.grants))
        out.append(line)
    out.append("")

    out.append("ACTIONS")
    for action_id in sorted(doc.actions):
        out.append("  " + _action_line(doc.actions[action_id]))
    out.append("")

    out.append("GRAPH")
    if doc.graph.initial:
        out.append("  init " + " ".join(sorted(doc.graph.initial)))
    for step_id in sorted(doc.graph.steps):
        step = doc.graph.steps[step_id]
        line = f"  step {step.id}"
        if step.action:
            line += f" {step.action}"
        out.append(line)
    for trans in sorted(doc.graph.transitions, key=lambda t: t.sort_key):
        out.append(
            "  t "
            + "+".join(sorted(trans.from_steps))
            + " -> "
            + "+".join(sorted(trans.to_steps))
        )
    if doc.graph.terminal:
        out.append("  terminal " + " ".join(sorted(doc.graph.terminal)))
    out.append("")
    return "\n".join(out)
