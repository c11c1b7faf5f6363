"""Parser for the line-oriented scenario language.

One directive per line, four sections (WORLD, ROLES, ACTIONS, GRAPH)
under a SCENARIO header.  `#` starts a comment outside quotes.  The
parser accumulates diagnostics instead of stopping at the first problem
and raises ScenarioParseError carrying every error it found, ordered by
source line.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import CrewdrillError
from ..hands import HandRequirement, Hands, HandState
from ..world import Relation, StateEffect, WorldObject, WorldState
from .ast import (
    ANYONE,
    ActionKind,
    ActionSpec,
    RoleDecl,
    RoleSpec,
    ScenarioDoc,
    ScenarioGraph,
    Step,
    Transition,
)
from .validator import Diagnostic, Severity, structural_diagnostics

_SECTIONS = ("WORLD", "ROLES", "ACTIONS", "GRAPH")

_ACTION_KEYWORDS = {"roles", "hands", "urgent", "timeout"}
_OBJECT_KEYWORDS = {"at", "abilities", "tags"}
_RELATION_KEYWORDS = {"actor", "target", "tool", "effects"}


class ScenarioParseError(CrewdrillError):
    """Raised when the source contains at least one error-severity diagnostic."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        lines = "; ".join(str(d) for d in diagnostics[:8])
        more = "" if len(diagnostics) <= 8 else f" (+{len(diagnostics) - 8} more)"
        super().__init__(f"{len(diagnostics)} scenario error(s): {lines}{more}")


@dataclass(frozen=True)
class _Token:
    text: str
    quoted: bool = False


def _tokenize(line: str, line_no: int, diags: list[Diagnostic]) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        if ch == '"':
            j = line.find('"', i + 1)
            if j < 0:
                diags.append(Diagnostic("E_SYNTAX", Severity.ERROR, line_no, "unterminated quote"))
                return tokens
            tokens.append(_Token(line[i + 1 : j], quoted=True))
            i = j + 1
            continue
        j = i
        while j < n and line[j] not in ' \t#"':
            j += 1
        tokens.append(_Token(line[i:j]))
        i = j
    return tokens


def _split_clauses(
    tokens: list[_Token], keywords: set[str], line_no: int, diags: list[Diagnostic]
) -> dict[str, list[_Token]]:
    """Group `key tok tok key tok ...` tails into {key: tokens}."""
    clauses: dict[str, list[_Token]] = {}
    current: str | None = None
    for tok in tokens:
        if not tok.quoted and tok.text in keywords:
            if tok.text in clauses:
                diags.append(
                    Diagnostic("E_SYNTAX", Severity.ERROR, line_no, f"duplicate clause {tok.text!r}")
                )
            current = tok.text
            clauses.setdefault(current, [])
        elif current is None:
            diags.append(
                Diagnostic("E_SYNTAX", Severity.ERROR, line_no, f"unexpected token {tok.text!r}")
            )
        else:
            clauses[current].append(tok)
    return clauses


def _parse_hand_token(text: str, line_no: int, diags: list[Diagnostic]) -> HandState:
    try:
        return HandState.from_token(text)
    except ValueError:
        diags.append(Diagnostic("E_BAD_HANDS", Severity.ERROR, line_no, f"bad hand state {text!r}"))
        return HandState.indifferent()


def _parse_hands(tokens: list[_Token], line_no: int, diags: list[Diagnostic]) -> HandRequirement | None:
    texts = [t.text for t in tokens]
    if len(texts) != 5 or texts[2] != "->":
        diags.append(
            Diagnostic(
                "E_BAD_HANDS",
                Severity.ERROR,
                line_no,
                "hands clause needs: <left> <right> -> <left> <right>",
            )
        )
        return None
    states = [_parse_hand_token(t, line_no, diags) for t in (texts[0], texts[1], texts[3], texts[4])]
    return HandRequirement(Hands(states[0], states[1]), Hands(states[2], states[3]))


def _parse_role_specs(tokens: list[_Token], line_no: int, diags: list[Diagnostic]) -> tuple[RoleSpec, ...]:
    specs = []
    for tok in tokens:
        role, sep, prio = tok.text.partition(":")
        if not sep or not role:
            diags.append(
                Diagnostic("E_SYNTAX", Severity.ERROR, line_no, f"role spec {tok.text!r} needs role:priority")
            )
            continue
        try:
            priority = int(prio)
        except ValueError:
            diags.append(Diagnostic("E_BAD_PRIORITY", Severity.ERROR, line_no, f"priority {prio!r} not an integer"))
            continue
        if priority < 1:
            diags.append(Diagnostic("E_BAD_PRIORITY", Severity.ERROR, line_no, f"priority {priority} < 1"))
            continue
        specs.append(RoleSpec(role, priority))
    return tuple(sorted(specs, key=lambda s: (s.priority, s.role)))


def _texts(tokens: list[_Token]) -> list[str]:
    return [t.text for t in tokens]


class _Builder:
    def __init__(self) -> None:
        self.diags: list[Diagnostic] = []
        self.name: str | None = None
        self.objects: dict[str, WorldObject] = {}
        self.relations: dict[str, Relation] = {}
        self.roles: dict[str, RoleDecl] = {}
        self.actions: dict[str, ActionSpec] = {}
        self.steps: dict[str, Step] = {}
        self.transitions: list[Transition] = []
        self.initial: set[str] = set()
        self.terminal: set[str] = set()
        self.saw_directive = False

    def err(self, code: str, line_no: int, message: str) -> None:
        self.diags.append(Diagnostic(code, Severity.ERROR, line_no, message))

    def dup(self, kind: str, ident: str, line_no: int) -> bool:
        table = {
            "object": self.objects,
            "relation": self.relations,
            "role": self.roles,
            "action": self.actions,
            "step": self.steps,
        }[kind]
        if ident in table:
            self.err("E_DUPLICATE_ID", line_no, f"duplicate {kind} id {ident!r}")
            return True
        return False

    # --- section line handlers -------------------------------------------

    def world_line(self, toks: list[_Token], line_no: int) -> None:
        head = toks[0].text
        if head == "object":
            self._object_line(toks, line_no)
        elif head == "relation":
            self._relation_line(toks, line_no)
        else:
            self.err("E_SYNTAX", line_no, f"unknown WORLD directive {head!r}")

    def _object_line(self, toks: list[_Token], line_no: int) -> None:
        if len(toks) < 2:
            self.err("E_SYNTAX", line_no, "object needs an id")
            return
        obj_id = toks[1].text
        rest = toks[2:]
        display = obj_id
        if rest and rest[0].quoted:
            display = rest[0].text
            rest = rest[1:]
        clauses = _split_clauses(rest, _OBJECT_KEYWORDS, line_no, self.diags)
        at = _texts(clauses.get("at", []))
        position = (0.0, 0.0)
        if len(at) != 2:
            self.err("E_SYNTAX", line_no, "object needs: at <x> <y>")
        else:
            try:
                position = (float(at[0]), float(at[1]))
            except ValueError:
                self.err("E_SYNTAX", line_no, f"bad coordinates {at!r}")
        if self.dup("object", obj_id, line_no):
            return
        self.objects[obj_id] = WorldObject(
            id=obj_id,
            name=display,
            abilities=frozenset(_texts(clauses.get("abilities", []))),
            position=position,
            state_tags=frozenset(_texts(clauses.get("tags", []))),
        )

    def _relation_line(self, toks: list[_Token], line_no: int) -> None:
        if len(toks) < 2:
            self.err("E_SYNTAX", line_no, "relation needs a name")
            return
        rel_name = toks[1].text
        clauses = _split_clauses(toks[2:], _RELATION_KEYWORDS, line_no, self.diags)
        tool_toks = _texts(clauses.get("tool", []))
        tool = None
        if "tool" in clauses:
            if len(tool_toks) != 1:
                self.err("E_SYNTAX", line_no, "tool clause takes exactly one ability")
            else:
                tool = tool_toks[0]
        effects = []
        for text in _texts(clauses.get("effects", [])):
            if len(text) > 1 and text[0] in "+-":
                effects.append(StateEffect("add" if text[0] == "+" else "remove", text[1:]))
            else:
                self.err("E_SYNTAX", line_no, f"effect {text!r} needs +tag or -tag")
        if self.dup("relation", rel_name, line_no):
            return
        self.relations[rel_name] = Relation(
            name=rel_name,
            actor_abilities=frozenset(_texts(clauses.get("actor", []))),
            target_abilities=frozenset(_texts(clauses.get("target", []))),
            tool_ability=tool,
            effects=tuple(effects),
        )

    def roles_line(self, toks: list[_Token], line_no: int) -> None:
        if toks[0].text != "role" or len(toks) < 2:
            self.err("E_SYNTAX", line_no, "ROLES lines look like: role <name> [grants <ability>...]")
            return
        role_name = toks[1].text
        if role_name == ANYONE:
            self.err("E_SYNTAX", line_no, f"{ANYONE!r} is reserved for action role lists")
            return
        grants: frozenset[str] = frozenset()
        rest = toks[2:]
        if rest:
            if rest[0].text != "grants":
                self.err("E_SYNTAX", line_no, f"unexpected token {rest[0].text!r}")
                return
            grants = frozenset(_texts(rest[1:]))
        if self.dup("role", role_name, line_no):
            return
        self.roles[role_name] = RoleDecl(role_name, grants, line=line_no)

    def actions_line(self, toks: list[_Token], line_no: int) -> None:
        if toks[0].text != "action" or len(toks) < 3:
            self.err("E_SYNTAX", line_no, "ACTIONS lines look like: action <id> <kind> ...")
            return
        action_id = toks[1].text
        dsl_kind = toks[2].text
        rest = toks[3:]
        kind_fields: dict = {}
        if dsl_kind == "interact":
            if len(rest) < 2 or rest[0].quoted or rest[1].quoted:
                self.err("E_SYNTAX", line_no, "interact needs: <relation> <target>")
                return
            kind_fields = {
                "kind": ActionKind.INTERACTION,
                "relation": rest[0].text,
                "target": rest[1].text,
            }
            rest = rest[2:]
        elif dsl_kind == "say":
            if len(rest) < 2 or not rest[1].quoted:
                self.err("E_SYNTAX", line_no, 'say needs: <recipient-role> "<message>"')
                return
            kind_fields = {
                "kind": ActionKind.COMMUNICATION,
                "recipient_role": rest[0].text,
                "message": rest[1].text,
            }
            rest = rest[2:]
        elif dsl_kind == "notify":
            if len(rest) < 1:
                self.err("E_SYNTAX", line_no, "notify needs: <collaborative-action-id>")
                return
            kind_fields = {"kind": ActionKind.NOTIFY_INTENT, "collaborative_id": rest[0].text}
            rest = rest[1:]
        elif dsl_kind == "collab":
            if len(rest) < 1:
                self.err("E_SYNTAX", line_no, "collab needs: <slot>+<slot>... timeout <ticks>")
                return
            slots = tuple(sorted(s for s in rest[0].text.split("+") if s))
            kind_fields = {"kind": ActionKind.COLLABORATIVE, "member_slots": slots}
            rest = rest[1:]
        else:
            self.err("E_SYNTAX", line_no, f"unknown action kind {dsl_kind!r}")
            return

        clauses = _split_clauses(rest, _ACTION_KEYWORDS, line_no, self.diags)
        roles = _parse_role_specs(clauses.get("roles", []), line_no, self.diags)
        urgent = "urgent" in clauses
        if urgent and clauses["urgent"]:
            self.err("E_SYNTAX", line_no, "urgent takes no arguments")
        hands = None
        if "hands" in clauses:
            if kind_fields["kind"] is not ActionKind.INTERACTION:
                self.err("E_BAD_HANDS", line_no, "hands clause only applies to interact actions")
            else:
                hands = _parse_hands(clauses["hands"], line_no, self.diags)
        if kind_fields["kind"] is ActionKind.INTERACTION and hands is None:
            hands = HandRequirement(Hands.both_indifferent(), Hands.both_indifferent())
        timeout = None
        if kind_fields["kind"] is ActionKind.COLLABORATIVE:
            t_toks = _texts(clauses.get("timeout", []))
            if len(t_toks) != 1:
                self.err("E_BAD_TIMEOUT", line_no, "collab needs: timeout <ticks>")
            else:
                try:
                    timeout = int(t_toks[0])
                except ValueError:
                    self.err("E_BAD_TIMEOUT", line_no, f"timeout {t_toks[0]!r} not an integer")
        elif "timeout" in clauses:
            self.err("E_SYNTAX", line_no, "timeout only applies to collab actions")
        if self.dup("action", action_id, line_no):
            return
        self.actions[action_id] = ActionSpec(
            id=action_id,
            roles=roles,
            urgent=urgent,
            hands=hands,
            timeout_ticks=timeout,
            line=line_no,
            **kind_fields,
        )

    def graph_line(self, toks: list[_Token], line_no: int) -> None:
        head = toks[0].text
        texts = _texts(toks[1:])
        if head == "step":
            if not texts or len(texts) > 2:
                self.err("E_SYNTAX", line_no, "step needs: <id> [<action-id>]")
                return
            if self.dup("step", texts[0], line_no):
                return
            self.steps[texts[0]] = Step(texts[0], texts[1] if len(texts) == 2 else None, line=line_no)
        elif head == "init":
            if not texts:
                self.err("E_SYNTAX", line_no, "init needs at least one step id")
            self.initial.update(texts)
        elif head == "terminal":
            if not texts:
                self.err("E_SYNTAX", line_no, "terminal needs at least one step id")
            self.terminal.update(texts)
        elif head == "t":
            if len(texts) != 3 or texts[1] != "->":
                self.err("E_SYNTAX", line_no, "transition needs: t <from>[+<from>] -> <to>[+<to>]")
                return
            from_steps = frozenset(s for s in texts[0].split("+") if s)
            to_steps = frozenset(s for s in texts[2].split("+") if s)
            if not from_steps or not to_steps:
                self.err("E_SYNTAX", line_no, "transition sides cannot be empty")
                return
            self.transitions.append(Transition(from_steps, to_steps, line=line_no))
        else:
            self.err("E_SYNTAX", line_no, f"unknown GRAPH directive {head!r}")


def parse(source: str) -> ScenarioDoc:
    """Parse scenario text into a validated document.

    Raises ScenarioParseError listing every error-severity diagnostic
    (syntax problems, duplicate or dangling references, unreachable
    steps, ...).  Warning-severity findings do not block parsing; fetch
    them with validate_static().
    """
    builder = _Builder()
    section: str | None = None
    for line_no, raw in enumerate(source.splitlines(), start=1):
        toks = _tokenize(raw, line_no, builder.diags)
        if not toks:
            continue
        head = toks[0].text
        if head == "SCENARIO":
            builder.saw_directive = True
            if builder.name is not None:
                builder.err("E_SYNTAX", line_no, "second SCENARIO header")
            elif len(toks) != 2:
                builder.err("E_SYNTAX", line_no, "SCENARIO needs exactly one name")
            else:
                builder.name = toks[1].text
            continue
        if head in _SECTIONS:
            builder.saw_directive = True
            if len(toks) != 1:
                builder.err("E_SYNTAX", line_no, f"{head} takes no arguments")
            section = head
            continue
        if section is None:
            builder.saw_directive = True
            builder.err("E_SYNTAX", line_no, f"directive {head!r} before any section")
            continue
        builder.saw_directive = True
        handler = {
            "WORLD": builder.world_line,
            "ROLES": builder.roles_line,
            "ACTIONS": builder.actions_line,
            "GRAPH": builder.graph_line,
        }[section]
        handler(toks, line_no)

    if not builder.saw_directive:
        raise ScenarioParseError(
            [Diagnostic("E_EMPTY_SCENARIO", Severity.ERROR, 0, "scenario source is empty")]
        )

    doc = ScenarioDoc(
        name=builder.name or "",
        world=WorldState(objects=dict(builder.objects), relations=dict(builder.relations)),
        roles=builder.roles,
        actions=builder.actions,
        graph=ScenarioGraph(
            steps=builder.steps,
            transitions=tuple(sorted(builder.transitions, key=lambda t: t.sort_key)),
            initial=frozenset(builder.initial),
            terminal=frozenset(builder.terminal),
        ),
    )
    if builder.name is None:
        builder.err("E_SYNTAX", 0, "missing SCENARIO header")

    diags = builder.diags + structural_diagnostics(doc)
    diags.sort(key=lambda d: (d.line, d.code, d.message))
    errors = [d for d in diags if d.severity is Severity.ERROR]
    if errors:
        raise ScenarioParseError(errors)
    return doc


def parse_file(path: str) -> ScenarioDoc:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())
