"""Text configuration files: virtual-human casts and criteria tables.

Both formats are line-oriented like the scenario language; `#` comments
allowed.  Agents file, one virtual human per line:

    agent vh-op roles operator at 1.0 2.0 profile tutor hands free free seed 7

Criteria file, a header line per criterion followed by value overrides:

    criterion role_priority weight 2.0
      value 1 coeff 4.0
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .hands import Hands, HandState
from .participants import Position
from .profiles import PedagogicalProfile, resolve_profile
from .scoring import DEFAULT_CRITERIA, Criterion, known_criteria

_AGENT_KEYWORDS = {"roles", "abilities", "at", "profile", "hands", "seed", "duration"}


@dataclass(frozen=True)
class AgentSpec:
    """Configured virtual human, ready to be cast into a session."""

    id: str
    roles: tuple[str, ...]
    abilities: frozenset[str]
    position: Position
    profile: PedagogicalProfile
    hands: Hands = field(default_factory=Hands.both_free)
    seed: int | None = None
    action_ticks: int = 1

    def to_payload(self) -> dict:
        return {
            "id": self.id,
            "roles": list(self.roles),
            "abilities": sorted(self.abilities),
            "position": [self.position[0], self.position[1]],
            "profile": self.profile.to_payload(),
            "hands": self.hands.to_payload(),
            "seed": self.seed,
            "action_ticks": self.action_ticks,
        }


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((line_no, body.split()))
    return out


def _clauses(tokens: list[str], keywords: set[str], line_no: int) -> dict[str, list[str]]:
    clauses: dict[str, list[str]] = {}
    current: str | None = None
    for tok in tokens:
        if tok in keywords:
            if tok in clauses:
                raise ConfigError(f"line {line_no}: duplicate clause {tok!r}")
            current = tok
            clauses[current] = []
        elif current is None:
            raise ConfigError(f"line {line_no}: unexpected token {tok!r}")
        else:
            clauses[current].append(tok)
    return clauses


def _parse_profile(tokens: list[str], line_no: int) -> PedagogicalProfile:
    if len(tokens) == 1:
        try:
            return resolve_profile(tokens[0])
        except ConfigError:
            raise ConfigError(f"line {line_no}: unknown profile preset {tokens[0]!r}") from None
    if len(tokens) == 4:
        try:
            follow, error, hinder, idle = (float(t) for t in tokens)
        except ValueError:
            raise ConfigError(f"line {line_no}: profile needs four numbers") from None
        return PedagogicalProfile(follow, error, hinder, idle)
    raise ConfigError(f"line {line_no}: profile takes a preset name or four probabilities")


def parse_agents(text: str) -> list[AgentSpec]:
    """Parse an agents file into the virtual cast, in declaration order."""
    agents: list[AgentSpec] = []
    seen: set[str] = set()
    for line_no, tokens in _lines(text):
        if tokens[0] != "agent" or len(tokens) < 2:
            raise ConfigError(f"line {line_no}: expected: agent <id> ...")
        agent_id = tokens[1]
        if agent_id in seen:
            raise ConfigError(f"line {line_no}: duplicate agent id {agent_id!r}")
        seen.add(agent_id)
        clauses = _clauses(tokens[2:], _AGENT_KEYWORDS, line_no)

        roles = tuple(clauses.get("roles", []))
        if not roles:
            raise ConfigError(f"line {line_no}: agent {agent_id} needs at least one role")
        at = clauses.get("at", [])
        if len(at) != 2:
            raise ConfigError(f"line {line_no}: agent {agent_id} needs: at <x> <y>")
        try:
            position = (float(at[0]), float(at[1]))
        except ValueError:
            raise ConfigError(f"line {line_no}: bad coordinates {at!r}") from None
        profile = _parse_profile(clauses.get("profile", ["tutor"]), line_no)
        hands = Hands.both_free()
        if "hands" in clauses:
            tokens_h = clauses["hands"]
            if len(tokens_h) != 2:
                raise ConfigError(f"line {line_no}: hands needs <left> <right>")
            try:
                hands = Hands(HandState.from_token(tokens_h[0]), HandState.from_token(tokens_h[1]))
            except ValueError as exc:
                raise ConfigError(f"line {line_no}: {exc}") from None
            if hands.left.is_indifferent or hands.right.is_indifferent:
                raise ConfigError(f"line {line_no}: an actual hand cannot be 'any'")
        seed = None
        if "seed" in clauses:
            try:
                seed = int(clauses["seed"][0])
            except (IndexError, ValueError):
                raise ConfigError(f"line {line_no}: seed needs one integer") from None
        action_ticks = 1
        if "duration" in clauses:
            try:
                action_ticks = int(clauses["duration"][0])
            except (IndexError, ValueError):
                raise ConfigError(f"line {line_no}: duration needs one integer") from None
            if action_ticks < 1:
                raise ConfigError(f"line {line_no}: duration must be >= 1")
        agents.append(
            AgentSpec(
                id=agent_id,
                roles=roles,
                abilities=frozenset(clauses.get("abilities", [])),
                position=position,
                profile=profile,
                hands=hands,
                seed=seed,
                action_ticks=action_ticks,
            )
        )
    if not agents:
        raise ConfigError("agents file declares no agents")
    return agents


def parse_criteria(text: str) -> tuple[Criterion, ...]:
    """Parse a criteria file; unlisted built-in values keep their defaults."""
    defaults = {c.name: c for c in DEFAULT_CRITERIA}
    out: list[Criterion] = []
    current_name: str | None = None
    current_weight = 0.0
    current_coeffs: dict[str, float] = {}

    def flush() -> None:
        nonlocal current_name
        if current_name is not None:
            out.append(Criterion(current_name, current_weight, dict(current_coeffs)))
            current_name = None

    for line_no, tokens in _lines(text):
        if tokens[0] == "criterion":
            flush()
            if len(tokens) != 4 or tokens[2] != "weight":
                raise ConfigError(f"line {line_no}: expected: criterion <name> weight <w>")
            name = tokens[1]
            if name not in known_criteria():
                raise ConfigError(f"line {line_no}: unknown criterion {name!r}")
            try:
                current_weight = float(tokens[3])
            except ValueError:
                raise ConfigError(f"line {line_no}: weight {tokens[3]!r} not a number") from None
            if current_weight < 0:
                raise ConfigError(f"line {line_no}: weight must be >= 0")
            current_name = name
            base = defaults.get(name)
            current_coeffs = dict(base.coefficients) if base else {}
        elif tokens[0] == "value":
            if current_name is None:
                raise ConfigError(f"line {line_no}: value line before any criterion")
            if len(tokens) != 4 or tokens[2] != "coeff":
                raise ConfigError(f"line {line_no}: expected: value <bucket> coeff <c>")
            try:
                current_coeffs[tokens[1]] = float(tokens[3])
            except ValueError:
                raise ConfigError(f"line {line_no}: coeff {tokens[3]!r} not a number") from None
        else:
            raise ConfigError(f"line {line_no}: unknown directive {tokens[0]!r}")
    flush()
    if not out:
        raise ConfigError("criteria file declares no criteria")
    return tuple(out)


def parse_agents_file(path: str) -> list[AgentSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_agents(fh.read())


def parse_criteria_file(path: str) -> tuple[Criterion, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_criteria(fh.read())
