"""Session-level tests: tick order, resource exclusion, mixed control."""

from __future__ import annotations

import io
import json
import random

from crewdrill import events as ev
from crewdrill.configs import AgentSpec, parse_agents
from crewdrill.dsl.parser import parse
from crewdrill.errors import RoleNotAllowed, RoleTaken
from crewdrill.hands import Hands
from crewdrill.profiles import TUTOR
from crewdrill.session import Session, SessionConfig

PAIR = """SCENARIO pair
WORLD
  object left-knob at 1 1 abilities turnable
  object right-knob at 2 1 abilities turnable
  relation turn actor deft target turnable effects +turned
ROLES
  role crew-a grants deft
  role crew-b grants deft
ACTIONS
  action turn-a interact turn left-knob roles crew-a:1 crew-b:1
  action turn-b interact turn right-knob roles crew-a:1 crew-b:1
GRAPH
  init s0
  step s0
  t s0 -> pa+pb
  step pa turn-a
  step pb turn-b
  t pa+pb -> end
  step end
  terminal end
"""

SOLO = """SCENARIO solo
WORLD
  object knob at 1 1 abilities turnable
  relation turn actor deft target turnable effects +turned
ROLES
  role crew-a grants deft
  role crew-b grants deft
ACTIONS
  action turn-knob interact turn knob roles crew-a:1 crew-b:1
GRAPH
  init s
  step s turn-knob
  t s -> end
  step end
  terminal end
"""


def _tutor(agent_id: str, role: str = "crew-a", ticks: int = 1) -> AgentSpec:
    return AgentSpec(
        id=agent_id,
        roles=(role,),
        abilities=frozenset({"deft"}),
        position=(1.0, 1.0),
        profile=TUTOR,
        action_ticks=ticks,
    )


def _events(session: Session, kind: str):
    return [e for e in session.events if e.kind == kind]


def _timeline(session: Session) -> list[tuple[int, str, str]]:
    out = []
    for e in session.events:
        if e.kind in ("ActionStarted", "ActionCompleted"):
            out.append((e.tick, e.kind, e.payload["action"]))
    return out


# ---------------------------------------------------------------------------
# full runs


def test_winch_run_orders_actions_and_hands_off_between_roles(winch_doc, winch_agents):
    session = Session(winch_doc, winch_agents, config=SessionConfig(seed=42))
    assert session.run_to_completion()

    started = {e.payload["action"]: e for e in _events(session, "ActionStarted")}
    completed = {e.payload["action"]: e for e in _events(session, "ActionCompleted")}
    assert started["pull-cable"].payload["performers"] == ["vh-assistant"]
    assert started["loosen-drum"].payload["performers"] == ["vh-operator"]
    # The assistant takes over on the tick after the operator's
    # preceding action completes, never earlier.
    assert started["pull-cable"].tick == completed["loosen-drum"].tick + 1
    assert started["loosen-drum"].tick == completed["release-brake"].tick + 1
    assert started["unbolt-winch"].tick == completed["pull-cable"].tick + 1

    kinds = [e.kind for e in session.events]
    assert "CommunicationSent" in kinds
    assert kinds.count("CollaborativeStarted") == 1
    assert kinds[-1] in ("ScenarioCompleted", "ScoresPublished")
    assert session.state.finished


def test_dark_screw_busy_hand_flips_best_candidate(dark_doc, dark_agents):
    session = Session(dark_doc, dark_agents)
    session.start()
    rows = session.latest_scores["hold-bracket"]
    assert rows[0].humanoid == "vh-helper"
    by_id = {r.humanoid: r.score for r in rows}
    assert by_id["vh-helper"] > by_id["vh-worker1"]

    # Freeing worker1's busy hand flips the assignment back.
    session.hands["vh-worker1"] = Hands.both_free()
    flipped = session._scores()["hold-bracket"]
    assert flipped[0].humanoid == "vh-worker1"

    # With the original hands the cast still finishes: the helper steps in.
    session2 = Session(dark_doc, dark_agents)
    assert session2.run_to_completion()
    started = {e.payload["action"]: e for e in _events(session2, "ActionStarted")}
    assert started["hold-bracket"].payload["performers"] == ["vh-helper"]


# ---------------------------------------------------------------------------
# exclusion and demands


def test_in_flight_action_is_never_started_twice():
    doc = parse(SOLO)
    session = Session(doc, [_tutor("vh-a", ticks=3), _tutor("vh-b", role="crew-b", ticks=3)])
    assert session.run_to_completion()
    assert len(_events(session, "ActionStarted")) == 1
    # While one agent works, the other finds nothing to do and idles.
    assert _events(session, "ActionStarted")[0].payload["performers"] == ["vh-a"]


def test_parallel_actions_are_split_between_agents():
    doc = parse(PAIR)
    session = Session(doc, [_tutor("vh-a", ticks=2), _tutor("vh-b", role="crew-b", ticks=2)])
    assert session.run_to_completion()
    started = _events(session, "ActionStarted")
    assert len(started) == 2
    assert started[0].tick == started[1].tick == 0
    assert {e.payload["action"] for e in started} == {"turn-a", "turn-b"}
    assert {e.payload["performers"][0] for e in started} == {"vh-a", "vh-b"}


def test_pedagogical_demand_redirects_next_decision():
    doc = parse(PAIR)
    session = Session(doc, [_tutor("vh-a")])
    session.start()
    session.demand("vh-a", "turn-b")
    session.tick_once()
    first = _events(session, "ActionStarted")[0]
    assert first.payload["action"] == "turn-b"
    assert session.demands == {}
    assert session.run_to_completion()


# ---------------------------------------------------------------------------
# lobby and role claims


def test_claim_role_rules(winch_doc):
    session = Session(winch_doc, [])
    pat = session.claim_role("Pat", "operator")
    assert pat.id == "av-pat"
    assert "can-operate-winch" in pat.abilities
    try:
        session.claim_role("Sam", "operator")
    except RoleTaken:
        pass
    else:
        raise AssertionError("expected RoleTaken")
    try:
        session.claim_role("Sam", "director")
    except RoleNotAllowed:
        pass
    else:
        raise AssertionError("expected RoleNotAllowed")
    # The same display name extends the same avatar with a second role.
    again = session.claim_role("Pat", "assistant")
    assert again is pat
    assert set(pat.roles) == {"operator", "assistant"}
    assert "can-pull" in pat.abilities


def test_start_skips_virtuals_whose_role_is_claimed(winch_doc, winch_agents):
    session = Session(winch_doc, winch_agents)
    session.claim_role("Pat", "operator")
    session.start()
    ids = set(session.world.humanoids)
    assert "av-pat" in ids
    assert "vh-assistant" in ids
    assert "vh-operator" not in ids


def test_rejections_carry_reason_and_snapshot(winch_doc, winch_agents):
    session = Session(winch_doc, winch_agents)
    reply = session.perform_action("vh-operator", "release-brake")
    assert reply["status"] == "rejected"
    assert reply["reason"] == "session not running"
    assert reply["snapshot"]["phase"] == "lobby"

    session.start()
    reply = session.perform_action("vh-operator", "pull-cable")
    assert reply["status"] == "rejected"
    assert reply["reason"] == "action not enabled"
    reply = session.perform_action("vh-operator", "no-such-thing")
    assert reply["status"] == "rejected"
    assert "unknown action" in reply["reason"]
    reply = session.perform_action("ghost", "release-brake")
    assert "unknown humanoid" in reply["reason"]


# ---------------------------------------------------------------------------
# avatar control, world actions, queries


def _lobby_pair():
    doc = parse(PAIR)
    session = Session(doc, [])
    avatar = session.claim_role("Pat", "crew-a")
    session.start()
    return session, avatar


def test_world_action_outside_scenario_runs_without_marking_change():
    session, avatar = _lobby_pair()
    marked_before = set(session.state.marked)
    reply = session.perform_action(avatar.id, "world:turn:left-knob")
    assert reply == {"status": "ok", "action": "world:turn:left-knob"}
    session.tick_once()
    session.tick_once()
    assert set(session.state.marked) == marked_before
    completed = _events(session, "ActionCompleted")
    assert completed[-1].payload["action"] == "world:turn:left-knob"
    assert "turned" in session.world.objects["left-knob"].state_tags
    # The scenario steps are untouched, so the real action still runs.
    assert session.perform_action(avatar.id, "turn-a")["status"] == "ok"


def test_world_action_requires_abilities():
    session, avatar = _lobby_pair()
    reply = session.perform_action(avatar.id, "world:turn:no-such-object")
    assert reply["status"] == "rejected"


def test_query_allowed_reflects_roles_feasibility_and_in_flight(winch_doc, winch_agents):
    session = Session(winch_doc, [])
    operator = session.claim_role("Pat", "operator")
    helper = session.claim_role("Kim", "assistant")
    session.start()

    allowed = session.query_allowed(operator.id)
    assert allowed["status"] == "ok"
    assert [row["action"] for row in allowed["allowed"]] == ["release-brake"]
    row = allowed["allowed"][0]
    assert row["feasible"] and not row["in_flight"]
    assert row["rank"] == 1

    # The assistant has no role on the only enabled action.
    assert session.query_allowed(helper.id)["allowed"] == []

    assert session.perform_action(operator.id, "release-brake")["status"] == "ok"
    row = session.query_allowed(operator.id)["allowed"][0]
    assert row["in_flight"]
    assert session.query_allowed("nobody")["status"] == "rejected"


def test_query_allowed_stamps_sequence_and_carries_declared_text(winch_doc):
    session = Session(winch_doc, [])
    operator = session.claim_role("Pat", "operator")
    assistant = session.claim_role("Kim", "assistant")
    session.start()

    reply = session.query_allowed(operator.id)
    assert reply["seq"] == session.seq - 1
    assert reply["tick"] == session.tick
    row = reply["allowed"][0]
    assert row["recipient_role"] is None and row["message"] is None

    # Walk the procedure until the declared announcement comes up.
    for who, action in [
        (operator.id, "release-brake"),
        (operator.id, "loosen-drum"),
        (assistant.id, "pull-cable"),
        (operator.id, "unbolt-winch"),
    ]:
        assert session.perform_action(who, action)["status"] == "ok", action
        while session.running:
            session.tick_once()
    rows = session.query_allowed(operator.id)["allowed"]
    announce = next(row for row in rows if row["action"] == "announce-lower")
    assert announce["kind"] == "communication"
    assert announce["recipient_role"] == "assistant"
    assert announce["message"] == "ready to lower the winch"


def test_implicit_grasp_reported_and_emitted(winch_doc):
    session = Session(winch_doc, [])
    operator = session.claim_role("Pat", "operator")
    session.start()
    session.perform_action(operator.id, "release-brake")
    session.tick_once()
    session.tick_once()
    # loosen-drum needs the crank in hand: the plan shows the grasp.
    rows = session.query_allowed(operator.id)["allowed"]
    assert rows[0]["action"] == "loosen-drum"
    assert rows[0]["implicit_steps"] == [{"op": "grasp", "object": "crank", "hand": "left"}]
    assert session.perform_action(operator.id, "loosen-drum")["status"] == "ok"
    grasp = _events(session, "ImplicitGrasp")[-1]
    assert grasp.payload == {"humanoid": operator.id, "object": "crank", "hand": "left"}
    assert session.world.objects["crank"].held_by == (operator.id, "left")


# ---------------------------------------------------------------------------
# command queue semantics


def _scripted(winch_doc, order, via_queue: bool):
    session = Session(winch_doc, [])
    op = session.claim_role("Pat", "operator")
    asst = session.claim_role("Kim", "assistant")
    session.start()
    calls = {
        "release": (session.perform_action, op.id, "release-brake"),
        "early-pull": (session.perform_action, asst.id, "pull-cable"),
        "chat": (session.communicate, asst.id, "operator", "how is it going"),
        "bad-role": (session.perform_action, asst.id, "release-brake"),
    }
    for key in order:
        fn, *args = calls[key]
        if via_queue:
            session.enqueue(fn, *args)
        else:
            fn(*args)
    for _ in range(4):
        session.tick_once()
    domain = [
        (e.tick, e.kind, ev.canonical_json(e.payload))
        for e in session.events
        if e.kind != "ScoresPublished"
    ]
    return domain, session.state_hash()


def test_queued_commands_equal_direct_calls_in_arrival_order(winch_doc):
    """Queued commands apply in arrival order, exactly like direct calls.

    ScoresPublished is a derived notification whose emission point may
    differ; the domain events and the resulting state must not.
    """
    keys = ["release", "early-pull", "chat", "bad-role"]
    rng = random.Random(5)
    for _ in range(6):
        order = keys[:]
        rng.shuffle(order)
        direct_events, direct_hash = _scripted(winch_doc, order, via_queue=False)
        queued_events, queued_hash = _scripted(winch_doc, order, via_queue=True)
        assert direct_events == queued_events, order
        assert direct_hash == queued_hash, order


def test_snapshot_shape_and_log_round_trip(winch_doc, winch_agents):
    session = Session(winch_doc, winch_agents, config=SessionConfig(seed=9))
    log = io.StringIO()
    session.attach_log(log)
    assert session.run_to_completion()
    session.close_log()

    snap = session.snapshot()
    for key in (
        "seq",
        "tick",
        "phase",
        "scenario",
        "scenario_hash",
        "roles",
        "participants",
        "objects",
        "steps",
        "enabled",
        "pending_notifications",
        "scores",
        "progress",
        "finished",
    ):
        assert key in snap, key
    assert snap["scenario"] == "winch-removal"
    assert snap["finished"] is True
    assert snap["enabled"] == []
    assert {p["id"] for p in snap["participants"]} == {"vh-assistant", "vh-operator"}
    assert all(set(p["hands"]) == {"left", "right"} for p in snap["participants"])

    lines = log.getvalue().splitlines()
    header = json.loads(lines[0])
    assert header["format"] == "crewdrill-events"
    assert header["version"] == 1
    assert header["seed"] == 9
    assert header["scenario_hash"] == snap["scenario_hash"]
    trailer = json.loads(lines[-1])
    assert trailer["final_state_hash"] == session.state_hash()
    assert len(lines) == len(session.events) + 2


def test_same_seed_same_agents_byte_identical_logs(winch_doc, winch_agents):
    def run():
        session = Session(winch_doc, winch_agents, config=SessionConfig(seed=42))
        log = io.StringIO()
        session.attach_log(log)
        session.run_to_completion()
        session.close_log()
        return log.getvalue()

    assert run() == run()


def test_state_hash_tracks_world_and_marking(winch_doc, winch_agents):
    a = Session(winch_doc, winch_agents)
    b = Session(winch_doc, winch_agents)
    a.start()
    b.start()
    assert a.state_hash() == b.state_hash()
    # A merely started action leaves marking, objects and hands alone;
    # its completion advances the marking and applies the effects.
    a.tick_once()
    a.tick_once()
    assert a.state_hash() != b.state_hash()
