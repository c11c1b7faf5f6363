// Hand-rolled server payloads for unit tests, shaped like the winch
// exercise but trimmed to what the assertions need.

import type { AllowedRow, EventRecord, Snapshot } from "../src/protocol.js";

export function winchSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    seq: 4,
    tick: 0,
    phase: "running",
    scenario: "winch-removal",
    scenario_hash: "abc123",
    roles: {
      assistant: { grants: ["can-pull"], claimed_by: "vh-assistant" },
      operator: { grants: ["can-operate-winch", "can-unbolt"], claimed_by: "av-riley" },
    },
    participants: [
      {
        id: "av-riley",
        kind: "avatar",
        roles: ["operator"],
        abilities: ["can-operate-winch", "can-unbolt", "dexterous"],
        position: [2.0, 1.2],
        hands: { left: "free", right: "free" },
        current_action: null,
      },
      {
        id: "vh-assistant",
        kind: "virtual",
        roles: ["assistant"],
        abilities: ["can-pull", "dexterous"],
        position: [3.2, 1.0],
        hands: { left: "free", right: "free" },
        current_action: null,
      },
    ],
    objects: [
      {
        id: "brake",
        name: "Drum brake lever",
        abilities: ["brake-like"],
        position: [2.0, 1.0],
        state_tags: ["engaged"],
        held_by: null,
      },
      {
        id: "wrench",
        name: "Mounting wrench",
        abilities: ["holdable", "wrench-like"],
        position: [1.5, 0.5],
        state_tags: [],
        held_by: ["vh-assistant", "left"],
      },
    ],
    steps: [
      { id: "s1", action: "release-brake", marked: true, done: false, terminal: false },
      { id: "s2", action: "loosen-drum", marked: false, done: false, terminal: false },
      { id: "s8", action: null, marked: false, done: false, terminal: true },
    ],
    enabled: [
      {
        action: "release-brake",
        kind: "interaction",
        roles: [{ role: "operator", priority: 1 }],
        in_flight: false,
      },
    ],
    pending_notifications: [],
    scores: {
      "release-brake": [
        {
          action: "release-brake",
          humanoid: "av-riley",
          score: 6.0,
          rank: 1,
          sole_candidate: true,
          breakdown: [
            { criterion: "role_priority", value: "1", contribution: 3.0 },
            { criterion: "proximity", value: "lt1", contribution: 2.0 },
            { criterion: "easiness", value: "feasible", contribution: 1.0 },
          ],
        },
      ],
    },
    progress: { steps_total: 3, actions_completed: 0, distinct_actions: 0, finished: false },
    finished: false,
    ...overrides,
  };
}

export function allowedRow(overrides: Partial<AllowedRow> = {}): AllowedRow {
  return {
    action: "release-brake",
    kind: "interaction",
    urgent: false,
    recipient_role: null,
    message: null,
    in_flight: false,
    feasible: true,
    implicit_steps: [],
    score: 5.5,
    rank: 1,
    sole_candidate: true,
    ...overrides,
  };
}

export function event(
  seq: number,
  tick: number,
  kind: string,
  payload: Record<string, unknown>
): EventRecord {
  return { seq, tick, kind, payload };
}
