// Wire types for the session protocol: one JSON document per WebSocket
// text frame, matching docs/protocol.md in the server repository.

export interface RoleInfo {
  grants: string[];
  claimed_by: string | null;
}

export interface HandsView {
  left: string;
  right: string;
}

export interface CurrentAction {
  action: string;
  completes: number;
}

export interface Participant {
  id: string;
  kind: string;
  roles: string[];
  abilities: string[];
  position: [number, number];
  hands: HandsView;
  current_action: CurrentAction | null;
  profile?: Record<string, number>;
}

export interface WorldObject {
  id: string;
  name: string;
  abilities: string[];
  position: [number, number];
  state_tags: string[];
  held_by: [string, string] | null;
}

export interface StepRow {
  id: string;
  action: string | null;
  marked: boolean;
  done: boolean;
  terminal: boolean;
}

export interface EnabledRow {
  action: string;
  kind: string;
  roles: { role: string; priority: number }[];
  in_flight: boolean;
}

export interface PendingNotification {
  collaborative: string;
  action: string;
  humanoid: string;
  expiry_tick: number;
}

export interface ScoreBreakdownEntry {
  criterion: string;
  value: string;
  contribution: number;
}

export interface ScoreRow {
  action: string;
  humanoid: string;
  score: number;
  rank: number;
  sole_candidate: boolean;
  breakdown: ScoreBreakdownEntry[];
}

export interface Progress {
  steps_total: number;
  actions_completed: number;
  distinct_actions: number;
  finished: boolean;
}

export interface Snapshot {
  seq: number;
  tick: number;
  phase: string;
  scenario: string;
  scenario_hash: string;
  roles: Record<string, RoleInfo>;
  participants: Participant[];
  objects: WorldObject[];
  steps: StepRow[];
  enabled: EnabledRow[];
  pending_notifications: PendingNotification[];
  scores: Record<string, ScoreRow[]>;
  progress: Progress;
  finished: boolean;
}

export interface ImplicitStep {
  op: string;
  object: string;
  hand: string;
}

export interface AllowedRow {
  action: string;
  kind: string;
  urgent: boolean;
  recipient_role: string | null;
  message: string | null;
  in_flight: boolean;
  feasible: boolean;
  implicit_steps: ImplicitStep[] | null;
  score: number | null;
  rank: number | null;
  sole_candidate: boolean;
}

export interface EventRecord {
  seq: number;
  tick: number;
  kind: string;
  payload: Record<string, unknown>;
}

export type ClientMessage =
  | { type: "hello"; name: string; humanoid?: string }
  | { type: "claim_role"; role: string }
  | { type: "start" }
  | { type: "snapshot" }
  | { type: "query_allowed" }
  | { type: "perform"; action: string }
  | { type: "communicate"; recipient_role: string; message: string }
  | { type: "notify"; action: string };

export type ServerReply =
  | { type: "welcome"; snapshot: Snapshot; humanoid?: string }
  | { type: "ok"; status?: string; humanoid?: string; snapshot?: Snapshot; action?: string }
  | { type: "rejected"; status?: string; reason: string; snapshot?: Snapshot }
  | {
      type: "allowed";
      status: string;
      humanoid: string;
      seq: number;
      tick: number;
      allowed: AllowedRow[];
    }
  | { type: "snapshot"; snapshot: Snapshot }
  | { type: "error"; reason: string };

export interface EventFrame {
  type: "event";
  event: EventRecord;
}

export type ServerMessage = ServerReply | EventFrame;

export function isEventFrame(message: ServerMessage): message is EventFrame {
  return message.type === "event";
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) {
    return null;
  }
  const type = (data as { type?: unknown }).type;
  if (typeof type !== "string") {
    return null;
  }
  return data as ServerMessage;
}

export function rejectionReason(reply: ServerReply): string | null {
  if (reply.type === "rejected" || reply.type === "error") {
    return reply.reason;
  }
  return null;
}
