// Client-side session view: a pure projection of snapshots and event
// frames received from the server.  Nothing here invents state; step
// marking, enabled actions and scores always come from server replies,
// and a gap in the event sequence flags the view for a full resnapshot.

import type {
  AllowedRow,
  EventRecord,
  Participant,
  PendingNotification,
  Progress,
  RoleInfo,
  ScoreRow,
  Snapshot,
  StepRow,
  WorldObject,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface FeedItem {
  seq: number;
  tick: number;
  text: string;
}

export interface Rejection {
  action: string;
  reason: string;
}

export interface SessionView {
  status: ConnectionStatus;
  name: string;
  humanoid: string | null;
  role: string | null;

  scenario: string;
  phase: string;
  seq: number;
  tick: number;
  finished: boolean;

  roles: Record<string, RoleInfo>;
  participants: Participant[];
  objects: WorldObject[];
  steps: StepRow[];
  pending: PendingNotification[];
  scores: Record<string, ScoreRow[]>;
  progress: Progress;

  allowed: AllowedRow[];
  allowedSeq: number;

  feed: FeedItem[];
  // Last sequence written to the feed.  Event frames arrive in order on
  // the socket but a snapshot reply can overtake them, so the feed keeps
  // its own cursor instead of reusing the state cursor `seq`.
  feedSeq: number;
  rejection: Rejection | null;

  // Set when an event implies the marking or scores moved; the app
  // answers by refreshing snapshot and allowed list from the server.
  wantsRefresh: boolean;
  // Set when an event arrived out of sequence; only a snapshot clears it.
  needsResync: boolean;
}

const FEED_LIMIT = 100;

export function emptyView(): SessionView {
  return {
    status: "connecting",
    name: "",
    humanoid: null,
    role: null,
    scenario: "",
    phase: "lobby",
    seq: -1,
    tick: 0,
    finished: false,
    roles: {},
    participants: [],
    objects: [],
    steps: [],
    pending: [],
    scores: {},
    progress: { steps_total: 0, actions_completed: 0, distinct_actions: 0, finished: false },
    allowed: [],
    allowedSeq: -1,
    feed: [],
    feedSeq: -1,
    rejection: null,
    wantsRefresh: false,
    needsResync: false,
  };
}

export function applySnapshot(view: SessionView, snapshot: Snapshot): void {
  if (snapshot.seq < view.seq) {
    return; // A pushed event frame already carried the state further.
  }
  view.scenario = snapshot.scenario;
  view.phase = snapshot.phase;
  view.seq = snapshot.seq;
  view.tick = snapshot.tick;
  view.finished = snapshot.finished;
  view.roles = snapshot.roles;
  view.participants = snapshot.participants;
  view.objects = snapshot.objects;
  view.steps = snapshot.steps;
  view.pending = snapshot.pending_notifications;
  view.scores = snapshot.scores;
  view.progress = snapshot.progress;
  view.needsResync = false;
  if (view.humanoid !== null) {
    const mine = snapshot.participants.find((p) => p.id === view.humanoid);
    if (mine !== undefined && mine.roles.length > 0) {
      view.role = mine.roles[0];
    }
  }
}

export function applyAllowed(view: SessionView, seq: number, rows: AllowedRow[]): void {
  if (seq < view.allowedSeq) {
    return; // Stale reply; a fresher list is already displayed.
  }
  view.allowed = rows;
  view.allowedSeq = seq;
}

export function noteRejection(view: SessionView, action: string, reason: string): void {
  view.rejection = { action, reason };
}

export function clearRejection(view: SessionView): void {
  view.rejection = null;
}

function pushFeed(view: SessionView, event: EventRecord, text: string): void {
  view.feed.push({ seq: event.seq, tick: event.tick, text });
  if (view.feed.length > FEED_LIMIT) {
    view.feed.splice(0, view.feed.length - FEED_LIMIT);
  }
}

function findParticipant(view: SessionView, id: unknown): Participant | undefined {
  return view.participants.find((p) => p.id === id);
}

/** True when my avatar was scored as a candidate for this action. */
function wasMyCandidacy(view: SessionView, action: string): boolean {
  if (view.humanoid === null) {
    return false;
  }
  const rows = view.scores[action];
  return rows !== undefined && rows.some((row) => row.humanoid === view.humanoid);
}

export function describeEvent(view: SessionView, event: EventRecord): string {
  const p = event.payload;
  switch (event.kind) {
    case "ParticipantJoined":
      return `${p.id} joined (${p.kind})`;
    case "RoleClaimed":
      return `${p.humanoid} claimed role ${p.role}`;
    case "ActionStarted": {
      const performers = (p.performers as string[]).join(", ");
      const covered =
        wasMyCandidacy(view, p.action as string) &&
        !(p.performers as string[]).includes(view.humanoid ?? "")
          ? " (assisted)"
          : "";
      return `${performers} started ${p.action}${covered}`;
    }
    case "ActionCompleted":
      return `${(p.performers as string[]).join(", ")} completed ${p.action}`;
    case "ImplicitGrasp":
      return `${p.humanoid} grasped ${p.object} (${p.hand})`;
    case "ImplicitLay":
      return `${p.humanoid} laid down ${p.object} (${p.hand})`;
    case "NotifyIntentRecorded":
      return `${p.humanoid} is ready for ${p.collaborative} (until tick ${p.expiry_tick})`;
    case "NotificationExpired":
      return `${p.humanoid}'s readiness for ${p.collaborative} expired`;
    case "CollaborativeStarted":
      return `${(p.performers as string[]).join(" + ")} performed ${p.action} together`;
    case "CommunicationSent":
      return `${p.sender} to ${p.recipient_role}: "${p.message}"`;
    case "ScenarioCompleted":
      return "scenario completed";
    case "ScoresPublished":
      return "scores updated";
    default:
      return event.kind;
  }
}

/**
 * Fold one pushed event into the view.  Returns false when the event
 * did not follow the last applied sequence number, in which case the
 * view is flagged for a resnapshot and the event is dropped.
 */
export function applyEvent(view: SessionView, event: EventRecord): boolean {
  if (event.seq > view.feedSeq) {
    view.feedSeq = event.seq;
    pushFeed(view, event, describeEvent(view, event));
    if (event.tick > view.tick) {
      view.tick = event.tick;
    }
  }
  if (event.seq <= view.seq) {
    return true; // State already covered by a snapshot or an earlier frame.
  }
  if (event.seq > view.seq + 1) {
    view.needsResync = true;
    return false;
  }
  view.seq = event.seq;
  const p = event.payload;
  switch (event.kind) {
    case "ParticipantJoined": {
      if (findParticipant(view, p.id) === undefined) {
        view.participants.push({
          id: p.id as string,
          kind: p.kind as string,
          roles: (p.roles as string[]) ?? [],
          abilities: (p.abilities as string[]) ?? [],
          position: p.position as [number, number],
          hands: (p.hands as { left: string; right: string }) ?? { left: "free", right: "free" },
          current_action: null,
        });
      }
      view.wantsRefresh = true;
      break;
    }
    case "RoleClaimed": {
      const role = view.roles[p.role as string];
      if (role !== undefined) {
        role.claimed_by = p.humanoid as string;
      }
      const claimant = findParticipant(view, p.humanoid);
      if (claimant !== undefined && !claimant.roles.includes(p.role as string)) {
        claimant.roles.push(p.role as string);
      }
      break;
    }
    case "ActionStarted": {
      for (const performer of p.performers as string[]) {
        const participant = findParticipant(view, performer);
        if (participant !== undefined) {
          participant.current_action = {
            action: p.action as string,
            completes: event.tick + (p.duration as number),
          };
        }
      }
      view.wantsRefresh = true;
      break;
    }
    case "ActionCompleted": {
      for (const performer of p.performers as string[]) {
        const participant = findParticipant(view, performer);
        if (participant !== undefined) {
          participant.current_action = null;
        }
      }
      view.wantsRefresh = true;
      break;
    }
    case "NotifyIntentRecorded": {
      view.pending.push({
        collaborative: p.collaborative as string,
        action: p.action as string,
        humanoid: p.humanoid as string,
        expiry_tick: p.expiry_tick as number,
      });
      view.wantsRefresh = true;
      break;
    }
    case "NotificationExpired": {
      view.pending = view.pending.filter(
        (row) => !(row.collaborative === p.collaborative && row.action === p.action)
      );
      view.wantsRefresh = true;
      break;
    }
    case "CollaborativeStarted": {
      view.pending = view.pending.filter((row) => row.collaborative !== p.action);
      view.wantsRefresh = true;
      break;
    }
    case "ScoresPublished": {
      view.scores = p.scores as Record<string, ScoreRow[]>;
      break;
    }
    case "ScenarioCompleted": {
      view.finished = true;
      view.wantsRefresh = true;
      break;
    }
    default:
      break;
  }
  return true;
}

/** Ticks left before a pending notification lapses. */
export function ticksLeft(view: SessionView, row: PendingNotification): number {
  return Math.max(0, row.expiry_tick - view.tick);
}

export function doneSteps(view: SessionView): number {
  return view.steps.filter((step) => step.done).length;
}
