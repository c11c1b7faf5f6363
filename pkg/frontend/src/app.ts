// Controller for the trainee board: routes server frames into the view,
// answers view refresh flags with snapshot/query_allowed round trips,
// and turns board clicks into protocol commands.  Every rejected
// command is surfaced on the banner and followed by a snapshot refresh,
// so a stale click is corrected, never swallowed.

import { SessionConnection } from "./connection.js";
import type { ServerReply } from "./protocol.js";
import { Board, type Handlers } from "./ui.js";
import {
  applyAllowed,
  applyEvent,
  applySnapshot,
  clearRejection,
  emptyView,
  noteRejection,
  type SessionView,
} from "./view.js";

export interface AppOptions {
  /** Poll interval for keeping tick and countdowns fresh; 0 disables. */
  pollMs?: number;
  /** Name offered in the first hello. */
  name?: string;
}

export class TraineeApp {
  readonly view: SessionView;
  private readonly board: Board;
  private outstanding = 0;
  private idleWaiters: Array<() => void> = [];
  private refreshing = false;
  private refreshAgain = false;
  private poller: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly connection: SessionConnection,
    root: HTMLElement,
    private readonly options: AppOptions = {}
  ) {
    this.view = emptyView();
    this.view.name = options.name ?? "";
    this.board = new Board(root, this.handlers());
    connection.onStatus = (status) => {
      this.view.status = status;
      this.render();
    };
    connection.onOpen = () => {
      void this.track(this.hello());
    };
    connection.onEvent = (event) => {
      const applied = applyEvent(this.view, event);
      if (!applied || this.view.needsResync) {
        void this.track(this.resync());
      } else if (this.view.wantsRefresh) {
        this.view.wantsRefresh = false;
        void this.track(this.refresh());
      }
      this.render();
    };
  }

  start(): void {
    this.connection.connect();
    const pollMs = this.options.pollMs ?? 1000;
    if (pollMs > 0) {
      this.poller = setInterval(() => void this.track(this.refresh()), pollMs);
    }
  }

  stop(): void {
    if (this.poller !== null) {
      clearInterval(this.poller);
      this.poller = null;
    }
    this.connection.stop();
  }

  /** Resolves once no command or refresh is in flight. */
  settled(): Promise<void> {
    if (this.outstanding === 0) {
      return Promise.resolve();
    }
    return new Promise((resolve) => this.idleWaiters.push(resolve));
  }

  render(): void {
    this.board.render(this.view);
  }

  async refresh(): Promise<void> {
    if (this.refreshing) {
      this.refreshAgain = true;
      return;
    }
    this.refreshing = true;
    try {
      do {
        this.refreshAgain = false;
        const snap = await this.connection.request({ type: "snapshot" });
        if (snap.type === "snapshot") {
          applySnapshot(this.view, snap.snapshot);
          this.render();
        }
        if (this.view.humanoid !== null) {
          const allowed = await this.connection.request({ type: "query_allowed" });
          if (allowed.type === "allowed") {
            // Render in the same turn as the apply: the displayed action
            // list must never lag behind the sequence number it claims.
            applyAllowed(this.view, allowed.seq, allowed.allowed);
            this.render();
          }
        }
      } while (this.refreshAgain);
    } finally {
      this.refreshing = false;
    }
    this.render();
  }

  private async hello(): Promise<void> {
    const message: { type: "hello"; name: string; humanoid?: string } = {
      type: "hello",
      name: this.view.name || "guest",
    };
    if (this.view.humanoid !== null) {
      message.humanoid = this.view.humanoid;
    }
    const reply = await this.connection.request(message);
    if (reply.type === "welcome") {
      if (reply.humanoid !== undefined) {
        this.view.humanoid = reply.humanoid;
      }
      applySnapshot(this.view, reply.snapshot);
      if (this.view.humanoid !== null) {
        await this.refresh();
      }
    }
    this.render();
  }

  private async resync(): Promise<void> {
    const reply = await this.connection.request({ type: "snapshot" });
    if (reply.type === "snapshot") {
      applySnapshot(this.view, reply.snapshot);
    }
    if (this.view.humanoid !== null) {
      const allowed = await this.connection.request({ type: "query_allowed" });
      if (allowed.type === "allowed") {
        applyAllowed(this.view, allowed.seq, allowed.allowed);
      }
    }
    this.render();
  }

  private async command(label: string, send: () => Promise<ServerReply>): Promise<void> {
    const reply = await send();
    if (reply.type === "rejected" || reply.type === "error") {
      noteRejection(this.view, label, reply.reason);
      await this.refresh();
    } else {
      clearRejection(this.view);
      if (reply.type === "ok" && reply.snapshot !== undefined) {
        applySnapshot(this.view, reply.snapshot);
      }
      await this.refresh();
    }
    this.render();
  }

  private track<T>(work: Promise<T>): Promise<T> {
    this.outstanding += 1;
    return work.finally(() => {
      this.outstanding -= 1;
      if (this.outstanding === 0) {
        const waiters = this.idleWaiters;
        this.idleWaiters = [];
        for (const resolve of waiters) {
          resolve();
        }
      }
    });
  }

  private handlers(): Handlers {
    return {
      onHello: (name) => {
        this.view.name = name;
        void this.track(this.hello());
      },
      onClaim: (role) => {
        void this.track(
          (async () => {
            const reply = await this.connection.request({ type: "claim_role", role });
            if (reply.type === "ok" && reply.humanoid !== undefined) {
              this.view.humanoid = reply.humanoid;
              this.view.role = role;
              if (reply.snapshot !== undefined) {
                applySnapshot(this.view, reply.snapshot);
              }
              await this.refresh();
            } else if (reply.type === "rejected" || reply.type === "error") {
              noteRejection(this.view, `claim ${role}`, reply.reason);
              if (reply.type === "rejected" && reply.snapshot !== undefined) {
                applySnapshot(this.view, reply.snapshot);
              }
            }
            this.render();
          })()
        );
      },
      onStart: () => {
        void this.track(this.command("start", () => this.connection.request({ type: "start" })));
      },
      onPerform: (action) => {
        void this.track(
          this.command(action, () => this.connection.request({ type: "perform", action }))
        );
      },
      onNotify: (action) => {
        void this.track(
          this.command(action, () => this.connection.request({ type: "notify", action }))
        );
      },
      onCommunicate: (recipient, message) => {
        void this.track(
          this.command(`say to ${recipient}`, () =>
            this.connection.request({ type: "communicate", recipient_role: recipient, message })
          )
        );
      },
      onDismissRejection: () => {
        clearRejection(this.view);
        this.render();
      },
    };
  }
}
