// One WebSocket to the session server.  The server answers every
// inbound message with exactly one reply frame, in order, so replies
// are matched to requests FIFO; pushed `event` frames are routed to a
// separate handler.  A dropped socket rejects nothing silently: every
// pending request resolves with a synthetic error reply and the
// connection dials again after a short delay.

import type { ClientMessage, EventRecord, ServerReply } from "./protocol.js";
import { isEventFrame, parseServerMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open", listener: () => void): void;
  addEventListener(type: "close", listener: () => void): void;
  addEventListener(type: "message", listener: (event: { data: unknown }) => void): void;
}

export type SocketFactory = () => SocketLike;

export type Status = "connecting" | "open" | "closed";

export interface ConnectionOptions {
  reconnectDelayMs?: number;
  maxReconnects?: number;
}

export class SessionConnection {
  onEvent: (event: EventRecord) => void = () => {};
  onStatus: (status: Status) => void = () => {};
  onOpen: () => void = () => {};

  private socket: SocketLike | null = null;
  private pending: Array<(reply: ServerReply) => void> = [];
  private reconnects = 0;
  private stopped = false;

  constructor(
    private readonly factory: SocketFactory,
    private readonly options: ConnectionOptions = {}
  ) {}

  connect(): void {
    this.stopped = false;
    this.dial();
  }

  stop(): void {
    this.stopped = true;
    if (this.socket !== null) {
      this.socket.close();
      this.socket = null;
    }
    this.flushPending("connection closed");
  }

  request(message: ClientMessage): Promise<ServerReply> {
    if (this.socket === null) {
      return Promise.resolve({ type: "error", reason: "not connected" });
    }
    return new Promise((resolve) => {
      this.pending.push(resolve);
      try {
        this.socket!.send(JSON.stringify(message));
      } catch {
        this.pending.pop();
        resolve({ type: "error", reason: "send failed" });
      }
    });
  }

  private dial(): void {
    this.onStatus("connecting");
    const socket = this.factory();
    this.socket = socket;
    socket.addEventListener("open", () => {
      if (this.socket !== socket) {
        return;
      }
      this.reconnects = 0;
      this.onStatus("open");
      this.onOpen();
    });
    socket.addEventListener("message", (event) => {
      if (this.socket !== socket) {
        return;
      }
      this.receive(String(event.data));
    });
    socket.addEventListener("close", () => {
      if (this.socket !== socket) {
        return;
      }
      this.socket = null;
      this.flushPending("connection lost");
      this.onStatus("closed");
      this.scheduleRedial();
    });
  }

  private receive(raw: string): void {
    const message = parseServerMessage(raw);
    if (message === null) {
      return;
    }
    if (isEventFrame(message)) {
      this.onEvent(message.event);
      return;
    }
    const resolve = this.pending.shift();
    if (resolve !== undefined) {
      resolve(message);
    }
  }

  private flushPending(reason: string): void {
    const waiting = this.pending;
    this.pending = [];
    for (const resolve of waiting) {
      resolve({ type: "error", reason });
    }
  }

  private scheduleRedial(): void {
    if (this.stopped) {
      return;
    }
    const limit = this.options.maxReconnects ?? Number.POSITIVE_INFINITY;
    if (this.reconnects >= limit) {
      return;
    }
    this.reconnects += 1;
    const delay = this.options.reconnectDelayMs ?? 1000;
    setTimeout(() => {
      if (!this.stopped && this.socket === null) {
        this.dial();
      }
    }, delay);
  }
}
