// DOM rendering for the trainee board.  Everything shown is read from
// the SessionView; clicks are routed to the handler set and nothing is
// mutated locally.  Rendering is a full rebuild of the dynamic regions,
// which is cheap at the scale of one team and a few dozen actions.

import type { AllowedRow, Participant, WorldObject } from "./protocol.js";
import type { SessionView } from "./view.js";
import { doneSteps, ticksLeft } from "./view.js";

export interface Handlers {
  onHello(name: string): void;
  onClaim(role: string): void;
  onStart(): void;
  onPerform(action: string): void;
  onNotify(action: string): void;
  onCommunicate(recipient: string, message: string): void;
  onDismissRejection(): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function section(title: string, id: string): HTMLElement {
  const box = el("section", { id, class: "panel" });
  box.appendChild(el("h2", {}, title));
  return box;
}

export class Board {
  private readonly openDetails = new Set<string>();

  constructor(
    private readonly root: HTMLElement,
    private readonly handlers: Handlers
  ) {}

  render(view: SessionView): void {
    this.rememberOpenDetails();
    this.root.textContent = "";
    this.root.appendChild(this.renderStatus(view));
    const banner = this.renderBanner(view);
    if (banner !== null) {
      this.root.appendChild(banner);
    }
    if (view.humanoid === null) {
      this.root.appendChild(this.renderClaim(view));
      return;
    }
    const board = el("div", { id: "board" });
    board.appendChild(this.renderMap(view));
    board.appendChild(this.renderActions(view));
    board.appendChild(this.renderCommunication(view));
    board.appendChild(this.renderPending(view));
    board.appendChild(this.renderProgress(view));
    board.appendChild(this.renderFeed(view));
    this.root.appendChild(board);
  }

  private rememberOpenDetails(): void {
    this.openDetails.clear();
    for (const node of this.root.querySelectorAll("details[data-action]")) {
      if ((node as HTMLDetailsElement).open) {
        this.openDetails.add(node.getAttribute("data-action") ?? "");
      }
    }
  }

  private renderStatus(view: SessionView): HTMLElement {
    const bar = el("header", { id: "status" });
    bar.appendChild(el("strong", {}, view.scenario || "connecting"));
    bar.appendChild(el("span", { id: "phase" }, `phase: ${view.phase}`));
    bar.appendChild(el("span", { id: "tick" }, `tick ${view.tick}`));
    bar.appendChild(el("span", { id: "link" }, `link: ${view.status}`));
    if (view.humanoid !== null) {
      bar.appendChild(el("span", { id: "me" }, `${view.humanoid} (${view.role ?? "no role"})`));
    }
    return bar;
  }

  private renderBanner(view: SessionView): HTMLElement | null {
    if (view.rejection === null) {
      return null;
    }
    const banner = el("div", { id: "banner", role: "alert" });
    banner.appendChild(
      el("span", {}, `${view.rejection.action} was rejected: ${view.rejection.reason}`)
    );
    const dismiss = el("button", { id: "dismiss" }, "dismiss");
    dismiss.addEventListener("click", () => this.handlers.onDismissRejection());
    banner.appendChild(dismiss);
    return banner;
  }

  private renderClaim(view: SessionView): HTMLElement {
    const box = section("Join the exercise", "claim");
    const nameRow = el("div", { class: "row" });
    const nameInput = el("input", {
      id: "name",
      type: "text",
      placeholder: "your name",
      value: view.name,
    }) as HTMLInputElement;
    const nameButton = el("button", { id: "introduce" }, "introduce yourself");
    nameButton.addEventListener("click", () => this.handlers.onHello(nameInput.value));
    nameRow.appendChild(nameInput);
    nameRow.appendChild(nameButton);
    box.appendChild(nameRow);

    const list = el("ul", { id: "roles" });
    for (const [role, info] of Object.entries(view.roles)) {
      const item = el("li", {});
      const button = el(
        "button",
        { "data-role": role, class: "claim" },
        info.claimed_by === null ? `claim ${role}` : `${role}: taken by ${info.claimed_by}`
      ) as HTMLButtonElement;
      button.disabled = info.claimed_by !== null;
      button.addEventListener("click", () => this.handlers.onClaim(role));
      item.appendChild(button);
      item.appendChild(el("span", { class: "grants" }, ` grants: ${info.grants.join(", ")}`));
      list.appendChild(item);
    }
    box.appendChild(list);
    return box;
  }

  private renderMap(view: SessionView): HTMLElement {
    const box = section("Scene", "map");
    const positions = [
      ...view.objects.map((o) => o.position),
      ...view.participants.map((p) => p.position),
    ];
    const xs = positions.map((p) => p[0]);
    const ys = positions.map((p) => p[1]);
    const pad = 0.6;
    const minX = Math.min(0, ...xs) - pad;
    const minY = Math.min(0, ...ys) - pad;
    const width = Math.max(1, ...xs) + pad - minX;
    const height = Math.max(1, ...ys) + pad - minY;

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `${minX} ${minY} ${width} ${height}`);
    svg.setAttribute("id", "scene");

    const holders = new Map<string, Participant>();
    for (const participant of view.participants) {
      holders.set(participant.id, participant);
    }
    for (const object of view.objects) {
      svg.appendChild(this.renderObject(object, holders));
    }
    for (const participant of view.participants) {
      svg.appendChild(this.renderParticipant(participant));
    }
    box.appendChild(svg as unknown as HTMLElement);
    return box;
  }

  private renderObject(object: WorldObject, holders: Map<string, Participant>): SVGElement {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", object.held_by === null ? "object" : "object held");
    group.setAttribute("data-object", object.id);
    let [x, y] = object.position;
    if (object.held_by !== null) {
      const holder = holders.get(object.held_by[0]);
      if (holder !== undefined) {
        [x, y] = holder.position;
      }
    }
    const dot = document.createElementNS(SVG_NS, "rect");
    dot.setAttribute("x", String(x - 0.08));
    dot.setAttribute("y", String(y - 0.08));
    dot.setAttribute("width", "0.16");
    dot.setAttribute("height", "0.16");
    group.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x + 0.12));
    label.setAttribute("y", String(y + 0.05));
    label.setAttribute("class", "object-label");
    label.textContent = object.held_by === null ? object.id : `${object.id} (held)`;
    group.appendChild(label);
    return group;
  }

  private renderParticipant(participant: Participant): SVGElement {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute(
      "class",
      participant.kind === "avatar" ? "participant avatar" : "participant virtual"
    );
    group.setAttribute("data-participant", participant.id);
    const [x, y] = participant.position;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "0.14");
    group.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x + 0.18));
    label.setAttribute("y", String(y - 0.08));
    label.textContent = `${participant.id} [${participant.roles.join(", ")}]`;
    group.appendChild(label);
    const doing = document.createElementNS(SVG_NS, "text");
    doing.setAttribute("x", String(x + 0.18));
    doing.setAttribute("y", String(y + 0.12));
    doing.setAttribute("class", "doing");
    doing.textContent =
      participant.current_action === null ? "" : `doing ${participant.current_action.action}`;
    group.appendChild(doing);
    return group;
  }

  private badgeFor(row: AllowedRow): string {
    if (row.rank === 1) {
      return row.sole_candidate ? "best candidate: you (only you)" : "best candidate: you";
    }
    if (row.rank !== null) {
      return "best candidate: other";
    }
    return "";
  }

  private renderActions(view: SessionView): HTMLElement {
    const box = section("Your actions", "actions");
    if (view.phase === "lobby") {
      const start = el("button", { id: "start" }, "begin exercise");
      start.addEventListener("click", () => this.handlers.onStart());
      box.appendChild(start);
      return box;
    }
    const rows = view.allowed.filter((row) => row.kind !== "communication");
    if (rows.length === 0) {
      box.appendChild(
        el("p", { id: "waiting" }, view.finished ? "procedure complete" : "waiting on teammates")
      );
      return box;
    }
    const list = el("ul", { id: "action-list" });
    for (const row of rows) {
      list.appendChild(this.renderActionRow(view, row));
    }
    box.appendChild(list);
    return box;
  }

  private renderActionRow(view: SessionView, row: AllowedRow): HTMLElement {
    const item = el("li", { class: "action-row" });
    const isNotify = row.kind === "notify_intent";
    const button = el("button", {
      class: "action",
      "data-action": row.action,
      "data-kind": row.kind,
      "data-feasible": String(row.feasible),
      "data-in-flight": String(row.in_flight),
    }) as HTMLButtonElement;
    button.textContent = isNotify ? `declare ready: ${row.action}` : row.action;
    button.disabled = !row.feasible || row.in_flight;
    button.addEventListener("click", () => {
      if (isNotify) {
        this.handlers.onNotify(row.action);
      } else {
        this.handlers.onPerform(row.action);
      }
    });
    item.appendChild(button);

    if (row.in_flight) {
      item.appendChild(el("span", { class: "note" }, " in progress"));
    } else if (!row.feasible) {
      item.appendChild(el("span", { class: "note" }, " hands cannot be arranged"));
    }
    if (row.urgent) {
      item.appendChild(el("span", { class: "urgent" }, " urgent"));
    }
    const mine = view.pending.find((p) => p.action === row.action);
    if (mine !== undefined) {
      item.appendChild(
        el("span", { class: "countdown" }, ` declared, lapses in ${ticksLeft(view, mine)} ticks`)
      );
    }
    const badge = this.badgeFor(row);
    if (badge !== "") {
      item.appendChild(el("span", { class: "badge" }, ` ${badge}`));
    }
    item.appendChild(this.renderDetails(view, row));
    return item;
  }

  private renderDetails(view: SessionView, row: AllowedRow): HTMLElement {
    const details = el("details", { "data-action": row.action }) as HTMLDetailsElement;
    details.open = this.openDetails.has(row.action);
    details.appendChild(el("summary", {}, "details"));
    const body = el("div", { class: "breakdown" });
    if (row.score !== null) {
      body.appendChild(el("p", {}, `score ${row.score.toFixed(2)}, rank ${row.rank}`));
    }
    const mine = (view.scores[row.action] ?? []).find((score) => score.humanoid === view.humanoid);
    if (mine !== undefined) {
      const table = el("ul", { class: "criteria" });
      for (const entry of mine.breakdown) {
        table.appendChild(
          el(
            "li",
            {},
            `${entry.criterion}: ${entry.value} (weighted ${entry.contribution.toFixed(2)})`
          )
        );
      }
      body.appendChild(table);
    }
    if (row.implicit_steps !== null && row.implicit_steps.length > 0) {
      const steps = row.implicit_steps
        .map((step) => `${step.op} ${step.object} (${step.hand})`)
        .join(", ");
      body.appendChild(el("p", {}, `will first ${steps}`));
    }
    details.appendChild(body);
    return details;
  }

  private renderCommunication(view: SessionView): HTMLElement {
    const box = section("Communication", "comms");
    const declared = view.allowed.filter((row) => row.kind === "communication");
    const list = el("ul", { id: "comm-list" });
    for (const row of declared) {
      const item = el("li", {});
      const button = el("button", {
        class: "action comm",
        "data-action": row.action,
        "data-kind": row.kind,
        "data-feasible": String(row.feasible),
        "data-in-flight": String(row.in_flight),
      });
      button.textContent = `say to ${row.recipient_role ?? "?"}: "${row.message ?? ""}"`;
      button.addEventListener("click", () => this.handlers.onPerform(row.action));
      item.appendChild(button);
      list.appendChild(item);
    }
    if (declared.length === 0) {
      list.appendChild(el("li", { class: "note" }, "no declared messages right now"));
    }
    box.appendChild(list);

    const free = el("div", { id: "free-comm", class: "row" });
    const select = el("select", { id: "recipient" }) as HTMLSelectElement;
    for (const role of Object.keys(view.roles)) {
      select.appendChild(el("option", { value: role }, role));
    }
    const input = el("input", {
      id: "message",
      type: "text",
      placeholder: "say something",
    }) as HTMLInputElement;
    const send = el("button", { id: "send" }, "send");
    send.addEventListener("click", () => {
      if (input.value !== "") {
        this.handlers.onCommunicate(select.value, input.value);
      }
    });
    free.appendChild(select);
    free.appendChild(input);
    free.appendChild(send);
    box.appendChild(free);
    return box;
  }

  private renderPending(view: SessionView): HTMLElement {
    const box = section("Collaboration notices", "pending");
    const list = el("ul", { id: "pending-list" });
    for (const row of view.pending) {
      list.appendChild(
        el(
          "li",
          { "data-collaborative": row.collaborative },
          `${row.humanoid} ready for ${row.collaborative}, lapses in ${ticksLeft(view, row)} ticks`
        )
      );
    }
    if (view.pending.length === 0) {
      list.appendChild(el("li", { class: "note" }, "none pending"));
    }
    box.appendChild(list);
    return box;
  }

  private renderProgress(view: SessionView): HTMLElement {
    const box = section("Progress", "progress");
    const done = doneSteps(view);
    box.appendChild(
      el(
        "p",
        { id: "progress-line" },
        view.finished
          ? `procedure complete (${done} of ${view.steps.length} steps)`
          : `${done} of ${view.steps.length} steps done`
      )
    );
    const strip = el("ol", { id: "step-strip" });
    for (const step of view.steps) {
      const state = step.done ? "done" : step.marked ? "marked" : "todo";
      strip.appendChild(
        el("li", { class: `step ${state}`, "data-step": step.id }, step.action ?? step.id)
      );
    }
    box.appendChild(strip);
    return box;
  }

  private renderFeed(view: SessionView): HTMLElement {
    const box = section("Feed", "feed");
    const list = el("ul", { id: "feed-list" });
    for (const item of [...view.feed].reverse()) {
      list.appendChild(el("li", {}, `t${item.tick} ${item.text}`));
    }
    box.appendChild(list);
    return box;
  }
}
