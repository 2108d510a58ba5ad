import { ApiClient, ApiError } from "./api.js";
import { ConflictsView } from "./conflicts.js";
import { Outbox } from "./outbox.js";
import { ProgressPanel } from "./progress.js";
import { QueueView } from "./queue.js";
import type { DecisionBody, Pass, QueueItem } from "./types.js";

export interface AppOptions {
  root: HTMLElement;
  client: ApiClient;
  outbox: Outbox;
  pass?: Pass;
  pageSize?: number;
  staleAfterMs?: number;
  now?: () => number;
  uuid?: () => string;
}

const GROUP_KEYS = new Set(["0", "1", "2", "3", "4"]);

/**
 * The screening client: one queue, one progress panel, one conflicts
 * list. All state lives on the server; the UI only POSTs decisions and
 * re-reads. Keys 0-4 decide the focused row (optimistically advancing,
 * rolling back on rejection), arrows or j/k move focus, and decisions
 * that fail to reach the server park in the outbox until reconnect.
 */
export class ScreeningApp {
  readonly queue: QueueView;
  readonly progress: ProgressPanel;
  readonly conflicts: ConflictsView;
  readonly messages: HTMLElement;

  private readonly client: ApiClient;
  private readonly outbox: Outbox;
  private readonly pass: Pass;
  private readonly pageSize: number;
  private readonly uuid: () => string;
  private ops: Promise<void> = Promise.resolve();

  constructor(options: AppOptions) {
    this.client = options.client;
    this.outbox = options.outbox;
    this.pass = options.pass ?? "title";
    this.pageSize = options.pageSize ?? 50;
    this.uuid = options.uuid ?? (() => crypto.randomUUID());

    const root = options.root;
    root.classList.add("litmap-app");
    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = `Screening — ${this.pass} pass`;
    header.append(title);
    root.append(header);
    this.progress = new ProgressPanel(
      header, options.staleAfterMs, options.now,
    );
    this.queue = new QueueView(root);
    this.conflicts = new ConflictsView(root);
    this.messages = document.createElement("p");
    this.messages.className = "message";
    this.messages.setAttribute("role", "status");
    root.append(this.messages);

    root.addEventListener("keydown", (event) => this.handleKey(event));
    if (typeof window !== "undefined") {
      window.addEventListener("online", () => void this.flushOutbox());
    }
  }

  /** Serialized user actions; tests await settle() after dispatching keys. */
  settle(): Promise<void> {
    return this.ops;
  }

  private chain(action: () => Promise<void>): void {
    this.ops = this.ops.then(action).catch((error) => {
      this.say(`unexpected error: ${String(error)}`);
    });
  }

  async start(): Promise<void> {
    const page = await this.client.getQueue(this.pass, 0, this.pageSize);
    this.queue.render(page);
    await this.refreshPanels();
  }

  private handleKey(event: KeyboardEvent): void {
    const key = event.key;
    if (GROUP_KEYS.has(key)) {
      const group = Number(key);
      const conflict = this.conflicts.conflictAt(
        event.target instanceof Element ? event.target : null,
      );
      event.preventDefault();
      if (conflict) {
        this.chain(() => this.resolveConflict(conflict.doc_id, conflict.pass, group));
      } else {
        this.chain(() => this.decideFocused(group));
      }
      return;
    }
    if (key === "ArrowDown" || key === "j") {
      event.preventDefault();
      this.queue.moveFocus(1);
    } else if (key === "ArrowUp" || key === "k") {
      event.preventDefault();
      this.queue.moveFocus(-1);
    }
  }

  private say(text: string): void {
    this.messages.textContent = text;
  }

  async decideFocused(group: number): Promise<void> {
    const item = this.queue.focused();
    if (!item) {
      return;
    }
    await this.submitDecision(item, group);
  }

  private decisionBody(item: QueueItem, group: number): DecisionBody {
    return {
      doc_id: item.doc_id,
      pass: this.pass,
      group,
      reviewer: this.client.reviewer,
      decision_id: this.uuid(),
    };
  }

  async submitDecision(item: QueueItem, group: number): Promise<void> {
    const body = this.decisionBody(item, group);
    // optimistic: the row leaves the queue before the server confirms
    this.queue.mark(item.doc_id, "done");
    this.queue.advanceFrom(item.doc_id);
    try {
      const ack = await this.client.postDecision(body);
      this.say(
        ack.conflict
          ? `${item.doc_id}: stored group ${group}; conflicts with another review`
          : `${item.doc_id}: stored group ${group}`,
      );
    } catch (error) {
      if (error instanceof ApiError) {
        // server refused: roll the row back and surface the reason
        this.queue.rollback(item.doc_id);
        this.say(`${item.doc_id}: rejected (${error.message})`);
        return;
      }
      // offline: park with the same decision id for an idempotent resend
      this.outbox.enqueue(body);
      this.queue.mark(item.doc_id, "parked");
      this.say(`${item.doc_id}: offline, parked for retry (${this.outbox.size} queued)`);
    }
    await this.refreshPanels();
  }

  async flushOutbox(): Promise<void> {
    const result = await this.outbox.flush((body) =>
      this.client.postDecision(body),
    );
    for (const refused of result.rejected) {
      this.queue.rollback(refused.doc_id);
      this.say(`${refused.doc_id}: rejected on retry`);
    }
    if (result.sent > 0) {
      this.say(`outbox: delivered ${result.sent}, ${result.remaining} left`);
      await this.refreshPanels();
    }
  }

  async resolveConflict(docId: string, pass: Pass, group: number): Promise<void> {
    try {
      await this.client.resolveConflict(docId, {
        pass,
        group,
        reviewer: this.client.reviewer,
        decision_id: this.uuid(),
      });
      this.say(`${docId}: conflict resolved to group ${group}`);
    } catch (error) {
      this.say(`${docId}: resolution failed (${String(error)})`);
    }
    await this.refreshPanels();
  }

  /** Progress and conflicts re-read after every decision. */
  async refreshPanels(): Promise<void> {
    this.progress.render(await this.client.getPrisma());
    this.conflicts.render(await this.client.getConflicts());
  }
}
