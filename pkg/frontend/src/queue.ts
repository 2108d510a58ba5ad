import type { Pass, QueueItem, QueuePage } from "./types.js";

export type ItemState = "pending" | "done" | "parked";

const NEXT_PASS: Record<Pass, Pass | null> = {
  title: "abstract",
  abstract: "fulltext",
  fulltext: null,
};

/**
 * The review queue: rows render verbatim from the server in server
 * order; decided rows collapse; focus always sits on one pending row so
 * the whole triage loop works from the keyboard.
 */
export class QueueView {
  readonly list: HTMLOListElement;
  private readonly status: HTMLParagraphElement;
  private readonly complete: HTMLParagraphElement;
  private items: QueueItem[] = [];
  private states = new Map<string, ItemState>();
  private focusedId: string | null = null;
  private pass: Pass = "title";

  constructor(root: HTMLElement) {
    const main = document.createElement("main");
    this.status = document.createElement("p");
    this.status.className = "queue-status";
    this.list = document.createElement("ol");
    this.list.className = "queue";
    this.complete = document.createElement("p");
    this.complete.className = "pass-complete";
    this.complete.hidden = true;
    main.append(this.status, this.list, this.complete);
    root.append(main);
  }

  render(page: QueuePage): void {
    this.pass = page.pass;
    this.items = page.items;
    this.states = new Map(page.items.map((item) => [item.doc_id, "pending"]));
    this.list.replaceChildren(
      ...page.items.map((item) => this.renderItem(item)),
    );
    this.updateStatus();
    this.focusFirstPending();
  }

  private renderItem(item: QueueItem): HTMLLIElement {
    const li = document.createElement("li");
    li.className = "queue-item";
    li.dataset.docId = item.doc_id;
    li.dataset.state = "pending";
    li.tabIndex = -1;
    const title = document.createElement("span");
    title.className = "title";
    title.textContent = item.title;
    li.append(title);
    // progressive reveal: the title pass shows titles only, the abstract
    // pass adds year and venue, the full-text pass adds citation counts
    if (item.pass !== "title") {
      const meta = document.createElement("span");
      meta.className = "meta";
      const year = item.year ?? "n.d.";
      const venue = item.venue ?? "";
      meta.textContent =
        item.pass === "abstract"
          ? `${year} · ${venue}`
          : `${year} · ${venue} · cited by ${item.cited_by}`;
      li.append(meta);
    }
    if (item.others_decided > 0) {
      const masked = document.createElement("span");
      masked.className = "others";
      // the groups themselves stay masked until this reviewer decides
      masked.textContent = `${item.others_decided} other review(s), hidden`;
      li.append(masked);
    }
    return li;
  }

  row(docId: string): HTMLLIElement | null {
    return this.list.querySelector(`li[data-doc-id="${docId}"]`);
  }

  focused(): QueueItem | null {
    return this.items.find((i) => i.doc_id === this.focusedId) ?? null;
  }

  private setFocus(docId: string | null): void {
    if (this.focusedId) {
      this.row(this.focusedId)?.classList.remove("focused");
    }
    this.focusedId = docId;
    if (docId) {
      const row = this.row(docId);
      row?.classList.add("focused");
      row?.focus();
    }
  }

  focusFirstPending(): void {
    const next = this.items.find((i) => this.states.get(i.doc_id) === "pending");
    this.setFocus(next?.doc_id ?? null);
    if (!next) {
      this.showComplete();
    }
  }

  /** Move focus among still-pending rows; delta is +1 / -1. */
  moveFocus(delta: number): void {
    const pending = this.items.filter(
      (i) => this.states.get(i.doc_id) === "pending",
    );
    if (pending.length === 0) {
      return;
    }
    const at = pending.findIndex((i) => i.doc_id === this.focusedId);
    const next = pending[Math.min(pending.length - 1, Math.max(0, at + delta))];
    this.setFocus(next!.doc_id);
  }

  advanceFrom(docId: string): void {
    const pending = this.items.filter(
      (i) => i.doc_id !== docId && this.states.get(i.doc_id) === "pending",
    );
    const after = this.items
      .slice(this.items.findIndex((i) => i.doc_id === docId) + 1)
      .find((i) => this.states.get(i.doc_id) === "pending");
    this.setFocus(after?.doc_id ?? pending[0]?.doc_id ?? null);
    if (pending.length === 0) {
      this.showComplete();
    }
  }

  mark(docId: string, state: ItemState): void {
    this.states.set(docId, state);
    const row = this.row(docId);
    if (row) {
      row.dataset.state = state;
      row.hidden = state !== "pending";
    }
    this.updateStatus();
  }

  /** Server rejected the optimistic submit: restore the row and refocus. */
  rollback(docId: string): void {
    this.mark(docId, "pending");
    this.complete.hidden = true;
    this.setFocus(docId);
  }

  pendingCount(): number {
    return [...this.states.values()].filter((s) => s === "pending").length;
  }

  parkedCount(): number {
    return [...this.states.values()].filter((s) => s === "parked").length;
  }

  private updateStatus(): void {
    const parked = this.parkedCount();
    const suffix = parked > 0 ? ` (${parked} parked offline)` : "";
    this.status.textContent = `${this.pendingCount()} pending${suffix}`;
  }

  private showComplete(): void {
    this.complete.replaceChildren();
    const next = NEXT_PASS[this.pass];
    this.complete.textContent = next
      ? `Pass complete. Continue with the ${next} pass: `
      : "Pass complete. All passes finished.";
    if (next) {
      const link = document.createElement("a");
      link.href = `?pass=${next}`;
      link.dataset.nextPass = next;
      link.textContent = `${next} queue`;
      this.complete.append(link);
    }
    this.complete.hidden = false;
  }
}
