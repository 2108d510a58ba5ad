import type { Conflict } from "./types.js";

/**
 * Pending reviewer disagreements. Rows are focusable; pressing a group
 * key on one files the resolution (wired by the app).
 */
export class ConflictsView {
  readonly element: HTMLElement;
  private readonly heading: HTMLHeadingElement;
  private readonly list: HTMLOListElement;
  private conflicts: Conflict[] = [];

  constructor(root: HTMLElement) {
    this.element = document.createElement("section");
    this.element.className = "conflicts";
    this.heading = document.createElement("h2");
    this.list = document.createElement("ol");
    this.element.append(this.heading, this.list);
    root.append(this.element);
  }

  render(conflicts: Conflict[]): void {
    this.conflicts = conflicts;
    this.heading.textContent = `Conflicts (${conflicts.length})`;
    this.list.replaceChildren(
      ...conflicts.map((conflict) => {
        const li = document.createElement("li");
        li.className = "conflict";
        li.dataset.docId = conflict.doc_id;
        li.dataset.pass = conflict.pass;
        li.tabIndex = 0;
        const groups = Object.entries(conflict.groups)
          .sort()
          .map(([reviewer, group]) => `${reviewer}: ${group}`)
          .join(", ");
        li.textContent =
          `${conflict.doc_id} [${conflict.pass}] ${groups} — ` +
          "press 0-4 to resolve";
        return li;
      }),
    );
  }

  conflictAt(element: Element | null): Conflict | null {
    const row = element?.closest<HTMLElement>("li.conflict");
    if (!row) {
      return null;
    }
    return (
      this.conflicts.find(
        (c) => c.doc_id === row.dataset.docId && c.pass === row.dataset.pass,
      ) ?? null
    );
  }
}
