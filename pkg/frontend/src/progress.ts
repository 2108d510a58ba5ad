import type { FlowReport } from "./types.js";
import { GROUP_LABELS } from "./types.js";

const FIELDS: (keyof FlowReport & string)[] = [
  "scoping", "pruned", "eligible", "notable_added", "seeds",
  "citation_corpus", "conflicts",
];

/**
 * Live flow numbers, mirrored verbatim from GET /api/prisma — never
 * computed client-side. Data older than the staleness window gets a
 * visible indicator instead of silently lying.
 */
export class ProgressPanel {
  readonly element: HTMLElement;
  private flow: FlowReport | null = null;
  private renderedAt = 0;

  constructor(
    root: HTMLElement,
    private readonly staleAfterMs = 30_000,
    private readonly now: () => number = () => Date.now(),
  ) {
    this.element = document.createElement("section");
    this.element.className = "progress";
    this.element.dataset.stale = "false";
    root.append(this.element);
  }

  render(flow: FlowReport): void {
    this.flow = flow;
    this.renderedAt = this.now();
    this.element.dataset.stale = "false";
    const rows: HTMLElement[] = [];
    for (const field of FIELDS) {
      const span = document.createElement("span");
      span.dataset.field = field;
      span.textContent = `${field.replaceAll("_", " ")}: ${flow[field]}`;
      rows.push(span);
    }
    const tallies = document.createElement("dl");
    tallies.className = "tallies";
    for (const [pass, groups] of Object.entries(flow.tallies).sort()) {
      for (const group of Object.keys(groups).sort().reverse()) {
        const dt = document.createElement("dt");
        dt.textContent = `${pass} ${group} ${GROUP_LABELS[Number(group)] ?? ""}`;
        const dd = document.createElement("dd");
        dd.dataset.pass = pass;
        dd.dataset.group = group;
        dd.textContent = String(groups[group]);
        tallies.append(dt, dd);
      }
    }
    const staleBadge = document.createElement("span");
    staleBadge.className = "stale-indicator";
    staleBadge.textContent = "data stale";
    this.element.replaceChildren(...rows, tallies, staleBadge);
  }

  lastFlow(): FlowReport | null {
    return this.flow;
  }

  /** Returns true (and flags the panel) when the data got old. */
  checkStaleness(): boolean {
    const stale =
      this.flow !== null && this.now() - this.renderedAt > this.staleAfterMs;
    this.element.dataset.stale = String(stale);
    return stale;
  }
}
