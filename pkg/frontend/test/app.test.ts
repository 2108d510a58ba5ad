/**
 * Scripted review sessions against the fixture API: the keyboard triage
 * loop, retry idempotency, progress parity with /api/prisma, and the
 * two-session conflict path.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ScreeningApp } from "../src/app.js";
import { Outbox, memoryStorage } from "../src/outbox.js";
import type { FlowReport } from "../src/types.js";
import { FixtureApi, seededUuid } from "./fixtureApi.js";

function makeApp(api: FixtureApi, reviewer: string): ScreeningApp {
  const root = document.createElement("div");
  document.body.append(root);
  return new ScreeningApp({
    root,
    client: new ApiClient("http://fixture", reviewer, api.fetch),
    outbox: new Outbox(memoryStorage(), `outbox-${reviewer}`),
    uuid: seededUuid(reviewer),
    staleAfterMs: 30_000,
  });
}

function press(app: ScreeningApp, key: string, target?: Element): void {
  const event = new KeyboardEvent("keydown", { key, bubbles: true });
  (target ?? app.queue.list).dispatchEvent(event);
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("keyboard triage session", () => {
  it("triages 20 docs via keys 0-4 with zero duplicates under retries", async () => {
    const api = new FixtureApi(20);
    const app = makeApp(api, "r1");
    await app.start();

    expect(app.queue.list.querySelectorAll("li.queue-item")).toHaveLength(20);
    expect(app.queue.pendingCount()).toBe(20);

    const script = [4, 3, 2, 1, 0, 4, 4, 3, 2, 0, 1, 2, 3, 4, 0, 0, 1, 2, 3, 4];
    for (const [index, group] of script.entries()) {
      if (index === 5 || index === 12) {
        // network blips: these submissions die in flight and park
        api.failNextPosts(1);
      }
      press(app, String(group));
      await app.settle();
    }

    // two decisions are parked offline, the rest landed
    expect(app.queue.pendingCount()).toBe(0);
    expect(app.queue.parkedCount()).toBe(2);
    expect(api.decisions).toHaveLength(18);

    // reconnect: the outbox flushes with the original decision ids
    await app.flushOutbox();
    expect(api.decisions).toHaveLength(20);

    // zero duplicates: one record per document, ids unique
    const byDoc = new Set(api.decisions.map((d) => d.doc_id));
    const byId = new Set(api.decisions.map((d) => d.decision_id));
    expect(byDoc.size).toBe(20);
    expect(byId.size).toBe(20);

    // stored groups follow the script in queue order
    const stored = new Map(api.decisions.map((d) => [d.doc_id, d.group]));
    for (const [index, group] of script.entries()) {
      expect(stored.get(`d${String(index).padStart(3, "0")}`)).toBe(group);
    }

    // pass-complete state with a link to the next pass
    const complete = app.queue.list.parentElement!.querySelector(
      ".pass-complete",
    ) as HTMLElement;
    expect(complete.hidden).toBe(false);
    expect(complete.querySelector("a")?.dataset.nextPass).toBe("abstract");
  });

  it("keeps exactly one record when the same submission is retried", async () => {
    const api = new FixtureApi(3);
    const app = makeApp(api, "r1");
    await app.start();

    api.failNextPosts(1);
    press(app, "4");
    await app.settle();
    expect(api.decisions).toHaveLength(0);

    // several reconnect attempts: idempotent replay, one stored record
    await app.flushOutbox();
    await app.flushOutbox();
    expect(api.decisions).toHaveLength(1);
    expect(api.postAttempts).toBeGreaterThanOrEqual(2);
  });

  it("rolls the item back when the server rejects the decision", async () => {
    const api = new FixtureApi(2);
    const app = makeApp(api, "r1");
    await app.start();

    // another session already filed this reviewer's decision for d000
    await new ApiClient("http://fixture", "r1", api.fetch).postDecision({
      doc_id: "d000", pass: "title", group: 2, reviewer: "r1",
      decision_id: "other-session",
    });

    press(app, "3");
    await app.settle();

    const row = app.queue.row("d000")!;
    expect(row.dataset.state).toBe("pending");    // rolled back
    expect(row.hidden).toBe(false);
    expect(app.messages.textContent).toContain("rejected");
    expect(api.decisions).toHaveLength(1);        // just the other session's
  });
});

describe("progress panel", () => {
  it("mirrors GET /api/prisma exactly and refreshes after each decision", async () => {
    const api = new FixtureApi(20);
    const app = makeApp(api, "r1");
    await app.start();

    for (const group of [4, 4, 3, 0, 2]) {
      press(app, String(group));
      await app.settle();
    }
    expect(app.queue.pendingCount()).toBe(15);

    const server = (await (await api.fetch(
      "http://fixture/api/prisma",
    )).json()) as FlowReport;
    const rendered = app.progress.lastFlow()!;
    expect(rendered).toEqual(server);

    // rendered DOM carries the server's numbers verbatim
    const panel = app.progress.element;
    for (const field of ["scoping", "pruned", "eligible", "seeds"] as const) {
      const span = panel.querySelector(`[data-field="${field}"]`)!;
      expect(span.textContent).toContain(String(server[field]));
    }
    const tally4 = panel.querySelector('dd[data-pass="title"][data-group="4"]');
    expect(tally4?.textContent).toBe(String(server.tallies["title"]!["4"]));
  });

  it("flags stale data after the staleness window", async () => {
    const api = new FixtureApi(2);
    let nowValue = 1_000_000;
    const root = document.createElement("div");
    document.body.append(root);
    const app = new ScreeningApp({
      root,
      client: new ApiClient("http://fixture", "r1", api.fetch),
      outbox: new Outbox(memoryStorage()),
      uuid: seededUuid(),
      staleAfterMs: 30_000,
      now: () => nowValue,
    });
    await app.start();
    expect(app.progress.checkStaleness()).toBe(false);
    nowValue += 31_000;
    expect(app.progress.checkStaleness()).toBe(true);
    expect(app.progress.element.dataset.stale).toBe("true");
  });
});

describe("conflicts", () => {
  it("a two-session 3 vs 0 disagreement surfaces in the conflicts view", async () => {
    const api = new FixtureApi(20);
    const first = makeApp(api, "r1");
    const second = makeApp(api, "r2");
    await first.start();
    await second.start();

    press(first, "3");          // r1: d000 -> Suitable
    await first.settle();
    press(second, "0");         // r2: d000 -> Unlikely
    await second.settle();

    expect(api.conflicts()).toEqual([
      { doc_id: "d000", pass: "title", groups: { r1: 3, r2: 0 } },
    ]);
    const rows = second.conflicts.element.querySelectorAll("li.conflict");
    expect(rows).toHaveLength(1);
    expect(rows[0]!.textContent).toContain("d000");
    expect(rows[0]!.textContent).toContain("r1: 3");
    expect(rows[0]!.textContent).toContain("r2: 0");
    expect(second.progress.lastFlow()!.conflicts).toBe(1);
  });

  it("resolves a conflict from the keyboard on the conflict row", async () => {
    const api = new FixtureApi(5);
    const first = makeApp(api, "r1");
    const second = makeApp(api, "r2");
    await first.start();
    await second.start();
    press(first, "4");
    await first.settle();
    press(second, "1");
    await second.settle();
    expect(api.conflicts()).toHaveLength(1);

    const referee = makeApp(api, "r3");
    await referee.start();
    const row = referee.conflicts.element.querySelector("li.conflict")!;
    press(referee, "4", row);
    await referee.settle();

    expect(api.conflicts()).toHaveLength(0);
    const resolutions = api.decisions.filter((d) => d.resolution);
    expect(resolutions).toHaveLength(1);
    expect(resolutions[0]!.group).toBe(4);
    expect(referee.conflicts.element.querySelectorAll("li.conflict")).toHaveLength(0);
  });

  it("other reviewers' groups stay masked in the queue", async () => {
    const api = new FixtureApi(3);
    const first = makeApp(api, "r1");
    await first.start();
    press(first, "4");
    await first.settle();

    const second = makeApp(api, "r2");
    await second.start();
    const row = second.queue.row("d000")!;
    expect(row.textContent).toContain("1 other review(s), hidden");
    expect(row.textContent).not.toMatch(/group\s*4|Look-into/);
  });
});

describe("progressive field reveal", () => {
  it("title pass shows titles only; deeper passes add fields", async () => {
    const api = new FixtureApi(3);
    const titleApp = makeApp(api, "r1");
    await titleApp.start();
    const titleRow = titleApp.queue.row("d000")!;
    expect(titleRow.querySelector(".title")).not.toBeNull();
    expect(titleRow.querySelector(".meta")).toBeNull();

    const root = document.createElement("div");
    document.body.append(root);
    const abstractApp = new ScreeningApp({
      root,
      client: new ApiClient("http://fixture", "r2", api.fetch),
      outbox: new Outbox(memoryStorage(), "outbox-r2"),
      uuid: seededUuid("r2"),
      pass: "abstract",
    });
    await abstractApp.start();
    const abstractRow = abstractApp.queue.row("d000")!;
    const meta = abstractRow.querySelector(".meta")!;
    expect(meta.textContent).toContain("1990");
    expect(meta.textContent).toContain("Urban Studies");
    expect(meta.textContent).not.toContain("cited by");

    const fullRoot = document.createElement("div");
    document.body.append(fullRoot);
    const fulltextApp = new ScreeningApp({
      root: fullRoot,
      client: new ApiClient("http://fixture", "r3", api.fetch),
      outbox: new Outbox(memoryStorage(), "outbox-r3"),
      uuid: seededUuid("r3"),
      pass: "fulltext",
    });
    await fulltextApp.start();
    const fullRow = fulltextApp.queue.row("d000")!;
    expect(fullRow.querySelector(".meta")!.textContent).toContain("cited by 0");
  });
});
