import { ApiClient } from "./api.js";
import { ScreeningApp } from "./app.js";
import { Outbox } from "./outbox.js";
import type { Pass } from "./types.js";

/**
 * Browser bootstrap. The mount node supplies the connection settings:
 *
 *   <div id="screening"
 *        data-api="http://127.0.0.1:8571"
 *        data-reviewer="reviewer-a"
 *        data-pass="title"></div>
 */
export function mount(node: HTMLElement): ScreeningApp {
  const api = node.dataset.api ?? "";
  const reviewer = node.dataset.reviewer ?? "anonymous";
  const pass = (node.dataset.pass ?? "title") as Pass;
  const app = new ScreeningApp({
    root: node,
    client: new ApiClient(api, reviewer),
    outbox: new Outbox(window.localStorage, `litmap-outbox-${reviewer}`),
    pass,
  });
  void app.start().then(() => app.flushOutbox());
  return app;
}

if (typeof document !== "undefined") {
  const node = document.getElementById("screening");
  if (node) {
    mount(node);
  }
}
