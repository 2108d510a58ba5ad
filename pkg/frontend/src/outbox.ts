import { ApiError } from "./api.js";
import type { DecisionBody } from "./types.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface FlushResult {
  sent: number;
  rejected: DecisionBody[];
  remaining: number;
}

/**
 * Offline decision outbox.
 *
 * Decisions that could not reach the server are parked here (keeping
 * their original decision UUIDs, so a later delivery is idempotent) and
 * flushed in submission order. A network failure stops the flush to
 * preserve per-reviewer ordering; a server-side rejection drops the
 * entry as permanently refused.
 */
export class Outbox {
  constructor(
    private readonly storage: StorageLike,
    private readonly key = "litmap-outbox",
  ) {}

  private load(): DecisionBody[] {
    try {
      return JSON.parse(this.storage.getItem(this.key) ?? "[]") as DecisionBody[];
    } catch {
      return [];
    }
  }

  private save(entries: DecisionBody[]): void {
    if (entries.length === 0) {
      this.storage.removeItem(this.key);
    } else {
      this.storage.setItem(this.key, JSON.stringify(entries));
    }
  }

  enqueue(body: DecisionBody): void {
    const entries = this.load();
    if (!entries.some((e) => e.decision_id === body.decision_id)) {
      entries.push(body);
      this.save(entries);
    }
  }

  pending(): DecisionBody[] {
    return this.load();
  }

  get size(): number {
    return this.load().length;
  }

  async flush(
    post: (body: DecisionBody) => Promise<unknown>,
  ): Promise<FlushResult> {
    const entries = this.load();
    const rejected: DecisionBody[] = [];
    let sent = 0;
    while (entries.length > 0) {
      const head = entries[0]!;
      try {
        await post(head);
        sent += 1;
      } catch (error) {
        if (error instanceof ApiError) {
          rejected.push(head);    // permanently refused; surface, don't retry
        } else {
          break;                  // still offline: keep order, stop here
        }
      }
      entries.shift();
      this.save(entries);
    }
    return { sent, rejected, remaining: entries.length };
  }
}

/** In-memory StorageLike for tests and non-browser hosts. */
export function memoryStorage(): StorageLike {
  const store = new Map<string, string>();
  return {
    getItem: (key) => store.get(key) ?? null,
    setItem: (key, value) => void store.set(key, value),
    removeItem: (key) => void store.delete(key),
  };
}
