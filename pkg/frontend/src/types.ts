export type Pass = "title" | "abstract" | "fulltext";

/** One pending row as served by GET /api/queue. Fields render verbatim. */
export interface QueueItem {
  doc_id: string;
  title: string;
  year: number | null;
  venue: string | null;
  cited_by: number;
  pass: Pass;
  /** colleagues' decisions stay masked; only the count is exposed */
  others_decided: number;
  my_decision: null;
}

export interface QueuePage {
  pass: Pass;
  page: number;
  page_size: number;
  total_pending: number;
  items: QueueItem[];
}

/** Mirror of GET /api/prisma. Never recomputed client-side. */
export interface FlowReport {
  scoping: number;
  pruned: number;
  eligible: number;
  notable_added: number;
  seeds: number;
  citation_corpus: number;
  tallies: Record<string, Record<string, number>>;
  conflicts: number;
}

export interface DecisionBody {
  doc_id: string;
  pass: Pass;
  group: number;
  reviewer: string;
  note?: string;
  /** client-generated UUID; retries with the same id are idempotent */
  decision_id: string;
}

export interface DecisionRecord {
  decision_id: string;
  doc_id: string;
  pass: Pass;
  group: number;
  reviewer: string;
  decided_at: string;
  note: string | null;
  resolution: boolean;
}

export interface DecisionAck {
  record: DecisionRecord;
  conflict: boolean;
}

export interface Conflict {
  doc_id: string;
  pass: Pass;
  groups: Record<string, number>;
}

export const GROUP_LABELS: Record<number, string> = {
  0: "Unlikely",
  1: "Marginal",
  2: "Check",
  3: "Suitable",
  4: "Look-into",
};
