import type {
  Conflict,
  DecisionAck,
  DecisionBody,
  DecisionRecord,
  FlowReport,
  Pass,
  QueuePage,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Server-side rejection (4xx/5xx) with the API's error code attached. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "unknown";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    public readonly reviewer: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: {
        "Content-Type": "application/json",
        "X-Reviewer": this.reviewer,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  getQueue(pass: Pass, page = 0, pageSize = 50): Promise<QueuePage> {
    return this.request<QueuePage>(
      "GET",
      `/api/queue?pass=${pass}&page=${page}&page_size=${pageSize}`,
    );
  }

  postDecision(body: DecisionBody): Promise<DecisionAck> {
    return this.request<DecisionAck>("POST", "/api/decisions", body);
  }

  getPrisma(): Promise<FlowReport> {
    return this.request<FlowReport>("GET", "/api/prisma");
  }

  async getConflicts(): Promise<Conflict[]> {
    const payload = await this.request<{ conflicts: Conflict[] }>(
      "GET",
      "/api/conflicts",
    );
    return payload.conflicts;
  }

  resolveConflict(
    docId: string,
    body: Omit<DecisionBody, "doc_id">,
  ): Promise<{ record: DecisionRecord }> {
    return this.request<{ record: DecisionRecord }>(
      "POST",
      `/api/conflicts/${encodeURIComponent(docId)}/resolve`,
      body,
    );
  }
}
