// Thin typed client for the session service. The fetch implementation is
// injectable so tests can intercept every request and response.

import type {
  BidAssignment,
  DecisionResponse,
  Party,
  SessionStatePayload,
  StreamEvent,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown>; text(): Promise<string> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorType: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(status: number, body: unknown): Promise<never> {
  const err = (body as { error?: { type?: string; message?: string }; detail?: string }) ?? {};
  throw new ApiError(
    status,
    err.error?.type ?? "HttpError",
    err.error?.message ?? err.detail ?? `request failed with ${status}`,
  );
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async request<T>(path: string, init?: Parameters<FetchLike>[1]): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok) await parseError(response.status, body);
    return body as T;
  }

  createSession(config: unknown): Promise<{ id: string; state: SessionStatePayload }> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  getSession(id: string, view?: "transformed" | "raw"): Promise<SessionStatePayload> {
    const query = view ? `?view=${view}` : "";
    return this.request(`/sessions/${id}${query}`);
  }

  postAction(
    id: string,
    party: Party,
    action: { kind: "offer"; bid: BidAssignment } | { kind: "accept" } | { kind: "end" },
  ): Promise<{ state: SessionStatePayload }> {
    return this.request(`/sessions/${id}/actions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ party, action }),
    });
  }

  postDecision(
    proposalId: string,
    decision: "approve" | "reject",
    rationale: string,
    payload?: Record<string, unknown>,
  ): Promise<DecisionResponse> {
    return this.request(`/proposals/${proposalId}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ decision, rationale, payload }),
    });
  }

}

// Incremental parser for a text/event-stream body. Feed it chunks; it yields
// complete events. Works with any transport (EventSource, fetch streaming,
// or a test harness pushing strings).
export class SseParser {
  private buffer = "";

  push(chunk: string): StreamEvent[] {
    this.buffer += chunk;
    const events: StreamEvent[] = [];
    let split: number;
    while ((split = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, split);
      this.buffer = this.buffer.slice(split + 2);
      let event = "message";
      const dataLines: string[] = [];
      for (const line of block.split("\n")) {
        if (line.startsWith("event: ")) event = line.slice(7);
        else if (line.startsWith("data: ")) dataLines.push(line.slice(6));
      }
      if (dataLines.length > 0) {
        events.push({ event, data: JSON.parse(dataLines.join("\n")) });
      }
    }
    return events;
  }
}
