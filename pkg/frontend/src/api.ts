/**
 * Typed client for the session service. The UI never computes objective
 * values or acquisitions; everything numeric comes from these endpoints.
 */

export interface ObservationDto {
  t: number;
  s: number;
  source: "init" | "human" | "ai";
  x: number[];
  y: number;
}

export interface BestDto {
  x: number[];
  y: number;
  t: number;
}

export interface SessionDto {
  id: string;
  phase: "awaiting_human" | "awaiting_advance" | "finished";
  benchmark: string;
  mode: string;
  direction: "min" | "max";
  bounds: [number, number][];
  dim: number;
  num_init: number;
  batch: number;
  budget_batches: number;
  has_pending_suggestion: boolean;
  observations: ObservationDto[];
  best: BestDto | null;
  created: string;
  updated: string;
  optimum_value?: number;
  optimum_x?: number[];
}

export interface BatchRecordDto {
  s: number;
  x_human: number[] | null;
  y_human: number | null;
  x_ai: number[] | null;
  y_ai: number | null;
  gamma_after: number;
  B_after: number;
  beta_used: number | null;
}

export interface AdvanceResponse {
  record: BatchRecordDto;
  phase: SessionDto["phase"];
}

export interface CreateSessionRequest {
  id: string;
  benchmark: string;
  mode?: string;
  evaluations?: number;
  num_init?: number;
  delta?: number;
  zeta?: number;
  seed?: number;
  sigma?: number;
  live_human?: boolean;
  expert_policy?: string;
  optimum_public?: boolean;
}

/** Server rejection, carrying the service's own message verbatim. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
        else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(req: CreateSessionRequest): Promise<SessionDto> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  getSession(id: string): Promise<SessionDto> {
    return this.request(`/sessions/${encodeURIComponent(id)}`);
  }

  postSuggestion(id: string, x: number[]): Promise<SessionDto> {
    return this.request(`/sessions/${encodeURIComponent(id)}/suggestion`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ x }),
    });
  }

  advance(id: string): Promise<AdvanceResponse> {
    return this.request(`/sessions/${encodeURIComponent(id)}/advance`, {
      method: "POST",
    });
  }

  async exportCsv(id: string): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${encodeURIComponent(id)}/export.csv`,
    );
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }
}
