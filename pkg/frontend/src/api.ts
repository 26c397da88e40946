// Single typed client layer for every API call the UI makes. Tests inject a
// stub fetch; pages share one instance. In-flight searches are cancelled when
// a newer one starts (latest-wins rendering).

import type {
  ApiErrorBody,
  BriefingResponse,
  CiteResponse,
  CompareResponse,
  EventPayload,
  JournalsResponse,
  SearchResponse,
  UsageSummaryView,
} from "./types.js";
import { serializeSearchState, type UiSearchState } from "./urlstate.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private searchController: AbortController | null = null;

  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + url, init);
    const body = (await response.json()) as T | ApiErrorBody;
    if (!response.ok) {
      const err = body as ApiErrorBody;
      throw new ApiError(
        err.error?.code ?? "unknown",
        err.error?.message ?? `request failed (${response.status})`,
        response.status,
      );
    }
    return body as T;
  }

  /** Latest-wins: starting a new search aborts the previous in-flight one. */
  search(state: UiSearchState): Promise<SearchResponse> {
    this.searchController?.abort();
    this.searchController = new AbortController();
    const qs = serializeSearchState(state);
    return this.request<SearchResponse>(`/api/search?${qs}`, {
      signal: this.searchController.signal,
    });
  }

  journals(pool = "all", name = ""): Promise<JournalsResponse> {
    const suffix = name ? `&name=${encodeURIComponent(name)}` : "";
    return this.request(`/api/journals?pool=${pool}${suffix}`);
  }

  compare(
    a: string,
    b: string,
    pool: string,
    from: number,
    to: number,
  ): Promise<CompareResponse> {
    const qs =
      `a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}` +
      `&pool=${pool}&from=${from}&to=${to}`;
    return this.request(`/api/compare?${qs}`);
  }

  briefing(pool: string, days: number, k: number): Promise<BriefingResponse> {
    return this.request(`/api/briefing?pool=${pool}&days=${days}&k=${k}`);
  }

  cite(doi: string, style: string): Promise<CiteResponse> {
    return this.request(
      `/api/cite?doi=${encodeURIComponent(doi)}&style=${style}`,
    );
  }

  usageSummary(): Promise<UsageSummaryView> {
    return this.request(`/api/analytics/summary`);
  }

  exportUrl(kind: "csv" | "report", state: UiSearchState): string {
    return `${this.base}/api/export/${kind}?${serializeSearchState(state)}`;
  }

  /** Fire-and-forget event emission; failures never surface to the user. */
  emitEvent(payload: EventPayload): void {
    void this.fetchFn(`${this.base}/api/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    }).catch(() => undefined);
  }
}

const SESSION_KEY = "litpool:session";

export function sessionId(storage: Pick<Storage, "getItem" | "setItem">): string {
  let existing = storage.getItem(SESSION_KEY);
  if (!existing) {
    existing = Math.random().toString(36).slice(2) + Date.now().toString(36);
    storage.setItem(SESSION_KEY, existing);
  }
  return existing;
}
