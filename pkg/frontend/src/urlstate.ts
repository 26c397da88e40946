// Search form state synchronized with the page URL. The serialization is
// canonical and matches the server's cache-key format exactly: keys in the
// order q, pool, journals, from, to, sort, page, size, oa; optional keys
// omitted; values percent-encoded. Reloading a serialized URL reproduces the
// state, so result pages are shareable.

export type PoolToken = "all" | "utd24" | "ft50";
export type SortToken = "relevance" | "date" | "citations";

export interface UiSearchState {
  q: string;
  pool: PoolToken;
  journals: string[];
  from: string;
  to: string;
  sort: SortToken;
  page: number;
  size: number;
  oa: boolean;
}

export const DEFAULT_STATE: UiSearchState = {
  q: "",
  pool: "all",
  journals: [],
  from: "",
  to: "",
  sort: "relevance",
  page: 1,
  size: 20,
  oa: false,
};

const POOLS: PoolToken[] = ["all", "utd24", "ft50"];
const SORTS: SortToken[] = ["relevance", "date", "citations"];

function intOr(value: string | null, fallback: number): number {
  const parsed = Number.parseInt(value ?? "", 10);
  return Number.isFinite(parsed) && parsed > 0 ? parsed : fallback;
}

export function parseSearchState(query: string): UiSearchState {
  const params = new URLSearchParams(query.replace(/^\?/, ""));
  const pool = (params.get("pool") ?? "all").toLowerCase();
  const sort = (params.get("sort") ?? "relevance").toLowerCase();
  return {
    q: params.get("q") ?? "",
    pool: POOLS.includes(pool as PoolToken) ? (pool as PoolToken) : "all",
    journals: (params.get("journals") ?? "").split(",").filter(Boolean),
    from: params.get("from") ?? "",
    to: params.get("to") ?? "",
    sort: SORTS.includes(sort as SortToken) ? (sort as SortToken) : "relevance",
    page: intOr(params.get("page"), 1),
    size: Math.min(100, intOr(params.get("size"), 20)),
    oa: params.get("oa") === "1",
  };
}

export function serializeSearchState(state: UiSearchState): string {
  const parts = [`q=${encodeURIComponent(state.q)}`, `pool=${state.pool}`];
  if (state.journals.length > 0) {
    parts.push(`journals=${state.journals.map(encodeURIComponent).join(",")}`);
  }
  if (state.from) parts.push(`from=${state.from}`);
  if (state.to) parts.push(`to=${state.to}`);
  parts.push(
    `sort=${state.sort}`,
    `page=${state.page}`,
    `size=${state.size}`,
    `oa=${state.oa ? "1" : "0"}`,
  );
  return parts.join("&");
}

export function statesEqual(a: UiSearchState, b: UiSearchState): boolean {
  return serializeSearchState(a) === serializeSearchState(b);
}

/** Push the state into the address bar without a reload. */
export function syncUrl(win: Window, state: UiSearchState): void {
  const url = `${win.location.pathname}?${serializeSearchState(state)}`;
  win.history.replaceState(null, "", url);
}
