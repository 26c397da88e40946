// Wire types for the service API. Shapes mirror the server's serializers;
// the test fixtures under tests/fixtures are captured from a live instance.

export interface AuthorView {
  given: string;
  family: string;
  affiliations: string[];
}

export interface AccessView {
  is_oa: boolean;
  url: string | null;
  pdf_url: string | null;
  license: string | null;
  excerpt: string | null;
  provenance: string;
}

export interface ArticleView {
  doi: string;
  title: string;
  authors: AuthorView[];
  journal: string;
  issn: string;
  date: string | null;
  abstract: string | null;
  citations: number | null;
  keywords: string[];
  oa: AccessView;
}

export interface HotspotView {
  phrase: string;
  score: number;
  category: string;
  support: number;
}

export interface AnalyticsView {
  journal_distribution: Record<string, number>;
  category_distribution: Record<string, number>;
  year_distribution: Record<string, number>;
  keyword_distribution: Record<string, number>;
  top_affiliations: [string, number][];
  method_signals: Record<string, number>;
  top_cited: [string, string, number][];
  abstract_coverage: number;
  affiliation_coverage: number;
}

export interface SearchResponse {
  items: ArticleView[];
  total: number;
  page: number;
  size: number;
  analytics: AnalyticsView;
  hotspots: HotspotView[];
  degraded_sources: string[];
  skipped_records: number;
  query_echo: string;
}

export interface JournalView {
  id: string;
  name: string;
  issns: string[];
  pools: string[];
  category: string;
  official_url: string;
  submission_url: string;
}

export interface JournalsResponse {
  journals: JournalView[];
  total: number;
}

export interface CompareResponse {
  topic_a: string;
  topic_b: string;
  years: number[];
  counts_a: number[];
  counts_b: number[];
  degraded_years: number[];
}

export interface BriefingResponse {
  items: ArticleView[];
  window_days: number;
  k: number;
}

export interface CiteResponse {
  doi: string;
  style: string;
  text: string;
}

export interface UsageSummaryView {
  from: string;
  to: string;
  top_pages: [string, number][];
  top_keywords: [string, number][];
  top_favorited: [string, number][];
  source_mix: Record<string, number>;
  daily_visits: [string, number][];
  cumulative_visits: [string, number][];
}

export interface ApiErrorBody {
  error: { code: string; message: string; detail?: Record<string, unknown> };
}

export type EventKind = "pageview" | "search" | "favorite";

export interface EventPayload {
  kind: EventKind;
  session_id: string;
  page?: string;
  keyword?: string;
  doi?: string;
  referrer?: string;
}
