// HTML renderers. Pure string builders so the whole layer is testable
// without a DOM; page modules assign the output to innerHTML and wire
// event listeners afterwards.

import { barChart, escapeXml, lineChart, noData } from "./charts.js";
import type {
  AnalyticsView,
  ArticleView,
  HotspotView,
  JournalView,
  SearchResponse,
} from "./types.js";

export const esc = escapeXml;

export const CITATION_STYLES = ["bibtex", "apa", "mla", "chicago", "plain"];

function authorsLine(article: ArticleView): string {
  const names = article.authors.map((a) => `${a.given} ${a.family}`.trim());
  if (names.length === 0) return "";
  if (names.length > 4) return `${names.slice(0, 4).join(", ")} et al.`;
  return names.join(", ");
}

export function renderResultCard(article: ArticleView, favorited: boolean): string {
  const oaBadge = article.oa.is_oa
    ? `<a class="oa-badge" href="${esc(article.oa.pdf_url ?? article.oa.url ?? "#")}"
         target="_blank" rel="noopener">open access</a>`
    : "";
  const cites =
    article.citations !== null
      ? `<span class="citations">${article.citations} citations</span>`
      : "";
  const star = favorited ? "★" : "☆";
  return `
  <article class="result-card" data-doi="${esc(article.doi)}">
    <h3 class="card-title">
      <a href="https://doi.org/${esc(article.doi)}" target="_blank" rel="noopener">
        ${esc(article.title)}</a>
    </h3>
    <p class="card-meta">
      <span class="journal">${esc(article.journal)}</span>
      <span class="date">${esc(article.date ?? "n.d.")}</span>
      ${cites} ${oaBadge}
    </p>
    <p class="card-authors">${esc(authorsLine(article))}</p>
    ${article.abstract ? `<p class="card-abstract">${esc(clip(article.abstract, 280))}</p>` : ""}
    <p class="card-actions">
      <button class="favorite-btn" data-doi="${esc(article.doi)}"
        data-title="${esc(article.title)}" aria-pressed="${favorited}">${star} favorite</button>
      <button class="cite-btn" data-doi="${esc(article.doi)}">cite</button>
    </p>
  </article>`;
}

export function renderResultCards(
  items: ArticleView[],
  isFavorite: (doi: string) => boolean,
): string {
  if (items.length === 0) return `<p class="empty">No matching articles.</p>`;
  return items.map((a) => renderResultCard(a, isFavorite(a.doi))).join("\n");
}

export function renderHotspots(hotspots: HotspotView[]): string {
  if (hotspots.length === 0) return noData("hotspots");
  const rows = hotspots
    .map(
      (h) =>
        `<li class="hotspot" data-category="${esc(h.category)}">` +
        `<span class="phrase">${esc(h.phrase)}</span>` +
        `<span class="hotspot-meta">${esc(categoryLabel(h.category))} · ` +
        `score ${h.score} · ${h.support} articles</span></li>`,
    )
    .join("");
  return `<ol class="hotspot-list">${rows}</ol>`;
}

const CATEGORY_LABELS: Record<string, string> = {
  AI_ALGORITHMS: "AI / Algorithms",
  CONSUMER_MARKET: "Consumer / Market",
  OPERATIONS_SUPPLY_CHAIN: "Operations / Supply Chain",
  FINANCE_ACCOUNTING: "Finance / Accounting",
  STRATEGY_ORGANIZATION: "Strategy / Organization",
  OTHER: "Other",
};

export function categoryLabel(category: string): string {
  return CATEGORY_LABELS[category] ?? category;
}

function entries(map: Record<string, number>): [string, number][] {
  return Object.entries(map);
}

export function renderSearchAnalytics(analytics: AnalyticsView): string {
  const years = entries(analytics.year_distribution).sort((x, y) =>
    x[0].localeCompare(y[0]),
  );
  const keywords = entries(analytics.keyword_distribution)
    .sort((x, y) => y[1] - x[1] || x[0].localeCompare(y[0]))
    .slice(0, 12);
  const methods = entries(analytics.method_signals).map(
    ([k, v]): [string, number] => [categoryMethod(k), v],
  );
  return `
  <div class="chart-grid">
    <div class="chart-box" id="chart-journals">
      ${barChart(entries(analytics.journal_distribution), "Journal distribution")}
    </div>
    <div class="chart-box" id="chart-years">${barChart(years, "Year distribution")}</div>
    <div class="chart-box" id="chart-keywords">${barChart(keywords, "Keyword distribution")}</div>
    <div class="chart-box" id="chart-methods">${barChart(methods, "Method signals")}</div>
    <div class="chart-box" id="chart-affiliations">
      ${barChart(analytics.top_affiliations, "Top affiliations")}
    </div>
  </div>
  <p class="coverage">
    abstracts ${(analytics.abstract_coverage * 100).toFixed(0)}% ·
    affiliations ${(analytics.affiliation_coverage * 100).toFixed(0)}%
  </p>`;
}

function categoryMethod(name: string): string {
  return name.toLowerCase().replace(/_/g, " ");
}

export function renderSearchSummary(response: SearchResponse): string {
  const degraded =
    response.degraded_sources.length > 0
      ? `<span class="degraded" title="Some sources were unavailable">` +
        `${response.degraded_sources.length} source(s) degraded</span>`
      : "";
  return (
    `<span class="total" id="result-total" data-total="${response.total}">` +
    `${response.total} results</span> ` +
    `<span class="page-info">page ${response.page}</span> ${degraded}`
  );
}

export function renderErrorBanner(message: string): string {
  return `
  <div class="error-banner" role="alert">
    <span>${esc(message)}</span>
    <button class="retry-btn">retry</button>
  </div>`;
}

export function renderJournalsTable(journals: JournalView[]): string {
  if (journals.length === 0) return `<p class="empty">No journals match.</p>`;
  const rows = journals
    .map(
      (j) => `
    <tr class="journal-row">
      <td><a href="${esc(j.official_url)}" target="_blank" rel="noopener">${esc(j.name)}</a></td>
      <td>${j.pools.map((p) => `<span class="pool-tag pool-${esc(p)}">${esc(p)}</span>`).join(" ")}</td>
      <td>${esc(j.category)}</td>
      <td>${j.issns.map(esc).join(", ")}</td>
      <td>${j.submission_url ? `<a href="${esc(j.submission_url)}" target="_blank" rel="noopener">submit</a>` : ""}</td>
    </tr>`,
    )
    .join("");
  return `
  <table class="journals-table">
    <thead><tr><th>Journal</th><th>Pools</th><th>Category</th><th>ISSNs</th><th></th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderCitationModal(doi: string): string {
  const tabs = CITATION_STYLES.map(
    (style, i) =>
      `<button class="cite-tab${i === 0 ? " active" : ""}" data-style="${style}">` +
      `${style}</button>`,
  ).join("");
  return `
  <div class="modal-backdrop">
    <div class="modal" role="dialog" aria-label="Cite ${esc(doi)}">
      <div class="modal-head">
        <div class="cite-tabs">${tabs}</div>
        <button class="modal-close" aria-label="close">×</button>
      </div>
      <pre class="cite-text" id="cite-text">loading…</pre>
      <button class="copy-btn">copy to clipboard</button>
    </div>
  </div>`;
}

export function renderUsageCharts(summary: {
  cumulative_visits: [string, number][];
  top_pages: [string, number][];
  top_keywords: [string, number][];
  source_mix: Record<string, number>;
}): string {
  return `
  <div class="chart-grid">
    <div class="chart-box" id="chart-visits">
      ${lineChart(summary.cumulative_visits, "Cumulative visits")}
    </div>
    <div class="chart-box" id="chart-pages">${barChart(summary.top_pages, "Top pages")}</div>
    <div class="chart-box" id="chart-terms">${barChart(summary.top_keywords, "Top search terms")}</div>
    <div class="chart-box" id="chart-sources">
      ${barChart(Object.entries(summary.source_mix), "Traffic sources")}
    </div>
  </div>`;
}

function clip(text: string, max: number): string {
  return text.length > max ? `${text.slice(0, max - 1)}…` : text;
}
