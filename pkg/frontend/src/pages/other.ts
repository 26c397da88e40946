// Controllers for the smaller pages: home, journals, favorites, compare,
// briefing, analytics. Each one fetches through the shared API client and
// renders with the pure HTML builders.

import { ApiClient, ApiError } from "../api.js";
import { FavoritesStore } from "../favorites.js";
import { comparisonChart } from "../charts.js";
import {
  renderErrorBanner,
  renderJournalsTable,
  renderResultCards,
  renderUsageCharts,
} from "../render.js";

function target(doc: Document, id: string): HTMLElement {
  const el = doc.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function showError(el: HTMLElement, err: unknown): void {
  const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  el.innerHTML = renderErrorBanner(message);
}

export function initHomePage(win: Window, api: ApiClient): void {
  const stats = target(win.document, "home-stats");
  Promise.all([api.journals("utd24"), api.journals("ft50"), api.usageSummary()])
    .then(([utd, ft, usage]) => {
      const visits = usage.cumulative_visits.at(-1)?.[1] ?? 0;
      stats.innerHTML = `
        <div class="stat"><strong>${utd.total}</strong> UTD-24 journals</div>
        <div class="stat"><strong>${ft.total}</strong> FT 50 journals</div>
        <div class="stat"><strong>${visits}</strong> visits (30 days)</div>`;
    })
    .catch(() => {
      stats.innerHTML = `<div class="stat muted">stats unavailable</div>`;
    });
}

export function initJournalsPage(win: Window, api: ApiClient): void {
  const doc = win.document;
  const table = target(doc, "journals-table");
  const pool = doc.getElementById("pool-filter") as HTMLSelectElement | null;
  const name = doc.getElementById("name-filter") as HTMLInputElement | null;

  const load = () => {
    api
      .journals(pool?.value ?? "all", name?.value ?? "")
      .then((body) => {
        table.innerHTML =
          `<p class="journal-count">${body.total} journals</p>` +
          renderJournalsTable(body.journals);
      })
      .catch((err: unknown) => showError(table, err));
  };
  pool?.addEventListener("change", load);
  name?.addEventListener("input", load);
  load();
}

export function initFavoritesPage(win: Window, favorites: FavoritesStore): void {
  const host = target(win.document, "favorites-list");
  const render = () => {
    const entries = favorites.list();
    if (entries.length === 0) {
      host.innerHTML = `<p class="empty">No favorites yet. Star articles from the search page.</p>`;
      return;
    }
    host.innerHTML = entries
      .map(
        (e) => `
      <article class="result-card favorite-row" data-doi="${e.doi}">
        <a href="https://doi.org/${e.doi}" target="_blank" rel="noopener">${e.title}</a>
        <span class="saved-at">${e.saved_at.slice(0, 10)}</span>
        <button class="favorite-btn" data-doi="${e.doi}" data-title="${e.title}">remove</button>
      </article>`,
      )
      .join("");
    for (const btn of host.querySelectorAll<HTMLButtonElement>(".favorite-btn")) {
      btn.addEventListener("click", () => {
        favorites.toggle(btn.dataset.doi ?? "", btn.dataset.title ?? "");
        render();
      });
    }
  };
  render();
}

export function initComparePage(win: Window, api: ApiClient): void {
  const doc = win.document;
  const form = target(doc, "compare-form") as HTMLFormElement;
  const out = target(doc, "compare-out");
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const els = form.elements as unknown as Record<string, HTMLInputElement>;
    out.innerHTML = `<span class="loading">comparing…</span>`;
    api
      .compare(
        els.a?.value ?? "",
        els.b?.value ?? "",
        els.pool?.value ?? "all",
        Number(els.from?.value || new Date().getFullYear() - 4),
        Number(els.to?.value || new Date().getFullYear()),
      )
      .then((series) => {
        out.innerHTML = comparisonChart(
          series.years,
          { label: series.topic_a, counts: series.counts_a },
          { label: series.topic_b, counts: series.counts_b },
        );
        if (series.degraded_years.length > 0) {
          out.innerHTML += `<p class="degraded">degraded years: ${series.degraded_years.join(", ")}</p>`;
        }
      })
      .catch((err: unknown) => showError(out, err));
  });
}

export function initBriefingPage(
  win: Window,
  api: ApiClient,
  favorites: FavoritesStore,
): void {
  const doc = win.document;
  const form = target(doc, "briefing-form") as HTMLFormElement;
  const out = target(doc, "briefing-out");
  const load = () => {
    const els = form.elements as unknown as Record<string, HTMLInputElement>;
    out.innerHTML = `<span class="loading">loading briefing…</span>`;
    api
      .briefing(
        els.pool?.value ?? "all",
        Number(els.days?.value || 30),
        Number(els.k?.value || 10),
      )
      .then((body) => {
        out.innerHTML = renderResultCards(body.items, (doi) => favorites.has(doi));
      })
      .catch((err: unknown) => showError(out, err));
  };
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    load();
  });
  load();
}

export function initAnalyticsPage(win: Window, api: ApiClient): void {
  const host = target(win.document, "usage-charts");
  api
    .usageSummary()
    .then((summary) => {
      host.innerHTML = renderUsageCharts(summary);
    })
    .catch((err: unknown) => showError(host, err));
}
