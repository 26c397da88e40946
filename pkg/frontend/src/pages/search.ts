// Search page controller: URL-synchronized form state, latest-wins fetching,
// card list, hotspot panel, distribution charts, favorites, citation modal.

import { ApiClient, ApiError } from "../api.js";
import { FavoritesStore } from "../favorites.js";
import {
  CITATION_STYLES,
  renderCitationModal,
  renderErrorBanner,
  renderHotspots,
  renderResultCards,
  renderSearchAnalytics,
  renderSearchSummary,
} from "../render.js";
import type { SearchResponse } from "../types.js";
import {
  DEFAULT_STATE,
  parseSearchState,
  syncUrl,
  type UiSearchState,
} from "../urlstate.js";

interface SearchPageElements {
  form: HTMLFormElement;
  results: HTMLElement;
  summary: HTMLElement;
  hotspots: HTMLElement;
  analytics: HTMLElement;
  pager: HTMLElement;
  modalHost: HTMLElement;
}

function grab(doc: Document): SearchPageElements {
  const get = (id: string) => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    form: get("search-form") as HTMLFormElement,
    results: get("results"),
    summary: get("summary"),
    hotspots: get("hotspots"),
    analytics: get("analytics"),
    pager: get("pager"),
    modalHost: get("modal-host"),
  };
}

export function initSearchPage(
  win: Window,
  api: ApiClient,
  favorites: FavoritesStore,
): void {
  const doc = win.document;
  const els = grab(doc);
  let state: UiSearchState = parseSearchState(win.location.search);

  const formEls = els.form.elements as unknown as Record<string, HTMLInputElement>;

  function formToState(): UiSearchState {
    return {
      ...DEFAULT_STATE,
      q: formEls.q?.value ?? "",
      pool: (formEls.pool?.value as UiSearchState["pool"]) ?? "all",
      from: formEls.from?.value ?? "",
      to: formEls.to?.value ?? "",
      sort: (formEls.sort?.value as UiSearchState["sort"]) ?? "relevance",
      oa: formEls.oa?.checked ?? false,
      size: state.size,
      page: 1,
    };
  }

  function stateToForm(): void {
    if (formEls.q) formEls.q.value = state.q;
    if (formEls.pool) formEls.pool.value = state.pool;
    if (formEls.from) formEls.from.value = state.from;
    if (formEls.to) formEls.to.value = state.to;
    if (formEls.sort) formEls.sort.value = state.sort;
    if (formEls.oa) formEls.oa.checked = state.oa;
  }

  function renderResponse(response: SearchResponse): void {
    els.summary.innerHTML = renderSearchSummary(response);
    els.results.innerHTML = renderResultCards(response.items, (doi) =>
      favorites.has(doi),
    );
    els.hotspots.innerHTML = renderHotspots(response.hotspots);
    els.analytics.innerHTML = renderSearchAnalytics(response.analytics);
    renderPager(response);
    wireCardButtons();
  }

  function renderPager(response: SearchResponse): void {
    const last = Math.max(1, Math.ceil(response.total / response.size));
    els.pager.innerHTML = `
      <button class="pager-prev" ${state.page <= 1 ? "disabled" : ""}>prev</button>
      <span>page ${state.page} of ${last}</span>
      <button class="pager-next" ${state.page >= last ? "disabled" : ""}>next</button>
      <a class="export-csv" href="${api.exportUrl("csv", state)}" download>CSV</a>
      <a class="export-report" href="${api.exportUrl("report", state)}" download>report</a>`;
    els.pager.querySelector(".pager-prev")?.addEventListener("click", () => {
      state = { ...state, page: state.page - 1 };
      run();
    });
    els.pager.querySelector(".pager-next")?.addEventListener("click", () => {
      state = { ...state, page: state.page + 1 };
      run();
    });
  }

  function wireCardButtons(): void {
    for (const btn of els.results.querySelectorAll<HTMLButtonElement>(".favorite-btn")) {
      btn.addEventListener("click", () => {
        const active = favorites.toggle(btn.dataset.doi ?? "", btn.dataset.title ?? "");
        btn.setAttribute("aria-pressed", String(active));
        btn.textContent = `${active ? "★" : "☆"} favorite`;
      });
    }
    for (const btn of els.results.querySelectorAll<HTMLButtonElement>(".cite-btn")) {
      btn.addEventListener("click", () => openCitationModal(btn.dataset.doi ?? ""));
    }
  }

  function openCitationModal(doi: string): void {
    els.modalHost.innerHTML = renderCitationModal(doi);
    const text = els.modalHost.querySelector<HTMLElement>("#cite-text");
    const show = (style: string) => {
      if (text) text.textContent = "loading…";
      api
        .cite(doi, style)
        .then((r) => {
          if (text) text.textContent = r.text;
        })
        .catch((err: unknown) => {
          if (text) text.textContent = `citation failed: ${String(err)}`;
        });
    };
    for (const tab of els.modalHost.querySelectorAll<HTMLButtonElement>(".cite-tab")) {
      tab.addEventListener("click", () => {
        els.modalHost
          .querySelectorAll(".cite-tab")
          .forEach((t) => t.classList.remove("active"));
        tab.classList.add("active");
        show(tab.dataset.style ?? "apa");
      });
    }
    els.modalHost
      .querySelector(".modal-close")
      ?.addEventListener("click", () => (els.modalHost.innerHTML = ""));
    els.modalHost.querySelector(".copy-btn")?.addEventListener("click", () => {
      void win.navigator.clipboard?.writeText(text?.textContent ?? "");
    });
    show(CITATION_STYLES[0] ?? "bibtex");
  }

  function run(): void {
    syncUrl(win, state);
    if (!state.q.trim()) {
      els.summary.innerHTML = "";
      els.results.innerHTML = `<p class="empty">Enter a query to search the pools.</p>`;
      return;
    }
    els.summary.innerHTML = `<span class="loading">searching…</span>`;
    api
      .search(state)
      .then((response) => renderResponse(response))
      .catch((err: unknown) => {
        if (err instanceof DOMException && err.name === "AbortError") return;
        const message =
          err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
        els.summary.innerHTML = "";
        els.results.innerHTML = renderErrorBanner(message);
        els.results
          .querySelector(".retry-btn")
          ?.addEventListener("click", () => run());
      });
  }

  els.form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    state = formToState();
    run();
  });

  stateToForm();
  run();
}
