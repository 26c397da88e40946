// Entry point: one bundle shared by all pages, dispatched by body[data-page].
// Every page records a pageview event on load (fire-and-forget).

import { ApiClient, sessionId } from "./api.js";
import { FavoritesStore } from "./favorites.js";
import {
  initAnalyticsPage,
  initBriefingPage,
  initComparePage,
  initFavoritesPage,
  initHomePage,
  initJournalsPage,
} from "./pages/other.js";
import { initSearchPage } from "./pages/search.js";

function boot(win: Window): void {
  const api = new ApiClient(win.fetch.bind(win));
  const session = sessionId(win.localStorage);
  const favorites = new FavoritesStore(win.localStorage, (doi) => {
    api.emitEvent({ kind: "favorite", doi, session_id: session });
  });

  api.emitEvent({
    kind: "pageview",
    page: win.location.pathname,
    session_id: session,
    referrer: win.document.referrer,
  });

  const page = win.document.body.dataset.page ?? "home";
  switch (page) {
    case "search":
      initSearchPage(win, api, favorites);
      break;
    case "journals":
      initJournalsPage(win, api);
      break;
    case "favorites":
      initFavoritesPage(win, favorites);
      break;
    case "compare":
      initComparePage(win, api);
      break;
    case "briefing":
      initBriefingPage(win, api, favorites);
      break;
    case "analytics":
      initAnalyticsPage(win, api);
      break;
    default:
      initHomePage(win, api);
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", () => boot(window));
  } else {
    boot(window);
  }
}

export { boot };
