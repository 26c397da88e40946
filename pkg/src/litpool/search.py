"""Search orchestration: pool resolution, bounded multi-source fetch,
normalization, filter/sort/paginate, plus the topic-comparison and
daily-briefing composites.

The journal pool is a hard boundary: fetches are issued journal by journal
against the selected pool and anything that resolves outside it is discarded.
Analytics ride on the full filtered set, not the visible page.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from typing import Callable, Optional
from urllib.parse import quote

from .analytics import AnalyticsSummary, Hotspot, compute_distributions, extract_hotspots
from .clients import SourceClients, SourceUnavailableError
from .normalize import (
    Article,
    OutOfPoolError,
    SkipRecordError,
    dedup_articles,
    normalize_record,
)
from .registry import PoolSelector, Registry, list_journals

logger = logging.getLogger(__name__)

OPENALEX_DEGRADED = "openalex"  # marker entry in degraded_sources
MAX_PLANNED_REQUESTS = 100
PER_JOURNAL_ROWS_CAP = 25
CACHE_TTL_SECONDS = 900.0


class SortOrder(Enum):
    RELEVANCE = "relevance"
    DATE_DESC = "date"
    CITATIONS_DESC = "citations"


class EmptyPoolError(Exception):
    pass


class AllSourcesDegradedError(Exception):
    pass


@dataclass(frozen=True)
class SearchQuery:
    text: str
    selector: PoolSelector = field(default_factory=PoolSelector.all)
    date_from: Optional[date] = None
    date_to: Optional[date] = None
    sort: SortOrder = SortOrder.RELEVANCE
    page: int = 1
    page_size: int = 20
    oa_only: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", self.text.strip())
        if not self.text:
            raise ValueError("query text must be non-empty")
        if self.date_from and self.date_to and self.date_from > self.date_to:
            raise ValueError("date_from after date_to")
        if self.page < 1:
            raise ValueError("page must be >= 1")
        if not 1 <= self.page_size <= 100:
            raise ValueError("page_size must be in [1, 100]")


@dataclass(frozen=True)
class SearchResult:
    items: list[Article]
    total_matched: int
    page: int
    page_size: int
    analytics: AnalyticsSummary
    hotspots: list[Hotspot]
    degraded_sources: list[str]
    skipped_records: int
    query_echo: str


@dataclass(frozen=True)
class ComparisonSeries:
    topic_a: str
    topic_b: str
    years: list[int]
    counts_a: list[int]
    counts_b: list[int]
    degraded_years: list[int] = field(default_factory=list)


def canonical_query(query: SearchQuery) -> str:
    """Stable serialization used for cache keys and shareable URLs.

    Key order is fixed: q, pool, journals, from, to, sort, page, size, oa.
    journals/from/to appear only when set; values are percent-encoded.
    """
    parts = [
        ("q", quote(query.text, safe="")),
        ("pool", query.selector.token()),
    ]
    if query.selector.journal_ids:
        parts.append(("journals", ",".join(query.selector.journal_ids)))
    if query.date_from:
        parts.append(("from", query.date_from.isoformat()))
    if query.date_to:
        parts.append(("to", query.date_to.isoformat()))
    parts += [
        ("sort", query.sort.value),
        ("page", str(query.page)),
        ("size", str(query.page_size)),
        ("oa", "1" if query.oa_only else "0"),
    ]
    return "&".join(f"{k}={v}" for k, v in parts)


class TTLCache:
    """Small thread-safe TTL map for SearchResults, keyed by canonical query."""

    def __init__(
        self,
        ttl: float = CACHE_TTL_SECONDS,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.ttl = ttl
        self._clock = clock
        self._entries: dict[str, tuple[float, SearchResult]] = {}
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[SearchResult]:
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                return None
            expires, value = entry
            if expires < self._clock():
                del self._entries[key]
                return None
            return value

    def put(self, key: str, value: SearchResult) -> None:
        with self._lock:
            self._entries[key] = (self._clock() + self.ttl, value)

    def find_article(self, doi: str) -> Optional[Article]:
        doi = doi.lower()
        with self._lock:
            now = self._clock()
            for expires, result in self._entries.values():
                if expires < now:
                    continue
                for article in result.items:
                    if article.doi == doi:
                        return article
        return None


@dataclass
class _FetchOutcome:
    articles: list[Article]
    degraded: list[str]
    skipped: int
    attempted_sources: int


def _fetch_pool(
    text: str,
    selector: PoolSelector,
    registry: Registry,
    clients: SourceClients,
    date_from: Optional[date],
    date_to: Optional[date],
    rows: int,
) -> _FetchOutcome:
    """Per-journal Crossref fetch + one OpenAlex supplement, normalized,
    pool-filtered, and deduplicated. Per-journal failures degrade, never abort."""
    journals = list_journals(registry, selector)
    if not journals:
        raise EmptyPoolError(f"no journals match pool {selector.token()!r}")
    journals = journals[:MAX_PLANNED_REQUESTS]
    pool_issns = registry.issns_for(selector)

    degraded: list[str] = []
    raw_records = []
    with ThreadPoolExecutor(max_workers=clients.config.max_concurrency) as pool:
        futures = [
            pool.submit(
                clients.crossref_fetch, j.issns[0], text, date_from, date_to, rows
            )
            for j in journals
        ]
        for journal, future in zip(journals, futures):
            try:
                raw_records.extend(future.result())
            except SourceUnavailableError as exc:
                logger.warning("crossref degraded for %s: %s", journal.id, exc)
                degraded.append(journal.issns[0])

    try:
        raw_records.extend(
            clients.openalex_fetch(
                sorted(pool_issns), text, date_from, date_to, per_page=rows
            )
        )
    except SourceUnavailableError as exc:
        logger.warning("openalex supplement degraded: %s", exc)
        degraded.append(OPENALEX_DEGRADED)

    skipped = 0
    articles = []
    for raw in raw_records:
        try:
            article = normalize_record(raw, registry)
        except (SkipRecordError, OutOfPoolError):
            skipped += 1
            continue
        if article.journal_issn not in pool_issns:
            skipped += 1
            continue
        articles.append(article)

    return _FetchOutcome(
        articles=dedup_articles(articles),
        degraded=degraded,
        skipped=skipped,
        attempted_sources=len(journals) + 1,
    )


def _in_window(
    article: Article, date_from: Optional[date], date_to: Optional[date]
) -> bool:
    if article.published_date is None:
        return False
    y, m, d = article.published_date.sort_key()
    published = date(y, m, d)
    if date_from and published < date_from:
        return False
    if date_to and published > date_to:
        return False
    return True


def _date_ordinal(article: Article) -> int:
    if article.published_date is None:
        return 0
    y, m, d = article.published_date.sort_key()
    return date(y, m, d).toordinal()


def _sort_key(order: SortOrder):
    if order is SortOrder.DATE_DESC:
        return lambda a: (-_date_ordinal(a), a.doi)
    if order is SortOrder.CITATIONS_DESC:
        return lambda a: (
            1 if a.citation_count is None else -a.citation_count,
            a.doi,
        )
    # RELEVANCE: native score first desc, then score-less by date desc
    return lambda a: (
        0 if a.relevance is not None else 1,
        -(a.relevance or 0.0),
        -_date_ordinal(a),
        a.doi,
    )


def _enrich(articles: list[Article], clients: SourceClients) -> list[Article]:
    return [
        a
        if a.access.provenance.value != "none"
        else replace(a, access=clients.oa_enrich(a.doi))
        for a in articles
    ]


def run_search(
    query: SearchQuery,
    registry: Registry,
    clients: SourceClients,
    cache: Optional[TTLCache] = None,
) -> SearchResult:
    """Execute the full pipeline for one query and return one result page."""
    key = canonical_query(query)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit

    rows = min(PER_JOURNAL_ROWS_CAP, query.page_size * 3)
    outcome = _fetch_pool(
        query.text,
        query.selector,
        registry,
        clients,
        query.date_from,
        query.date_to,
        rows,
    )
    if len(outcome.degraded) >= outcome.attempted_sources:
        raise AllSourcesDegradedError("every upstream source failed for this query")

    filtered = [
        a for a in outcome.articles if _in_window(a, query.date_from, query.date_to)
    ]
    if query.oa_only:
        filtered = [a for a in _enrich(filtered, clients) if a.access.is_oa]
    filtered.sort(key=_sort_key(query.sort))

    start = (query.page - 1) * query.page_size
    items = filtered[start : start + query.page_size]
    if not query.oa_only:
        items = _enrich(items, clients)

    hotspots = extract_hotspots(filtered, 10)
    analytics = compute_distributions(filtered, registry)
    result = SearchResult(
        items=items,
        total_matched=len(filtered),
        page=query.page,
        page_size=query.page_size,
        analytics=analytics,
        hotspots=hotspots,
        degraded_sources=outcome.degraded,
        skipped_records=outcome.skipped,
        query_echo=key,
    )
    if cache is not None:
        cache.put(key, result)
    return result


def compare_topics(
    text_a: str,
    text_b: str,
    selector: PoolSelector,
    year_from: int,
    year_to: int,
    registry: Registry,
    clients: SourceClients,
) -> ComparisonSeries:
    """Per-year match counts for two topics over the same pool."""
    text_a, text_b = text_a.strip(), text_b.strip()
    if not text_a or not text_b:
        raise ValueError("both topics must be non-empty")
    if year_from > year_to:
        raise ValueError("year_from after year_to")
    years = list(range(year_from, year_to + 1))
    counts_a: list[int] = []
    counts_b: list[int] = []
    degraded_years: list[int] = []
    for year in years:
        window = (date(year, 1, 1), date(year, 12, 31))
        degraded = False
        for text, counts in ((text_a, counts_a), (text_b, counts_b)):
            outcome = _fetch_pool(
                text, selector, registry, clients, window[0], window[1],
                PER_JOURNAL_ROWS_CAP,
            )
            matched = [a for a in outcome.articles if _in_window(a, *window)]
            counts.append(len(matched))
            degraded = degraded or bool(outcome.degraded)
        if degraded:
            degraded_years.append(year)
    return ComparisonSeries(
        topic_a=text_a,
        topic_b=text_b,
        years=years,
        counts_a=counts_a,
        counts_b=counts_b,
        degraded_years=degraded_years,
    )


def daily_briefing(
    selector: PoolSelector,
    window_days: int,
    k: int,
    registry: Registry,
    clients: SourceClients,
    today: Optional[date] = None,
) -> list[Article]:
    """Top-k articles of the last window_days, ranked by citations, then
    recency, then DOI."""
    if window_days < 1:
        raise ValueError("window_days must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    today = today or datetime.now(timezone.utc).date()
    date_from = today - timedelta(days=window_days - 1)
    outcome = _fetch_pool(
        "", selector, registry, clients, date_from, today, PER_JOURNAL_ROWS_CAP
    )
    matched = [a for a in outcome.articles if _in_window(a, date_from, today)]
    matched.sort(
        key=lambda a: (
            1 if a.citation_count is None else -a.citation_count,
            -_date_ordinal(a),
            a.doi,
        )
    )
    return _enrich(matched[:k], clients)
