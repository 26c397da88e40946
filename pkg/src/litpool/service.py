"""HTTP application layer: routes, parameter parsing, response serialization,
and static delivery of the UI bundle.

Every route returns either its documented success shape or the ApiError shape
{"error": {"code", "message", "detail"}}. Error codes and statuses:
bad_param 400, invalid_event 422, empty_pool 422, not_found 404,
source_unavailable 502, store_unavailable 503.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import time
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Mapping, Optional

from starlette.applications import Starlette
from starlette.middleware import Middleware
from starlette.middleware.base import BaseHTTPMiddleware
from starlette.middleware.cors import CORSMiddleware
from starlette.requests import Request
from starlette.responses import HTMLResponse, JSONResponse, Response
from starlette.routing import Mount, Route
from starlette.staticfiles import StaticFiles

from .analytics import AnalyticsSummary, Hotspot
from .citations import CitationStyle, export_csv, export_report, format_citation
from .clients import ClientConfig, SourceClients
from .normalize import Article, OutOfPoolError, SkipRecordError, normalize_record
from .registry import (
    PoolSelector,
    Registry,
    UnknownJournalIdsError,
    list_journals,
    load_registry_file,
)
from .search import (
    AllSourcesDegradedError,
    EmptyPoolError,
    SearchQuery,
    SearchResult,
    SortOrder,
    TTLCache,
    compare_topics,
    daily_briefing,
    run_search,
)
from .usage import (
    EventKind,
    InvalidEventError,
    ReferrerClass,
    StoreUnavailableError,
    UsageEvent,
    UsageSummary,
    classify_referrer,
    open_store_from_env,
    record_event,
    summarize_usage,
)

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8080

_SORT_TOKENS = {s.value: s for s in SortOrder}

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>litpool</title></head>
<body><h1>litpool API</h1>
<p>No UI bundle is installed. The API lives under <code>/api/</code>;
see <code>/healthz</code> for liveness.</p></body></html>
"""


@dataclass(frozen=True)
class ApiError(Exception):
    http_status: int
    code: str
    message: str
    detail: Optional[dict] = None

    def response(self) -> JSONResponse:
        body = {"error": {"code": self.code, "message": self.message}}
        if self.detail:
            body["error"]["detail"] = self.detail
        return JSONResponse(body, status_code=self.http_status)


def bad_param(key: str, reason: str) -> ApiError:
    return ApiError(400, "bad_param", f"invalid parameter {key!r}: {reason}",
                    {"param": key})


def parse_search_params(params: Mapping[str, str]) -> SearchQuery:
    """Map the canonical query-string keys onto a SearchQuery.

    Defaults: page=1, size=20, sort=relevance, pool=all. Unknown keys are
    ignored; malformed values raise ApiError naming the offending key.
    """
    text = (params.get("q") or "").strip()
    if not text:
        raise bad_param("q", "query text is required")

    pool_token = (params.get("pool") or "all").strip().lower()
    journal_ids = None
    if params.get("journals"):
        journal_ids = [j for j in params["journals"].split(",") if j]
    try:
        selector = PoolSelector.parse(pool_token, journal_ids)
    except ValueError as exc:
        raise bad_param("pool", str(exc)) from exc

    dates: dict[str, Optional[date]] = {}
    for key in ("from", "to"):
        value = params.get(key)
        if value:
            try:
                dates[key] = date.fromisoformat(value)
            except ValueError as exc:
                raise bad_param(key, f"not an ISO date: {value!r}") from exc
        else:
            dates[key] = None

    sort_token = (params.get("sort") or "relevance").strip().lower()
    if sort_token not in _SORT_TOKENS:
        raise bad_param("sort", f"unknown sort {sort_token!r}")

    page = _int_param(params, "page", 1)
    if page < 1:
        raise bad_param("page", "must be >= 1")
    size = _int_param(params, "size", 20)
    if not 1 <= size <= 100:
        raise bad_param("size", "must be in [1, 100]")

    oa = params.get("oa", "0")
    if oa not in ("0", "1"):
        raise bad_param("oa", "must be 0 or 1")

    try:
        return SearchQuery(
            text=text,
            selector=selector,
            date_from=dates["from"],
            date_to=dates["to"],
            sort=_SORT_TOKENS[sort_token],
            page=page,
            page_size=size,
            oa_only=oa == "1",
        )
    except ValueError as exc:
        raise bad_param("q", str(exc)) from exc


def _int_param(params: Mapping[str, str], key: str, default: int) -> int:
    raw = params.get(key)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise bad_param(key, f"not an integer: {raw!r}") from exc


def serialize_article(article: Article) -> dict:
    access = article.access
    return {
        "doi": article.doi,
        "title": article.title,
        "authors": [
            {
                "given": a.given,
                "family": a.family,
                "affiliations": list(a.affiliations),
            }
            for a in article.authors
        ],
        "journal": article.journal_name,
        "issn": article.journal_issn,
        "date": article.published_date.iso() if article.published_date else None,
        "abstract": article.abstract,
        "citations": article.citation_count,
        "keywords": list(article.native_keywords),
        "oa": {
            "is_oa": access.is_oa,
            "url": access.landing_url,
            "pdf_url": access.pdf_url,
            "license": access.license,
            "excerpt": access.excerpt,
            "provenance": access.provenance.value,
        },
    }


def serialize_analytics(analytics: AnalyticsSummary) -> dict:
    return {
        "journal_distribution": analytics.journal_distribution,
        "category_distribution": analytics.category_distribution,
        "year_distribution": analytics.year_distribution,
        "keyword_distribution": analytics.keyword_distribution,
        "top_affiliations": [list(row) for row in analytics.top_affiliations],
        "method_signals": analytics.method_signals,
        "top_cited": [list(row) for row in analytics.top_cited],
        "abstract_coverage": analytics.abstract_coverage,
        "affiliation_coverage": analytics.affiliation_coverage,
    }


def serialize_hotspots(hotspots: list[Hotspot]) -> list[dict]:
    return [
        {
            "phrase": h.phrase,
            "score": h.score,
            "category": h.category.name,
            "support": h.support,
        }
        for h in hotspots
    ]


def serialize_search_result(result: SearchResult) -> dict:
    return {
        "items": [serialize_article(a) for a in result.items],
        "total": result.total_matched,
        "page": result.page,
        "size": result.page_size,
        "analytics": serialize_analytics(result.analytics),
        "hotspots": serialize_hotspots(result.hotspots),
        "degraded_sources": list(result.degraded_sources),
        "skipped_records": result.skipped_records,
        "query_echo": result.query_echo,
    }


def serialize_usage_summary(
    summary: UsageSummary, date_from: date, date_to: date
) -> dict:
    return {
        "from": date_from.isoformat(),
        "to": date_to.isoformat(),
        "top_pages": [list(row) for row in summary.top_pages],
        "top_keywords": [list(row) for row in summary.top_keywords],
        "top_favorited": [list(row) for row in summary.top_favorited],
        "source_mix": summary.source_mix,
        "daily_visits": [[d.isoformat(), c] for d, c in summary.daily_visits],
        "cumulative_visits": [
            [d.isoformat(), c] for d, c in summary.cumulative_visits
        ],
    }


_ERROR_MAP = [
    (UnknownJournalIdsError, 404, "not_found"),
    (EmptyPoolError, 422, "empty_pool"),
    (AllSourcesDegradedError, 502, "source_unavailable"),
    (InvalidEventError, 422, "invalid_event"),
    (StoreUnavailableError, 503, "store_unavailable"),
]


def _to_api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    for cls, status, code in _ERROR_MAP:
        if isinstance(exc, cls):
            return ApiError(status, code, str(exc))
    logger.exception("unhandled service error", exc_info=exc)
    return ApiError(502, "source_unavailable", "internal upstream failure")


class _State:
    def __init__(
        self,
        registry: Registry,
        clients: SourceClients,
        store,
        cache: Optional[TTLCache] = None,
    ):
        self.registry = registry
        self.clients = clients
        self.store = store
        self.cache = cache or TTLCache()


def _handler(fn):
    def wrapped(request: Request) -> Response:
        try:
            return fn(request)
        except Exception as exc:  # noqa: BLE001 - single error boundary
            return _to_api_error(exc).response()

    return wrapped


@_handler
def _journals_endpoint(request: Request) -> Response:
    state: _State = request.app.state.litpool
    pool_token = (request.query_params.get("pool") or "all").lower()
    try:
        selector = PoolSelector.parse(pool_token)
    except ValueError as exc:
        raise bad_param("pool", str(exc)) from exc
    rows = list_journals(
        state.registry, selector, request.query_params.get("name")
    )
    return JSONResponse(
        {
            "journals": [
                {
                    "id": j.id,
                    "name": j.name,
                    "issns": list(j.issns),
                    "pools": sorted(p.value for p in j.pools),
                    "category": j.category,
                    "official_url": j.official_url,
                    "submission_url": j.submission_url,
                }
                for j in rows
            ],
            "total": len(rows),
        }
    )


def _run_query(request: Request) -> SearchResult:
    state: _State = request.app.state.litpool
    query = parse_search_params(request.query_params)
    return run_search(query, state.registry, state.clients, state.cache)


@_handler
def _search_endpoint(request: Request) -> Response:
    result = _run_query(request)
    response = JSONResponse(serialize_search_result(result))
    if result.degraded_sources:
        response.headers["x-degraded-sources"] = str(len(result.degraded_sources))
    return response


@_handler
def _compare_endpoint(request: Request) -> Response:
    state: _State = request.app.state.litpool
    params = request.query_params
    text_a = (params.get("a") or "").strip()
    text_b = (params.get("b") or "").strip()
    if not text_a:
        raise bad_param("a", "topic text is required")
    if not text_b:
        raise bad_param("b", "topic text is required")
    try:
        selector = PoolSelector.parse((params.get("pool") or "all").lower())
    except ValueError as exc:
        raise bad_param("pool", str(exc)) from exc
    this_year = datetime.now(timezone.utc).year
    year_from = _int_param(params, "from", this_year - 4)
    year_to = _int_param(params, "to", this_year)
    if year_from > year_to:
        raise bad_param("from", "year range is inverted")
    series = compare_topics(
        text_a, text_b, selector, year_from, year_to, state.registry, state.clients
    )
    return JSONResponse(
        {
            "topic_a": series.topic_a,
            "topic_b": series.topic_b,
            "years": series.years,
            "counts_a": series.counts_a,
            "counts_b": series.counts_b,
            "degraded_years": series.degraded_years,
        }
    )


@_handler
def _briefing_endpoint(request: Request) -> Response:
    state: _State = request.app.state.litpool
    params = request.query_params
    try:
        selector = PoolSelector.parse((params.get("pool") or "all").lower())
    except ValueError as exc:
        raise bad_param("pool", str(exc)) from exc
    days = _int_param(params, "days", 30)
    if days < 1:
        raise bad_param("days", "must be >= 1")
    k = _int_param(params, "k", 10)
    if k < 1:
        raise bad_param("k", "must be >= 1")
    items = daily_briefing(selector, days, k, state.registry, state.clients)
    return JSONResponse(
        {
            "items": [serialize_article(a) for a in items],
            "window_days": days,
            "k": k,
        }
    )


@_handler
def _cite_endpoint(request: Request) -> Response:
    state: _State = request.app.state.litpool
    doi = (request.query_params.get("doi") or "").strip().lower()
    if not doi.startswith("10."):
        raise bad_param("doi", "a DOI starting with '10.' is required")
    style_token = (request.query_params.get("style") or "apa").lower()
    try:
        style = CitationStyle(style_token)
    except ValueError as exc:
        raise bad_param("style", f"unknown style {style_token!r}") from exc

    article = state.cache.find_article(doi)
    if article is None:
        raw = state.clients.crossref_lookup_doi(doi)
        if raw is None:
            raise ApiError(404, "not_found", f"DOI {doi} not found")
        try:
            article = normalize_record(raw, state.registry)
        except (SkipRecordError, OutOfPoolError) as exc:
            raise ApiError(404, "not_found", f"DOI {doi} not citable: {exc}") from exc
    return JSONResponse(
        {"doi": article.doi, "style": style.value,
         "text": format_citation(article, style)}
    )


@_handler
def _export_csv_endpoint(request: Request) -> Response:
    # exports cover the full filtered set, not the visible page
    state: _State = request.app.state.litpool
    query = parse_search_params(request.query_params)
    full = _full_set(query, state)
    return Response(
        export_csv(full),
        media_type="text/csv; charset=utf-8",
        headers={"content-disposition": 'attachment; filename="results.csv"'},
    )


@_handler
def _export_report_endpoint(request: Request) -> Response:
    state: _State = request.app.state.litpool
    query = parse_search_params(request.query_params)
    result = run_search(query, state.registry, state.clients, state.cache)
    full = _full_set(query, state)
    report = export_report(full, result.analytics, result.query_echo, result.hotspots)
    return Response(
        report,
        media_type="text/markdown; charset=utf-8",
        headers={"content-disposition": 'attachment; filename="report.md"'},
    )


def _full_set(query: SearchQuery, state: _State) -> list[Article]:
    """All filtered matches for a query, independent of pagination."""
    articles: list[Article] = []
    page = 1
    while True:
        paged = dataclasses.replace(query, page=page)
        result = run_search(paged, state.registry, state.clients, state.cache)
        articles.extend(result.items)
        if page * query.page_size >= result.total_matched:
            return articles
        page += 1


@_handler
def _events_endpoint(request: Request) -> Response:
    raise ApiError(400, "bad_param", "POST required")


async def _events_post(request: Request) -> Response:
    state: _State = request.app.state.litpool
    try:
        body = await request.json()
    except Exception:  # noqa: BLE001
        return ApiError(400, "bad_param", "body must be a JSON object").response()
    if not isinstance(body, dict):
        return ApiError(400, "bad_param", "body must be a JSON object").response()
    try:
        kind = EventKind(str(body.get("kind", "")).lower())
    except ValueError:
        return ApiError(
            422, "invalid_event", f"unknown event kind {body.get('kind')!r}"
        ).response()
    timestamp = datetime.now(timezone.utc)
    if body.get("timestamp"):
        try:
            timestamp = datetime.fromisoformat(str(body["timestamp"]))
            if timestamp.tzinfo is None:
                timestamp = timestamp.replace(tzinfo=timezone.utc)
        except ValueError:
            return ApiError(422, "invalid_event", "bad timestamp").response()
    referrer_class = classify_referrer(body.get("referrer"))
    if body.get("referrer_class"):
        try:
            referrer_class = ReferrerClass(str(body["referrer_class"]).lower())
        except ValueError:
            return ApiError(422, "invalid_event", "bad referrer_class").response()
    event = UsageEvent(
        kind=kind,
        timestamp=timestamp,
        session_id=str(body.get("session_id") or ""),
        page=body.get("page"),
        keyword=body.get("keyword"),
        doi=body.get("doi"),
        referrer_class=referrer_class,
    )
    try:
        ack = record_event(state.store, event)
    except InvalidEventError as exc:
        return ApiError(422, "invalid_event", str(exc)).response()
    return JSONResponse({"id": ack.event_id, "buffered": ack.buffered})


@_handler
def _usage_summary_endpoint(request: Request) -> Response:
    state: _State = request.app.state.litpool
    params = request.query_params
    today = datetime.now(timezone.utc).date()
    date_to = today
    date_from = today - timedelta(days=29)
    for key, default in (("from", date_from), ("to", date_to)):
        value = params.get(key)
        if value:
            try:
                parsed = date.fromisoformat(value)
            except ValueError as exc:
                raise bad_param(key, f"not an ISO date: {value!r}") from exc
            if key == "from":
                date_from = parsed
            else:
                date_to = parsed
    if date_from > date_to:
        raise bad_param("from", "window is inverted")
    k = _int_param(params, "k", 10)
    if k < 1:
        raise bad_param("k", "must be >= 1")
    summary = summarize_usage(state.store, date_from, date_to, k)
    return JSONResponse(serialize_usage_summary(summary, date_from, date_to))


def _healthz(request: Request) -> Response:
    return JSONResponse({"status": "ok"})


def _placeholder(request: Request) -> Response:
    return HTMLResponse(_PLACEHOLDER_PAGE)


class _RequestLog(BaseHTTPMiddleware):
    async def dispatch(self, request, call_next):
        started = time.monotonic()
        response = await call_next(request)
        elapsed_ms = (time.monotonic() - started) * 1000
        logger.info(
            "request route=%s status=%s latency_ms=%.1f degraded=%s",
            request.url.path,
            response.status_code,
            elapsed_ms,
            response.headers.get("x-degraded-sources", "0"),
        )
        return response


def create_app(
    registry: Registry,
    clients: SourceClients,
    store,
    cache: Optional[TTLCache] = None,
    static_dir: Optional[Path] = None,
    allowed_origin: Optional[str] = None,
) -> Starlette:
    """Assemble the service with explicit dependencies (tests inject fakes)."""
    routes = [
        Route("/api/journals", _journals_endpoint),
        Route("/api/search", _search_endpoint),
        Route("/api/compare", _compare_endpoint),
        Route("/api/briefing", _briefing_endpoint),
        Route("/api/cite", _cite_endpoint),
        Route("/api/export/csv", _export_csv_endpoint),
        Route("/api/export/report", _export_report_endpoint),
        Route("/api/events", _events_post, methods=["POST"]),
        Route("/api/events", _events_endpoint, methods=["GET"]),
        Route("/api/analytics/summary", _usage_summary_endpoint),
        Route("/healthz", _healthz),
    ]
    if static_dir and Path(static_dir).is_dir():
        routes.append(
            Mount("/", app=StaticFiles(directory=str(static_dir), html=True))
        )
    else:
        routes.append(Route("/", _placeholder))

    middleware = [Middleware(_RequestLog)]
    origin = allowed_origin or os.environ.get("ALLOWED_ORIGIN", "*")
    middleware.append(
        Middleware(
            CORSMiddleware,
            allow_origins=[origin],
            allow_methods=["GET", "POST"],
            allow_headers=["content-type"],
        )
    )
    app = Starlette(routes=routes, middleware=middleware)
    app.state.litpool = _State(registry, clients, store, cache)
    return app


def create_app_from_env() -> Starlette:
    """Build the app from environment configuration (see README)."""
    registry = load_registry_file()
    clients = SourceClients(ClientConfig.from_env())
    store = open_store_from_env()
    static_dir = Path(os.environ.get("UI_DIR", "frontend/dist"))
    return create_app(registry, clients, store, static_dir=static_dir)
