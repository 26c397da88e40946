"""Rate-limited, retrying, fixture-replayable clients for the metadata sources.

One shared client object serves Crossref, OpenAlex, Unpaywall, and optional
CORE. Requests flow through an httpx transport that is real (LIVE), a
recording wrapper (RECORD), or a fixture reader that performs no network
operations at all (REPLAY). Fixture files are named by a hash of
(host, path, sorted query params) with identity params excluded.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import parse_qsl, quote, urlsplit

import httpx

from .normalize import AccessProvenance, FullTextAccess, RawRecord, Source
from .registry import ISSN_RE

__all__ = [
    "ClientConfig",
    "FixtureMode",
    "FixtureMissingError",
    "RateLimiter",
    "RawRecord",
    "ReplayTransport",
    "RecordingTransport",
    "Source",
    "SourceClients",
    "SourceUnavailableError",
    "fixture_key",
]

logger = logging.getLogger(__name__)

CROSSREF_HOST = "https://api.crossref.org"
OPENALEX_HOST = "https://api.openalex.org"
UNPAYWALL_HOST = "https://api.unpaywall.org"
CORE_HOST = "https://api.core.ac.uk"

RETRY_STATUSES = {429, 500, 502, 503, 504}
# volatile identity params excluded from fixture keys
_IDENTITY_PARAMS = {"mailto", "email"}


class FixtureMode(Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


class SourceUnavailableError(Exception):
    """A source stayed unavailable after retries; carries the failing scope."""

    def __init__(self, source: Source, scope: str, detail: str = ""):
        super().__init__(f"{source.value} unavailable for {scope}: {detail}")
        self.source = source
        self.scope = scope


class FixtureMissingError(Exception):
    pass


@dataclass(frozen=True)
class ClientConfig:
    contact_email: str = ""
    per_host_rate: float = 2.0  # requests/second
    max_concurrency: int = 4
    request_timeout: float = 10.0
    max_attempts: int = 3
    backoff_base: float = 0.5
    core_api_key: Optional[str] = None
    fixture_mode: FixtureMode = FixtureMode.LIVE
    fixture_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.per_host_rate <= 0:
            raise ValueError("per_host_rate must be > 0")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be > 0")
        if self.fixture_mode is not FixtureMode.LIVE and self.fixture_dir is None:
            raise ValueError(f"{self.fixture_mode.value} mode requires fixture_dir")
        if self.fixture_mode is FixtureMode.LIVE and not self.contact_email:
            raise ValueError("contact_email required for live requests")

    @classmethod
    def from_env(cls) -> "ClientConfig":
        mode = FixtureMode(os.environ.get("FIXTURE_MODE", "live").lower())
        fixture_dir = os.environ.get("FIXTURE_DIR")
        return cls(
            contact_email=os.environ.get("CONTACT_EMAIL", ""),
            core_api_key=os.environ.get("CORE_API_KEY") or None,
            fixture_mode=mode,
            fixture_dir=Path(fixture_dir) if fixture_dir else None,
        )


def fixture_key(url: str) -> str:
    """Stable fixture filename for a request URL (identity params excluded)."""
    parts = urlsplit(url)
    params = sorted(
        (k, v)
        for k, v in parse_qsl(parts.query, keep_blank_values=True)
        if k not in _IDENTITY_PARAMS
    )
    canon = "\n".join(
        [parts.netloc, parts.path] + [f"{k}={v}" for k, v in params]
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:24] + ".json"


class ReplayTransport(httpx.BaseTransport):
    """Serves recorded fixtures; performs zero network operations."""

    def __init__(self, fixture_dir: Path):
        self.fixture_dir = Path(fixture_dir)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        path = self.fixture_dir / fixture_key(str(request.url))
        if not path.exists():
            raise FixtureMissingError(f"no fixture for {request.url} ({path.name})")
        data = json.loads(path.read_text(encoding="utf-8"))
        return httpx.Response(
            status_code=data["status"],
            headers={"content-type": data.get("content_type", "application/json")},
            content=json.dumps(data["body"]).encode("utf-8"),
            request=request,
        )


class RecordingTransport(httpx.BaseTransport):
    """Passes requests through and writes one fixture file per request."""

    def __init__(self, inner: httpx.BaseTransport, fixture_dir: Path):
        self.inner = inner
        self.fixture_dir = Path(fixture_dir)
        self.fixture_dir.mkdir(parents=True, exist_ok=True)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        response = self.inner.handle_request(request)
        response.read()
        try:
            body = json.loads(response.content or b"null")
        except json.JSONDecodeError:
            body = response.text
        record = {
            "url": str(request.url),
            "status": response.status_code,
            "content_type": response.headers.get("content-type", "application/json"),
            "body": body,
        }
        path = self.fixture_dir / fixture_key(str(request.url))
        path.write_text(
            json.dumps(record, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        return httpx.Response(
            status_code=response.status_code,
            headers=response.headers,
            content=response.content,
            request=request,
        )


class RateLimiter:
    """Per-host minimum-interval pacing, safe under concurrent acquire()."""

    def __init__(
        self,
        rate: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._next_free: dict[str, float] = {}
        self._lock = threading.Lock()

    def acquire(self, host: str) -> None:
        with self._lock:
            now = self._clock()
            start = max(now, self._next_free.get(host, now))
            self._next_free[host] = start + self.interval
            wait = start - now
        if wait > 0:
            self._sleep(wait)


def _build_transport(config: ClientConfig) -> httpx.BaseTransport:
    if config.fixture_mode is FixtureMode.REPLAY:
        return ReplayTransport(config.fixture_dir)
    real = httpx.HTTPTransport()
    if config.fixture_mode is FixtureMode.RECORD:
        return RecordingTransport(real, config.fixture_dir)
    return real


class SourceClients:
    """Shared, thread-safe access point for all upstream metadata sources."""

    def __init__(
        self,
        config: ClientConfig,
        transport: Optional[httpx.BaseTransport] = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self._client = httpx.Client(
            transport=transport or _build_transport(config),
            timeout=config.request_timeout,
        )
        # replay serves fixtures from disk; upstream etiquette does not apply
        replaying = config.fixture_mode is FixtureMode.REPLAY
        rate = 1e9 if replaying else config.per_host_rate
        self._limiter = RateLimiter(rate, clock=clock, sleep=sleep)
        self._backoff_base = 0.0 if replaying else config.backoff_base
        self._sleep = sleep
        self._inflight = threading.Semaphore(config.max_concurrency)

    def close(self) -> None:
        self._client.close()

    def _request(
        self, url: str, source: Source, scope: str, headers: Optional[dict] = None
    ) -> httpx.Response:
        """One rate-limited GET with retries on timeout, 429, and 5xx."""
        host = urlsplit(url).netloc
        last_error = ""
        for attempt in range(self.config.max_attempts):
            if attempt:
                self._sleep(self._backoff_base * (2 ** (attempt - 1)))
            with self._inflight:
                self._limiter.acquire(host)
                try:
                    response = self._client.get(url, headers=headers)
                except httpx.TimeoutException as exc:
                    last_error = f"timeout: {exc}"
                    continue
                except FixtureMissingError:
                    raise
                except httpx.HTTPError as exc:
                    last_error = f"transport: {exc}"
                    continue
            if response.status_code in RETRY_STATUSES:
                last_error = f"status {response.status_code}"
                continue
            return response
        raise SourceUnavailableError(source, scope, last_error)

    def crossref_fetch(
        self,
        issn: str,
        query: str,
        date_from: Optional[date] = None,
        date_to: Optional[date] = None,
        rows: int = 25,
    ) -> list[RawRecord]:
        """Journal-bounded Crossref works query; 404 degrades to an empty list."""
        issn = issn.strip().upper()
        if not ISSN_RE.match(issn):
            raise ValueError(f"invalid ISSN {issn!r}")
        if not 1 <= rows <= 100:
            raise ValueError(f"rows must be in [1, 100], got {rows}")
        params = [("rows", str(rows))]
        if query:
            params.insert(0, ("query", query))
        filters = []
        if date_from:
            filters.append(f"from-pub-date:{date_from.isoformat()}")
        if date_to:
            filters.append(f"until-pub-date:{date_to.isoformat()}")
        if filters:
            params.append(("filter", ",".join(filters)))
        if self.config.contact_email:
            params.append(("mailto", self.config.contact_email))
        url = f"{CROSSREF_HOST}/journals/{issn}/works?" + _encode(params)
        try:
            response = self._request(url, Source.CROSSREF, issn)
        except FixtureMissingError as exc:
            raise SourceUnavailableError(Source.CROSSREF, issn, str(exc)) from exc
        if response.status_code == 404:
            return []
        if response.status_code >= 400:
            raise SourceUnavailableError(
                Source.CROSSREF, issn, f"status {response.status_code}"
            )
        items = (response.json().get("message") or {}).get("items") or []
        retrieved = _now()
        return [
            RawRecord(source=Source.CROSSREF, payload=item, retrieved_at=retrieved)
            for item in items
            if item.get("DOI")
        ]

    def crossref_lookup_doi(self, doi: str) -> Optional[RawRecord]:
        """Single-work lookup used by the citation endpoint on cache misses."""
        doi = doi.strip().lower()
        if not doi.startswith("10."):
            raise ValueError(f"invalid DOI {doi!r}")
        params = []
        if self.config.contact_email:
            params.append(("mailto", self.config.contact_email))
        url = f"{CROSSREF_HOST}/works/{quote(doi, safe='/')}"
        if params:
            url += "?" + _encode(params)
        try:
            response = self._request(url, Source.CROSSREF, doi)
        except (SourceUnavailableError, FixtureMissingError):
            return None
        if response.status_code >= 400:
            return None
        payload = (response.json() or {}).get("message")
        if not payload:
            return None
        return RawRecord(source=Source.CROSSREF, payload=payload)

    def openalex_fetch(
        self,
        issns: list[str],
        query: str,
        date_from: Optional[date] = None,
        date_to: Optional[date] = None,
        per_page: int = 25,
    ) -> list[RawRecord]:
        """One multi-ISSN OpenAlex supplement call for the whole pool."""
        if not issns:
            raise ValueError("issns must be non-empty")
        if not 1 <= per_page <= 100:
            raise ValueError(f"per_page must be in [1, 100], got {per_page}")
        clauses = ["primary_location.source.issn:" + "|".join(sorted(issns))]
        if date_from:
            clauses.append(f"from_publication_date:{date_from.isoformat()}")
        if date_to:
            clauses.append(f"to_publication_date:{date_to.isoformat()}")
        params = [("filter", ",".join(clauses))]
        if query:
            params.append(("search", query))
        params.append(("per-page", str(per_page)))
        if self.config.contact_email:
            params.append(("mailto", self.config.contact_email))
        url = f"{OPENALEX_HOST}/works?" + _encode(params)
        try:
            response = self._request(url, Source.OPENALEX, "pool")
        except FixtureMissingError as exc:
            raise SourceUnavailableError(Source.OPENALEX, "pool", str(exc)) from exc
        if response.status_code >= 400:
            raise SourceUnavailableError(
                Source.OPENALEX, "pool", f"status {response.status_code}"
            )
        retrieved = _now()
        return [
            RawRecord(source=Source.OPENALEX, payload=item, retrieved_at=retrieved)
            for item in response.json().get("results") or []
        ]

    def oa_enrich(self, doi: str) -> FullTextAccess:
        """Open-access resolution: Unpaywall first, then optional CORE.

        Never raises to the caller; both providers unreachable yields the
        access-unknown record.
        """
        doi = doi.strip().lower()
        if not doi.startswith("10."):
            raise ValueError(f"invalid DOI {doi!r}")
        access, unpaywall_ok = self._unpaywall(doi)
        if access is not None and access.is_oa:
            return access
        if self.config.core_api_key:
            core = self._core(doi)
            if core is not None:
                return core
        if unpaywall_ok and access is not None:
            return access
        return FullTextAccess.unknown()

    def _unpaywall(self, doi: str) -> tuple[Optional[FullTextAccess], bool]:
        email = self.config.contact_email or "anonymous@example.org"
        url = f"{UNPAYWALL_HOST}/v2/{quote(doi, safe='/')}?" + _encode(
            [("email", email)]
        )
        try:
            response = self._request(url, Source.UNPAYWALL, doi)
        except (SourceUnavailableError, FixtureMissingError) as exc:
            logger.debug("unpaywall unavailable for %s: %s", doi, exc)
            return None, False
        if response.status_code >= 400:
            return None, False
        data = response.json() or {}
        best = data.get("best_oa_location") or {}
        landing = best.get("url_for_landing_page") or best.get("url")
        pdf = best.get("url_for_pdf")
        is_oa = bool(data.get("is_oa")) and bool(landing or pdf)
        return (
            FullTextAccess(
                is_oa=is_oa,
                landing_url=landing if is_oa else None,
                pdf_url=pdf if is_oa else None,
                license=best.get("license") if is_oa else None,
                provenance=AccessProvenance.UNPAYWALL,
                source_priority=1,
            ),
            True,
        )

    def _core(self, doi: str) -> Optional[FullTextAccess]:
        url = f"{CORE_HOST}/v3/search/works?" + _encode(
            [("q", f'doi:"{doi}"'), ("limit", "1")]
        )
        headers = {"Authorization": f"Bearer {self.config.core_api_key}"}
        try:
            response = self._request(url, Source.CORE, doi, headers=headers)
        except (SourceUnavailableError, FixtureMissingError) as exc:
            logger.debug("core unavailable for %s: %s", doi, exc)
            return None
        if response.status_code >= 400:
            return None
        results = (response.json() or {}).get("results") or []
        if not results:
            return FullTextAccess(
                is_oa=False, provenance=AccessProvenance.CORE, source_priority=2
            )
        work = results[0]
        pdf = work.get("downloadUrl")
        landing = work.get("sourceFulltextUrls", [None])[0] if work.get(
            "sourceFulltextUrls"
        ) else work.get("links", [{}])[0].get("url") if work.get("links") else None
        excerpt = (work.get("fullText") or "")[:1200] or None
        is_oa = bool(pdf or landing)
        return FullTextAccess(
            is_oa=is_oa,
            landing_url=landing,
            pdf_url=pdf,
            license=work.get("license"),
            excerpt=excerpt,
            provenance=AccessProvenance.CORE,
            source_priority=2,
        )


_QUERY_SAFE = ',:|+"'


def _encode(params: list[tuple[str, str]]) -> str:
    return "&".join(f"{k}={quote(str(v), safe=_QUERY_SAFE)}" for k, v in params)


def _now() -> datetime:
    return datetime.now(timezone.utc)
