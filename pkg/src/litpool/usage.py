"""Usage event recording and aggregation over pluggable stores.

Two backends implement the same contract: an append-only NDJSON file for
local development and a generic HTTP table API (bearer-authenticated
POST/GET) for hosted deployments. Delivery is at-least-once; when the remote
backend is unreachable, events buffer in memory (bounded) and flush on the
next append.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional

import httpx

from .analytics import _read_terms

logger = logging.getLogger(__name__)

CLOCK_SKEW_SECONDS = 60
REMOTE_BUFFER_LIMIT = 10_000


class EventKind(Enum):
    PAGEVIEW = "pageview"
    SEARCH = "search"
    FAVORITE = "favorite"


class ReferrerClass(Enum):
    DIRECT = "direct"
    SEARCH_ENGINE = "search_engine"
    SOCIAL = "social"
    OTHER = "other"


class StoreMode(Enum):
    LOCAL_FILE = "local"
    REMOTE_TABLE = "remote"


class InvalidEventError(Exception):
    pass


class StoreUnavailableError(Exception):
    pass


@lru_cache(maxsize=1)
def _referrer_lists() -> tuple[tuple[str, ...], tuple[str, ...]]:
    return (
        _read_terms("referrer_search_engines.txt"),
        _read_terms("referrer_social.txt"),
    )


def classify_referrer(referrer: Optional[str]) -> ReferrerClass:
    """Map a raw referrer URL/hostname to its class; empty means DIRECT."""
    if not referrer or not referrer.strip():
        return ReferrerClass.DIRECT
    host = referrer.strip().lower()
    if "://" in host:
        host = host.split("://", 1)[1]
    host = host.split("/", 1)[0]
    engines, social = _referrer_lists()
    if any(fragment in host for fragment in engines):
        return ReferrerClass.SEARCH_ENGINE
    if any(fragment in host for fragment in social):
        return ReferrerClass.SOCIAL
    return ReferrerClass.OTHER


@dataclass(frozen=True)
class UsageEvent:
    kind: EventKind
    timestamp: datetime
    session_id: str
    page: Optional[str] = None
    keyword: Optional[str] = None
    doi: Optional[str] = None
    referrer_class: ReferrerClass = ReferrerClass.DIRECT

    def validate(self, now: Optional[datetime] = None) -> None:
        required = {
            EventKind.PAGEVIEW: ("page", self.page),
            EventKind.SEARCH: ("keyword", self.keyword),
            EventKind.FAVORITE: ("doi", self.doi),
        }[self.kind]
        if not required[1]:
            raise InvalidEventError(
                f"{self.kind.value} event requires {required[0]}"
            )
        if not self.session_id:
            raise InvalidEventError("missing session_id")
        now = now or datetime.now(timezone.utc)
        if self.timestamp > now + timedelta(seconds=CLOCK_SKEW_SECONDS):
            raise InvalidEventError("timestamp in the future")

    def to_dict(self, event_id: str) -> dict:
        return {
            "id": event_id,
            "kind": self.kind.value,
            "timestamp": self.timestamp.isoformat(),
            "session_id": self.session_id,
            "page": self.page,
            "keyword": self.keyword,
            "doi": self.doi,
            "referrer_class": self.referrer_class.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UsageEvent":
        return cls(
            kind=EventKind(data["kind"]),
            timestamp=datetime.fromisoformat(data["timestamp"]),
            session_id=data["session_id"],
            page=data.get("page"),
            keyword=data.get("keyword"),
            doi=data.get("doi"),
            referrer_class=ReferrerClass(data.get("referrer_class", "direct")),
        )


@dataclass(frozen=True)
class Ack:
    event_id: str
    buffered: bool = False


@dataclass(frozen=True)
class UsageSummary:
    top_pages: list[tuple[str, int]]
    top_keywords: list[tuple[str, int]]
    top_favorited: list[tuple[str, int]]
    source_mix: dict[str, int]
    daily_visits: list[tuple[date, int]]
    cumulative_visits: list[tuple[date, int]]


class EventStore:
    """Backend contract: append(e) then scan(window containing e) observes e."""

    mode: StoreMode

    def append(self, event: UsageEvent) -> Ack:
        raise NotImplementedError

    def scan(self, date_from: date, date_to: date) -> list[UsageEvent]:
        raise NotImplementedError


class LocalFileStore(EventStore):
    """Append-only NDJSON file; writes serialized through one lock."""

    mode = StoreMode.LOCAL_FILE

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, event: UsageEvent) -> Ack:
        event_id = str(uuid.uuid4())
        line = json.dumps(event.to_dict(event_id), ensure_ascii=False)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        return Ack(event_id=event_id)

    def scan(self, date_from: date, date_to: date) -> list[UsageEvent]:
        if not self.path.exists():
            return []
        events = []
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = UsageEvent.from_dict(json.loads(line))
                if date_from <= _utc_date(event.timestamp) <= date_to:
                    events.append(event)
        return events


class RemoteTableStore(EventStore):
    """Generic HTTP table adapter: POST {base}/events, GET {base}/events?from&to."""

    mode = StoreMode.REMOTE_TABLE

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        client: Optional[httpx.Client] = None,
        max_attempts: int = 3,
        buffer_limit: int = REMOTE_BUFFER_LIMIT,
    ):
        self.base_url = base_url.rstrip("/")
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=10.0)
        self._max_attempts = max_attempts
        self._buffer: list[dict] = []
        self._buffer_limit = buffer_limit
        self.dropped_events = 0
        self._lock = threading.Lock()

    def _post(self, record: dict) -> bool:
        for _ in range(self._max_attempts):
            try:
                response = self._client.post(
                    f"{self.base_url}/events", json=record, headers=self._headers
                )
                if response.status_code < 300:
                    return True
            except httpx.HTTPError:
                pass
        return False

    def _flush_locked(self) -> None:
        while self._buffer:
            if not self._post(self._buffer[0]):
                return
            self._buffer.pop(0)

    def append(self, event: UsageEvent) -> Ack:
        record = event.to_dict(str(uuid.uuid4()))
        with self._lock:
            self._flush_locked()
            if self._buffer or not self._post(record):
                if len(self._buffer) >= self._buffer_limit:
                    self._buffer.pop(0)
                    self.dropped_events += 1
                    logger.warning("event buffer full, dropping oldest event")
                self._buffer.append(record)
                return Ack(event_id=record["id"], buffered=True)
        return Ack(event_id=record["id"])

    def scan(self, date_from: date, date_to: date) -> list[UsageEvent]:
        try:
            response = self._client.get(
                f"{self.base_url}/events",
                params={"from": date_from.isoformat(), "to": date_to.isoformat()},
                headers=self._headers,
            )
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise StoreUnavailableError(str(exc)) from exc
        events = [UsageEvent.from_dict(item) for item in response.json()]
        return [
            e for e in events if date_from <= _utc_date(e.timestamp) <= date_to
        ]


def open_store_from_env() -> EventStore:
    """Build the store selected by ANALYTICS_STORE (local|remote)."""
    mode = os.environ.get("ANALYTICS_STORE", "local").lower()
    if mode == "remote":
        url = os.environ.get("REMOTE_STORE_URL")
        if not url:
            raise ValueError("REMOTE_STORE_URL required for remote analytics store")
        return RemoteTableStore(url, os.environ.get("REMOTE_STORE_KEY", ""))
    path = Path(os.environ.get("ANALYTICS_FILE", "data/events.ndjson"))
    return LocalFileStore(path)


def record_event(store: EventStore, event: UsageEvent) -> Ack:
    """Validate and durably append one event (at-least-once)."""
    event.validate()
    return store.append(event)


def _utc_date(ts: datetime) -> date:
    if ts.tzinfo is None:
        return ts.date()
    return ts.astimezone(timezone.utc).date()


def _rank(counts: dict[str, int], k: int) -> list[tuple[str, int]]:
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]


def summarize_usage(
    store: EventStore, date_from: date, date_to: date, k: int = 10
) -> UsageSummary:
    """Aggregate events in [date_from, date_to] (inclusive, UTC dates)."""
    if date_from > date_to:
        raise ValueError("date_from after date_to")
    if k < 1:
        raise ValueError("k must be >= 1")
    pages: dict[str, int] = {}
    keywords: dict[str, int] = {}
    favorites: dict[str, int] = {}
    mix: dict[str, int] = {}
    daily: dict[date, int] = {}
    for event in store.scan(date_from, date_to):
        if event.kind is EventKind.PAGEVIEW:
            pages[event.page] = pages.get(event.page, 0) + 1
            mix[event.referrer_class.value] = (
                mix.get(event.referrer_class.value, 0) + 1
            )
            day = _utc_date(event.timestamp)
            daily[day] = daily.get(day, 0) + 1
        elif event.kind is EventKind.SEARCH:
            term = event.keyword.strip().lower()
            if term:
                keywords[term] = keywords.get(term, 0) + 1
        elif event.kind is EventKind.FAVORITE:
            favorites[event.doi] = favorites.get(event.doi, 0) + 1
    daily_series = sorted(daily.items())
    return UsageSummary(
        top_pages=_rank(pages, k),
        top_keywords=_rank(keywords, k),
        top_favorited=_rank(favorites, k),
        source_mix=dict(sorted(mix.items(), key=lambda kv: (-kv[1], kv[0]))),
        daily_visits=daily_series,
        cumulative_visits=cumulative_series(daily_series),
    )


def cumulative_series(
    daily: Iterable[tuple[date, int]]
) -> list[tuple[date, int]]:
    """Running totals over a strictly date-increasing daily series."""
    out: list[tuple[date, int]] = []
    total = 0
    previous: Optional[date] = None
    for day, count in daily:
        if previous is not None and day <= previous:
            raise ValueError(f"dates must be strictly increasing at {day}")
        previous = day
        total += count
        out.append((day, total))
    return out
