"""Common article schema and cross-source normalization.

Raw payloads from Crossref and OpenAlex are mapped onto one Article shape,
duplicate DOIs are merged with a documented field-precedence table, and
result lists are deduplicated. The shared envelope types (Source, RawRecord,
FullTextAccess) live here so the client and orchestration layers can import
them without cycles.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING, Any, Optional

if TYPE_CHECKING:
    from .registry import Registry

DOI_PREFIX = "10."
_TAG_RE = re.compile(r"<[^>]+>")
_WS_RE = re.compile(r"\s+")


class Source(Enum):
    CROSSREF = "crossref"
    OPENALEX = "openalex"
    UNPAYWALL = "unpaywall"
    CORE = "core"


class AccessProvenance(Enum):
    UNPAYWALL = "unpaywall"
    CORE = "core"
    NONE = "none"


@dataclass(frozen=True)
class RawRecord:
    """One upstream response item, payload kept losslessly."""

    source: Source
    payload: dict
    retrieved_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )


@dataclass(frozen=True)
class FullTextAccess:
    is_oa: bool = False
    landing_url: Optional[str] = None
    pdf_url: Optional[str] = None
    license: Optional[str] = None
    excerpt: Optional[str] = None
    provenance: AccessProvenance = AccessProvenance.NONE
    source_priority: int = 3  # 1=unpaywall, 2=core, 3=none

    def __post_init__(self) -> None:
        if self.is_oa and not (self.landing_url or self.pdf_url):
            raise ValueError("open access requires a landing or PDF URL")
        if self.provenance is AccessProvenance.NONE and self.is_oa:
            raise ValueError("unknown provenance cannot be open access")
        if self.excerpt is not None and len(self.excerpt) > 1200:
            raise ValueError("excerpt longer than 1200 characters")

    @classmethod
    def unknown(cls) -> "FullTextAccess":
        return cls()


@dataclass(frozen=True, order=True)
class PartialDate:
    """Publication date with mandatory year, optional month/day."""

    year: int
    month: Optional[int] = None
    day: Optional[int] = None

    def __post_init__(self) -> None:
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"bad month {self.month}")
        if self.day is not None:
            if self.month is None:
                raise ValueError("day without month")
            if not 1 <= self.day <= 31:
                raise ValueError(f"bad day {self.day}")

    @classmethod
    def parse(cls, text: str) -> "PartialDate":
        parts = [int(p) for p in text.strip().split("-") if p]
        if not parts:
            raise ValueError(f"empty date {text!r}")
        return cls(*parts[:3])

    def iso(self) -> str:
        out = f"{self.year:04d}"
        if self.month is not None:
            out += f"-{self.month:02d}"
            if self.day is not None:
                out += f"-{self.day:02d}"
        return out

    def sort_key(self) -> tuple[int, int, int]:
        # missing precision orders as the first day of the period
        return (self.year, self.month or 1, self.day or 1)


@dataclass(frozen=True)
class Author:
    given: str
    family: str
    affiliations: tuple[str, ...] = ()

    def display(self) -> str:
        return f"{self.given} {self.family}".strip()

    def key(self) -> str:
        return f"{self.family}, {self.given}".strip(", ")


@dataclass(frozen=True)
class Article:
    """Normalized cross-source record keyed by lowercase DOI."""

    doi: str
    title: str
    authors: tuple[Author, ...]
    journal_name: str
    journal_issn: str
    published_date: Optional[PartialDate]
    sources: frozenset[Source]
    abstract: Optional[str] = None
    native_keywords: tuple[str, ...] = ()
    citation_count: Optional[int] = None
    volume: Optional[str] = None
    issue: Optional[str] = None
    pages: Optional[str] = None
    access: FullTextAccess = field(default_factory=FullTextAccess.unknown)
    relevance: Optional[float] = None  # upstream native score, never serialized

    def __post_init__(self) -> None:
        if not self.doi.startswith(DOI_PREFIX):
            raise ValueError(f"DOI must start with '10.': {self.doi!r}")
        if self.doi != self.doi.lower():
            raise ValueError(f"DOI must be lowercase: {self.doi!r}")
        if not self.title.strip():
            raise ValueError("title empty after normalization")
        if self.published_date is not None and not (
            1900 <= self.published_date.year <= 2100
        ):
            raise ValueError(f"year out of range: {self.published_date.year}")
        if self.citation_count is not None and self.citation_count < 0:
            raise ValueError("negative citation count")
        if not self.sources:
            raise ValueError("article must carry at least one source")

    @property
    def year(self) -> Optional[int]:
        return self.published_date.year if self.published_date else None


class SkipRecordError(Exception):
    """Payload unusable (missing DOI, title, or date); caller drops and counts."""


class OutOfPoolError(Exception):
    """Record's journal ISSN is not in the registry; discarded and counted."""

    def __init__(self, issns: list[str]):
        super().__init__(f"ISSNs not in registry: {issns}")
        self.issns = issns


def strip_markup(text: str) -> str:
    """Drop XML/JATS tags, unescape entities, collapse whitespace."""
    return _WS_RE.sub(" ", html.unescape(_TAG_RE.sub(" ", text))).strip()


def reconstruct_abstract(inverted_index: dict[str, list[int]]) -> str:
    """Rebuild abstract text from an inverted token-position index."""
    positions: list[tuple[int, str]] = []
    for token, posns in inverted_index.items():
        for p in posns:
            positions.append((p, token))
    positions.sort()
    return " ".join(token for _, token in positions)


def invert_abstract(text: str) -> dict[str, list[int]]:
    """Inverse of reconstruct_abstract, used by the bijection property test."""
    index: dict[str, list[int]] = {}
    for pos, token in enumerate(text.split(" ")):
        index.setdefault(token, []).append(pos)
    return index


def _crossref_date(payload: dict) -> Optional[PartialDate]:
    parts = (payload.get("issued") or {}).get("date-parts") or [[]]
    first = [p for p in (parts[0] or []) if p is not None]
    if not first:
        return None
    return PartialDate(*[int(p) for p in first[:3]])


def _crossref_authors(payload: dict) -> tuple[Author, ...]:
    authors = []
    for a in payload.get("author") or []:
        affs = tuple(
            aff["name"] for aff in a.get("affiliation") or [] if aff.get("name")
        )
        authors.append(
            Author(
                given=(a.get("given") or "").strip(),
                family=(a.get("family") or "").strip(),
                affiliations=affs,
            )
        )
    return tuple(authors)


def _openalex_authors(payload: dict) -> tuple[Author, ...]:
    authors = []
    for auth in payload.get("authorships") or []:
        name = ((auth.get("author") or {}).get("display_name") or "").strip()
        if not name:
            continue
        given, _, family = name.rpartition(" ")
        affs = tuple(
            inst["display_name"]
            for inst in auth.get("institutions") or []
            if inst.get("display_name")
        )
        authors.append(Author(given=given, family=family, affiliations=affs))
    return tuple(authors)


def _resolve_journal(issns: list[str], registry: "Registry"):
    known = [i for i in issns if i]
    for issn in known:
        journal = registry.resolve_issn(issn)
        if journal is not None:
            return journal
    raise OutOfPoolError(known)


def normalize_record(raw: RawRecord, registry: "Registry") -> Article:
    """Map one raw Crossref/OpenAlex payload onto the common Article schema.

    Raises SkipRecordError when DOI, title, or publication date are missing,
    and OutOfPoolError when no payload ISSN resolves against the registry.
    """
    if raw.source is Source.CROSSREF:
        return _normalize_crossref(raw.payload, registry)
    if raw.source is Source.OPENALEX:
        return _normalize_openalex(raw.payload, registry)
    raise ValueError(f"cannot normalize records from {raw.source}")


def _normalize_crossref(payload: dict, registry: "Registry") -> Article:
    doi = (payload.get("DOI") or "").strip().lower()
    titles = payload.get("title") or []
    title = strip_markup(titles[0]) if titles else ""
    if not doi or not title:
        raise SkipRecordError("crossref record missing DOI or title")
    try:
        published = _crossref_date(payload)
    except ValueError as exc:
        raise SkipRecordError(f"crossref record {doi}: bad date ({exc})") from exc
    if published is None:
        raise SkipRecordError(f"crossref record {doi} missing publication date")
    journal = _resolve_journal(payload.get("ISSN") or [], registry)

    abstract = payload.get("abstract")
    containers = payload.get("container-title") or []
    score = payload.get("score")
    try:
        return Article(
            doi=doi,
            title=title,
            authors=_crossref_authors(payload),
            journal_name=containers[0] if containers else journal.name,
            journal_issn=journal.issns[0],
            published_date=published,
            abstract=strip_markup(abstract) if abstract else None,
            native_keywords=tuple(payload.get("subject") or []),
            citation_count=payload.get("is-referenced-by-count"),
            volume=payload.get("volume"),
            issue=payload.get("issue"),
            pages=payload.get("page"),
            sources=frozenset({Source.CROSSREF}),
            relevance=float(score) if score is not None else None,
        )
    except (TypeError, ValueError) as exc:
        # out-of-range years, negative counts: the record is unusable
        raise SkipRecordError(f"crossref record {doi}: {exc}") from exc


def _normalize_openalex(payload: dict, registry: "Registry") -> Article:
    doi = (payload.get("doi") or "").strip().lower()
    doi = doi.removeprefix("https://doi.org/")
    title = strip_markup(payload.get("display_name") or "")
    if not doi or not title:
        raise SkipRecordError("openalex record missing DOI or title")
    pub_date = payload.get("publication_date")
    if not pub_date:
        raise SkipRecordError(f"openalex record {doi} missing publication date")

    source_info = (payload.get("primary_location") or {}).get("source") or {}
    issns = list(source_info.get("issn") or [])
    if source_info.get("issn_l"):
        issns.append(source_info["issn_l"])
    journal = _resolve_journal(issns, registry)

    abstract = None
    if payload.get("abstract_inverted_index"):
        abstract = reconstruct_abstract(payload["abstract_inverted_index"])
    keywords = tuple(
        c["display_name"]
        for c in payload.get("concepts") or []
        if c.get("display_name") and c.get("score", 0) >= 0.4
    )
    score = payload.get("relevance_score")
    try:
        return Article(
            doi=doi,
            title=title,
            authors=_openalex_authors(payload),
            journal_name=source_info.get("display_name") or journal.name,
            journal_issn=journal.issns[0],
            published_date=PartialDate.parse(pub_date),
            abstract=abstract,
            native_keywords=keywords,
            citation_count=payload.get("cited_by_count"),
            volume=(payload.get("biblio") or {}).get("volume"),
            issue=(payload.get("biblio") or {}).get("issue"),
            pages=_openalex_pages(payload.get("biblio") or {}),
            sources=frozenset({Source.OPENALEX}),
            relevance=float(score) if score is not None else None,
        )
    except (TypeError, ValueError) as exc:
        raise SkipRecordError(f"openalex record {doi}: {exc}") from exc


def _openalex_pages(biblio: dict) -> Optional[str]:
    first, last = biblio.get("first_page"), biblio.get("last_page")
    if first and last and first != last:
        return f"{first}-{last}"
    return first or None


def _anchor_pair(a: Article, b: Article) -> tuple[Article, Article]:
    """Pick the precedence anchor: the Crossref-sourced side when exactly one
    side is Crossref, else the left operand."""
    a_cr = Source.CROSSREF in a.sources
    b_cr = Source.CROSSREF in b.sources
    if b_cr and not a_cr:
        return b, a
    return a, b


def _fill_affiliations(
    authors: tuple[Author, ...], donors: tuple[Author, ...]
) -> tuple[Author, ...]:
    by_family = {d.family.lower(): d for d in donors if d.affiliations}
    out = []
    for i, author in enumerate(authors):
        if author.affiliations:
            out.append(author)
            continue
        donor = None
        if i < len(donors) and donors[i].affiliations:
            donor = donors[i]
        elif author.family.lower() in by_family:
            donor = by_family[author.family.lower()]
        if donor is not None:
            author = replace(author, affiliations=donor.affiliations)
        out.append(author)
    return tuple(out)


def merge_articles(a: Article, b: Article) -> Article:
    """Fold two records of the same DOI into one.

    Precedence: title, journal fields, date, volume/issue/pages and author
    names come from the Crossref-sourced side (any present value otherwise);
    abstract keeps the longer text, keywords union, citation_count the max,
    access the lower source_priority; sources union. Affiliations are filled
    per author from the non-anchor side when the anchor has none.
    """
    if a.doi != b.doi:
        raise ValueError(f"DOI mismatch: {a.doi} vs {b.doi}")
    anchor, other = _anchor_pair(a, b)

    authors = anchor.authors or other.authors
    donors = other.authors if authors is anchor.authors else anchor.authors
    authors = _fill_affiliations(authors, donors)

    abstract = anchor.abstract
    if (len(other.abstract or "")) > (len(abstract or "")):
        abstract = other.abstract

    keywords = list(anchor.native_keywords)
    keywords += [k for k in other.native_keywords if k not in keywords]

    counts = [
        x.citation_count for x in (anchor, other) if x.citation_count is not None
    ]
    scores = [x.relevance for x in (anchor, other) if x.relevance is not None]

    access = anchor.access
    if other.access.source_priority < access.source_priority:
        access = other.access

    return Article(
        doi=anchor.doi,
        title=anchor.title or other.title,
        authors=authors,
        journal_name=anchor.journal_name or other.journal_name,
        journal_issn=anchor.journal_issn or other.journal_issn,
        published_date=anchor.published_date or other.published_date,
        abstract=abstract,
        native_keywords=tuple(keywords),
        citation_count=max(counts) if counts else None,
        volume=anchor.volume or other.volume,
        issue=anchor.issue or other.issue,
        pages=anchor.pages or other.pages,
        access=access,
        sources=anchor.sources | other.sources,
        relevance=max(scores) if scores else None,
    )


def dedup_articles(articles: list[Article]) -> list[Article]:
    """Collapse duplicate DOIs left to right, keeping first-occurrence order."""
    merged: dict[str, Article] = {}
    for article in articles:
        if article.doi in merged:
            merged[article.doi] = merge_articles(merged[article.doi], article)
        else:
            merged[article.doi] = article
    return list(merged.values())
