"""Result-set analytics: hotspot phrases, distributions, and method signals.

All operations are pure functions of the article list. Stopwords, category
lexicons, and method pattern lists ship as editable data files under
data/analytics/ (one term per line, # comments).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import TYPE_CHECKING, Callable, Optional

from .normalize import Article

if TYPE_CHECKING:
    from .registry import Registry

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class Category(Enum):
    AI_ALGORITHMS = "ai_algorithms"
    CONSUMER_MARKET = "consumer_market"
    OPERATIONS_SUPPLY_CHAIN = "operations_supply_chain"
    FINANCE_ACCOUNTING = "finance_accounting"
    STRATEGY_ORGANIZATION = "strategy_organization"
    OTHER = "other"


class MethodName(Enum):
    EXPERIMENT = "experiment"
    SURVEY = "survey"
    ECONOMETRIC = "econometric"
    ANALYTICAL_MODEL = "analytical_model"
    MACHINE_LEARNING = "machine_learning"
    QUALITATIVE = "qualitative"


@dataclass(frozen=True)
class Hotspot:
    phrase: str
    score: int
    category: Category
    support: int


@dataclass(frozen=True)
class MethodSignal:
    name: MethodName
    matched_patterns: tuple[str, ...]


@dataclass(frozen=True)
class ScoringConfig:
    """Hotspot scoring constants; shipped defaults, overridable per call."""

    title_weight: int = 2
    abstract_weight: int = 1
    keyword_weight: int = 2
    min_support: int = 2
    small_corpus: int = 5  # below this many articles the support floor is 1
    max_ngram: int = 3


DEFAULT_SCORING = ScoringConfig()

# Optional post-processing hook for hotspot label rewriting (e.g. an LLM
# summarizer). Receives and returns the ranked hotspot list; none ships.
HotspotRewriter = Callable[[list[Hotspot]], list[Hotspot]]


@dataclass(frozen=True)
class AnalyticsSummary:
    journal_distribution: dict[str, int]
    category_distribution: dict[str, int]
    year_distribution: dict[str, int]
    keyword_distribution: dict[str, int]
    top_affiliations: list[tuple[str, int]]
    method_signals: dict[str, int]
    top_cited: list[tuple[str, str, int]]
    abstract_coverage: float
    affiliation_coverage: float

    @classmethod
    def empty(cls) -> "AnalyticsSummary":
        return cls({}, {}, {}, {}, [], {}, [], 0.0, 0.0)


def _read_terms(name: str) -> tuple[str, ...]:
    text = resources.files("litpool").joinpath(f"data/analytics/{name}").read_text(
        encoding="utf-8"
    )
    terms = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.append(line.lower())
    return tuple(terms)


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    return frozenset(_read_terms("stopwords.txt"))


@lru_cache(maxsize=1)
def category_lexicons() -> tuple[tuple[Category, frozenset[str]], ...]:
    # fixed order resolves multi-lexicon hits
    return tuple(
        (cat, frozenset(_read_terms(f"lexicon_{cat.value}.txt")))
        for cat in (
            Category.AI_ALGORITHMS,
            Category.CONSUMER_MARKET,
            Category.OPERATIONS_SUPPLY_CHAIN,
            Category.FINANCE_ACCOUNTING,
            Category.STRATEGY_ORGANIZATION,
        )
    )


@lru_cache(maxsize=1)
def method_patterns() -> tuple[tuple[MethodName, tuple[str, ...]], ...]:
    return tuple(
        (name, _read_terms(f"method_{name.value}.txt")) for name in MethodName
    )


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumerics; stopwords are kept."""
    return _TOKEN_RE.findall(text.lower())


def categorize_phrase(phrase: str) -> Category:
    """First category (fixed lexicon order) containing any word of the phrase."""
    words = tokenize(phrase)
    for category, lexicon in category_lexicons():
        if any(w in lexicon for w in words):
            return category
    return Category.OTHER


def _ngrams(tokens: list[str], max_n: int) -> dict[tuple[str, ...], int]:
    """Overlapping n-gram occurrence counts whose ends are not stopwords."""
    stops = stopwords()
    counts: dict[tuple[str, ...], int] = {}
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            gram = tuple(tokens[i : i + n])
            if gram[0] in stops or gram[-1] in stops:
                continue
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def _keyword_phrase(keyword: str, max_n: int) -> Optional[str]:
    """Normalize a native keyword into a candidate phrase, or None."""
    stops = stopwords()
    tokens = tokenize(keyword)
    while tokens and tokens[0] in stops:
        tokens = tokens[1:]
    while tokens and tokens[-1] in stops:
        tokens = tokens[:-1]
    if not tokens or len(tokens) > max_n:
        return None
    return " ".join(tokens)


def extract_hotspots(
    articles: list[Article],
    k: int,
    config: ScoringConfig = DEFAULT_SCORING,
    rewriter: Optional[HotspotRewriter] = None,
) -> list[Hotspot]:
    """Top-k scored phrases from titles, abstracts, and native keywords.

    score(phrase) = sum over articles of
        (title_weight * title occurrences + abstract_weight * abstract
        occurrences) * phrase length in words,
    plus keyword_weight * (number of articles listing the phrase as a native
    keyword). Support is the number of articles containing the phrase in
    text or keywords; phrases below the support floor are dropped. Ties
    break alphabetically.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not articles:
        return []

    scores: dict[str, int] = {}
    supports: dict[str, int] = {}
    kw_freq: dict[str, int] = {}

    for article in articles:
        title_counts = _ngrams(tokenize(article.title), config.max_ngram)
        abstract_counts = _ngrams(
            tokenize(article.abstract or ""), config.max_ngram
        )
        seen: set[str] = set()
        for gram in title_counts.keys() | abstract_counts.keys():
            phrase = " ".join(gram)
            weight = (
                config.title_weight * title_counts.get(gram, 0)
                + config.abstract_weight * abstract_counts.get(gram, 0)
            )
            scores[phrase] = scores.get(phrase, 0) + weight * len(gram)
            seen.add(phrase)
        kw_seen: set[str] = set()
        for keyword in article.native_keywords:
            phrase = _keyword_phrase(keyword, config.max_ngram)
            if phrase is not None:
                kw_seen.add(phrase)
        for phrase in kw_seen:
            kw_freq[phrase] = kw_freq.get(phrase, 0) + 1
        for phrase in seen | kw_seen:
            supports[phrase] = supports.get(phrase, 0) + 1

    for phrase, freq in kw_freq.items():
        scores[phrase] = scores.get(phrase, 0) + config.keyword_weight * freq

    floor = 1 if len(articles) < config.small_corpus else config.min_support
    ranked = sorted(
        (
            (phrase, score)
            for phrase, score in scores.items()
            if score > 0 and supports[phrase] >= floor
        ),
        key=lambda item: (-item[1], item[0]),
    )
    hotspots = [
        Hotspot(
            phrase=phrase,
            score=score,
            category=categorize_phrase(phrase),
            support=supports[phrase],
        )
        for phrase, score in ranked[:k]
    ]
    if rewriter is not None:
        hotspots = rewriter(hotspots)
    return hotspots


def _phrase_in_tokens(phrase_tokens: tuple[str, ...], tokens: list[str]) -> bool:
    n = len(phrase_tokens)
    return any(
        tuple(tokens[i : i + n]) == phrase_tokens
        for i in range(len(tokens) - n + 1)
    )


def article_contains_phrase(article: Article, phrase: str) -> bool:
    """True when the phrase occurs in the article's title/abstract tokens or
    matches one of its normalized native keywords."""
    phrase_tokens = tuple(phrase.split(" "))
    if _phrase_in_tokens(phrase_tokens, tokenize(article.title)):
        return True
    if article.abstract and _phrase_in_tokens(
        phrase_tokens, tokenize(article.abstract)
    ):
        return True
    normalized = {
        _keyword_phrase(kw, DEFAULT_SCORING.max_ngram)
        for kw in article.native_keywords
    }
    return phrase in normalized


def detect_method_signals(article: Article) -> list[MethodSignal]:
    """Case-insensitive substring scan of title+abstract for method patterns."""
    text = f"{article.title} {article.abstract or ''}".lower()
    signals = []
    for name, patterns in method_patterns():
        matched = tuple(p for p in patterns if p in text)
        if matched:
            signals.append(MethodSignal(name=name, matched_patterns=matched))
    return signals


def top_authors(articles: list[Article], k: int) -> list[tuple[str, int]]:
    """Authors ranked by article count (desc), name (asc); one count per article."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: dict[str, int] = {}
    for article in articles:
        for name in {a.key() for a in article.authors if a.key()}:
            counts[name] = counts.get(name, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def _rank(counts: dict[str, int], limit: Optional[int] = None) -> list[tuple[str, int]]:
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:limit] if limit else ranked


def compute_distributions(
    articles: list[Article],
    registry: Optional["Registry"] = None,
    hotspots: Optional[list[Hotspot]] = None,
) -> AnalyticsSummary:
    """All eight distribution objects in one pass over the article list.

    Article categories are the categories of hotspots the article matches,
    falling back to its journal's registry category (or OTHER without a
    registry). keyword_distribution counts articles per label over native
    keywords plus the top-20 hotspot phrases.
    """
    if not articles:
        return AnalyticsSummary.empty()
    if hotspots is None:
        hotspots = extract_hotspots(articles, 20)

    journal_dist: dict[str, int] = {}
    year_dist: dict[str, int] = {}
    category_dist: dict[str, int] = {}
    keyword_dist: dict[str, int] = {}
    affiliation_counts: dict[str, int] = {}
    method_counts: dict[str, int] = {}
    cited: list[tuple[str, str, int]] = []
    with_abstract = 0
    with_affiliation = 0

    keyword_labels: set[str] = {h.phrase for h in hotspots}
    for article in articles:
        for keyword in article.native_keywords:
            phrase = _keyword_phrase(keyword, DEFAULT_SCORING.max_ngram)
            if phrase:
                keyword_labels.add(phrase)

    for article in articles:
        journal_dist[article.journal_name] = (
            journal_dist.get(article.journal_name, 0) + 1
        )
        year = str(article.year) if article.year else "unknown"
        year_dist[year] = year_dist.get(year, 0) + 1

        matched = {
            h.category for h in hotspots if article_contains_phrase(article, h.phrase)
        }
        if matched:
            labels = {c.name for c in matched}
        elif registry is not None and registry.resolve_issn(article.journal_issn):
            labels = {registry.resolve_issn(article.journal_issn).category}
        else:
            labels = {Category.OTHER.name}
        for label in labels:
            category_dist[label] = category_dist.get(label, 0) + 1

        for label in keyword_labels:
            if article_contains_phrase(article, label):
                keyword_dist[label] = keyword_dist.get(label, 0) + 1

        affs = {aff for author in article.authors for aff in author.affiliations}
        for aff in affs:
            affiliation_counts[aff] = affiliation_counts.get(aff, 0) + 1
        if affs:
            with_affiliation += 1
        if article.abstract:
            with_abstract += 1

        for signal in detect_method_signals(article):
            method_counts[signal.name.name] = (
                method_counts.get(signal.name.name, 0) + 1
            )

        if article.citation_count is not None:
            cited.append((article.doi, article.title, article.citation_count))

    cited.sort(key=lambda row: (-row[2], row[0]))
    n = len(articles)
    return AnalyticsSummary(
        journal_distribution=dict(_rank(journal_dist)),
        category_distribution=dict(_rank(category_dist)),
        year_distribution=dict(sorted(year_dist.items())),
        keyword_distribution=dict(_rank(keyword_dist)),
        top_affiliations=_rank(affiliation_counts, 10),
        method_signals=dict(_rank(method_counts)),
        top_cited=cited[:10],
        abstract_coverage=with_abstract / n,
        affiliation_coverage=with_affiliation / n,
    )
