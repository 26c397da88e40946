import random
import re

import pytest

from litpool.analytics import (
    Category,
    MethodName,
    categorize_phrase,
    compute_distributions,
    detect_method_signals,
    extract_hotspots,
    stopwords,
    top_authors,
)
from litpool.normalize import Author

from conftest import make_article

TOKEN = re.compile(r"[a-z0-9]+")


# --- independent brute-force hotspot oracle ---------------------------------


def oracle_hotspots(articles, k):
    """Full candidate enumeration with the stated score formula, implemented
    phrase-by-phrase instead of in one accumulation pass."""
    stops = stopwords()

    def toks(text):
        return TOKEN.findall((text or "").lower())

    def occurrences(phrase, tokens):
        p = phrase.split(" ")
        return sum(
            1 for i in range(len(tokens) - len(p) + 1) if tokens[i : i + len(p)] == p
        )

    def trim(keyword):
        words = toks(keyword)
        while words and words[0] in stops:
            words.pop(0)
        while words and words[-1] in stops:
            words.pop()
        return " ".join(words) if 0 < len(words) <= 3 else None

    candidates = set()
    for article in articles:
        for stream in (toks(article.title), toks(article.abstract)):
            for n in (1, 2, 3):
                for i in range(len(stream) - n + 1):
                    gram = stream[i : i + n]
                    if gram[0] not in stops and gram[-1] not in stops:
                        candidates.add(" ".join(gram))
        for keyword in article.native_keywords:
            phrase = trim(keyword)
            if phrase:
                candidates.add(phrase)

    floor = 1 if len(articles) < 5 else 2
    rows = []
    for phrase in candidates:
        length = len(phrase.split(" "))
        score = 0
        support = 0
        for article in articles:
            t = occurrences(phrase, toks(article.title))
            a = occurrences(phrase, toks(article.abstract))
            score += (2 * t + a) * length
            keywords = {trim(kw) for kw in article.native_keywords}
            if phrase in keywords:
                score += 2
            if t or a or phrase in keywords:
                support += 1
        if score > 0 and support >= floor:
            rows.append((phrase, score, support))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows[:k]


def seeded_corpus(n=50, seed=3):
    """Synthetic corpus where 'supply chain' dominates by construction."""
    rng = random.Random(seed)
    fillers = [
        "pricing under uncertainty",
        "consumer trust online",
        "platform competition dynamics",
        "audit committee oversight",
        "employee turnover drivers",
    ]
    articles = []
    for i in range(n):
        filler = rng.choice(fillers)
        if i < 30:
            title = f"Supply Chain Coordination and {filler.title()}"
            abstract = (
                f"This paper examines supply chain design. We link supply chain "
                f"flows to {filler} using field data."
            )
        else:
            title = f"A Study of {filler.title()}"
            abstract = f"We analyze {filler} with archival data."
        articles.append(
            make_article(
                doi=f"10.5555/seeded.{i:03d}",
                title=title,
                abstract=abstract,
                native_keywords=("Operations Strategy",) if i % 4 == 0 else (),
            )
        )
    return articles


def test_extract_hotspots_empty():
    assert extract_hotspots([], 10) == []


def test_seeded_dominant_phrase_ranks_first():
    articles = seeded_corpus()
    hotspots = extract_hotspots(articles, 10)
    assert hotspots[0].phrase == "supply chain"
    assert hotspots[0].support == 30
    assert hotspots[0].category is Category.OPERATIONS_SUPPLY_CHAIN


def test_hotspots_match_oracle_on_seeded_corpus():
    articles = seeded_corpus()
    expected = oracle_hotspots(articles, 10)
    actual = [(h.phrase, h.score, h.support) for h in extract_hotspots(articles, 10)]
    assert actual == expected


def test_hotspots_match_oracle_small_support_floor():
    articles = seeded_corpus(n=4)  # below the small-corpus threshold
    expected = oracle_hotspots(articles, 8)
    actual = [(h.phrase, h.score, h.support) for h in extract_hotspots(articles, 8)]
    assert actual == expected


def test_five_supply_chain_titles():
    # stopwords break phrase continuity, so no longer n-gram can outrank here
    articles = [
        make_article(
            doi=f"10.5555/sc.{i}", title="Games in the Supply Chain", abstract=None
        )
        for i in range(5)
    ]
    top = extract_hotspots(articles, 3)[0]
    assert top.phrase == "supply chain"
    assert top.support == 5
    assert top.category is Category.OPERATIONS_SUPPLY_CHAIN


def test_equal_scores_break_alphabetically():
    # "gamma" scores 2*1*1 per title; "alpha beta" scores 1*2 per abstract
    articles = [
        make_article(
            doi=f"10.5555/tie.{i}",
            title="Gamma Results",
            abstract="notes on alpha beta effects",
        )
        for i in range(2)
    ]
    phrases = [h.phrase for h in extract_hotspots(articles, 20)]
    assert phrases.index("alpha beta") < phrases.index("gamma")
    scores = {h.phrase: h.score for h in extract_hotspots(articles, 20)}
    assert scores["alpha beta"] == scores["gamma"]


def test_keyword_candidates_added_with_frequency_score():
    articles = [
        make_article(
            doi=f"10.5555/kw.{i}",
            title="Untitled Findings",
            abstract=None,
            native_keywords=("Behavioral Economics",),
        )
        for i in range(3)
    ]
    hotspots = {h.phrase: h for h in extract_hotspots(articles, 10)}
    assert hotspots["behavioral economics"].score == 2 * 3
    assert hotspots["behavioral economics"].support == 3


def test_rewriter_hook_applied():
    articles = seeded_corpus(6)
    relabeled = extract_hotspots(
        articles, 5, rewriter=lambda hs: list(reversed(hs))
    )
    plain = extract_hotspots(articles, 5)
    assert relabeled == list(reversed(plain))


def test_hotspot_invariants_hold():
    for hotspot in extract_hotspots(seeded_corpus(), 25):
        words = hotspot.phrase.split(" ")
        assert 1 <= len(words) <= 3
        assert words[0] not in stopwords() and words[-1] not in stopwords()
        assert hotspot.score > 0 and hotspot.support >= 1


@pytest.mark.parametrize(
    "phrase,expected",
    [
        ("machine learning", Category.AI_ALGORITHMS),
        ("quarterly earnings", Category.FINANCE_ACCOUNTING),
        ("zebra migration", Category.OTHER),
        ("supply chain", Category.OPERATIONS_SUPPLY_CHAIN),
        ("brand loyalty", Category.CONSUMER_MARKET),
        ("corporate governance", Category.STRATEGY_ORGANIZATION),
    ],
)
def test_categorize_phrase(phrase, expected):
    assert categorize_phrase(phrase) is expected


def test_category_order_resolves_multi_lexicon_hits():
    # "model" (AI/Algorithms) and "pricing" (Finance/Accounting) both hit;
    # the fixed category order wins
    assert categorize_phrase("pricing model") is Category.AI_ALGORITHMS


def test_categorize_is_total():
    for phrase in ("", "   ", "éclair", "42", "model"):
        assert isinstance(categorize_phrase(phrase), Category)


# --- distributions -----------------------------------------------------------


def test_distributions_empty():
    summary = compute_distributions([])
    assert summary.journal_distribution == {}
    assert summary.abstract_coverage == 0.0
    assert summary.affiliation_coverage == 0.0
    assert summary.top_cited == []


def test_abstract_coverage_fraction():
    articles = [
        make_article(doi="10.5555/c.1", abstract="text"),
        make_article(doi="10.5555/c.2", abstract="more text"),
        make_article(doi="10.5555/c.3", abstract=None),
    ]
    assert compute_distributions(articles).abstract_coverage == pytest.approx(2 / 3)


def test_year_distribution_sums_to_n():
    articles = seeded_corpus(17)
    summary = compute_distributions(articles)
    assert sum(summary.year_distribution.values()) == 17


def test_distributions_match_brute_force_tally(registry):
    articles = [
        make_article(
            doi=f"10.5555/d.{i}",
            title=f"Pricing and Risk {i % 3}",
            abstract="We run a survey of respondents." if i % 2 else None,
            journal_name="Management Science" if i % 3 else "Journal of Marketing",
            journal_issn="0025-1909" if i % 3 else "0022-2429",
            citation_count=i * 3 if i % 4 else None,
            authors=(Author("Ada", "Lovelace", ("MIT",) if i % 2 else ()),),
        )
        for i in range(12)
    ]
    summary = compute_distributions(articles, registry)

    journals = {}
    for a in articles:
        journals[a.journal_name] = journals.get(a.journal_name, 0) + 1
    assert summary.journal_distribution == journals

    years = {}
    for a in articles:
        years[str(a.year)] = years.get(str(a.year), 0) + 1
    assert summary.year_distribution == years

    expected_cited = sorted(
        (
            (a.doi, a.title, a.citation_count)
            for a in articles
            if a.citation_count is not None
        ),
        key=lambda r: (-r[2], r[0]),
    )[:10]
    assert summary.top_cited == expected_cited

    with_aff = sum(
        1 for a in articles if any(au.affiliations for au in a.authors)
    )
    assert summary.affiliation_coverage == pytest.approx(with_aff / 12)
    assert summary.top_affiliations[0] == ("MIT", with_aff)

    surveys = sum(1 for a in articles if a.abstract)
    assert summary.method_signals.get("SURVEY", 0) == surveys


def test_category_fallback_uses_journal_category(registry):
    # the odd article's words stay below the support floor, so it matches no
    # hotspot and falls back to its registry category
    crowd = [
        make_article(
            doi=f"10.5555/f.{i}",
            title="Posted Pricing and Risk",
            abstract="We study pricing and risk in markets.",
        )
        for i in range(5)
    ]
    outlier = make_article(
        doi="10.5555/f.odd",
        title="Zzz Qqq",
        abstract=None,
        journal_name="Journal of Finance",
        journal_issn="0022-1082",
    )
    summary = compute_distributions(crowd + [outlier], registry)
    assert summary.category_distribution.get("Finance") == 1
    # without a registry the fallback label is OTHER instead
    without_registry = compute_distributions(crowd + [outlier])
    assert "Finance" not in without_registry.category_distribution
    assert (
        without_registry.category_distribution.get("OTHER", 0)
        == summary.category_distribution.get("OTHER", 0) + 1
    )


def test_top_cited_capped_at_ten():
    articles = [
        make_article(doi=f"10.5555/t.{i:02d}", citation_count=i) for i in range(14)
    ]
    summary = compute_distributions(articles)
    assert len(summary.top_cited) == 10
    assert summary.top_cited[0][2] == 13


# --- method signals ----------------------------------------------------------


def test_method_signals_two_hits():
    article = make_article(
        abstract="a randomized experiment with panel data", title="Plain Title"
    )
    names = {s.name for s in detect_method_signals(article)}
    assert names == {MethodName.EXPERIMENT, MethodName.ECONOMETRIC}
    for signal in detect_method_signals(article):
        assert signal.matched_patterns


def test_method_signals_none():
    article = make_article(title="Plain Title", abstract=None)
    assert detect_method_signals(article) == []


def test_method_signal_counts_match_scan(corpus, registry):
    from fake_upstream import crossref_work
    from litpool.normalize import RawRecord, Source, normalize_record

    articles = []
    for item in corpus.pool_articles()[:40]:
        if item.broken_title or item.broken_date or item.crossref_issns:
            continue
        articles.append(
            normalize_record(
                RawRecord(source=Source.CROSSREF, payload=crossref_work(item, "")),
                registry,
            )
        )
    summary = compute_distributions(articles)
    for name, patterns in (
        (MethodName.EXPERIMENT, ("experiment", "randomized", "rct", "treatment group")),
        (MethodName.SURVEY, ("survey", "questionnaire", "respondents")),
    ):
        expected = sum(
            1
            for a in articles
            if any(p in f"{a.title} {a.abstract or ''}".lower() for p in patterns)
        )
        assert summary.method_signals.get(name.name, 0) == expected


# --- author leaderboard -------------------------------------------------------


def test_top_authors_single_article():
    article = make_article(
        authors=(Author("Grace", "Hopper"), Author("Ada", "Lovelace"))
    )
    assert top_authors([article], 5) == [("Hopper, Grace", 1), ("Lovelace, Ada", 1)]


def test_top_authors_counts_once_per_article():
    dup = make_article(
        doi="10.5555/a.1",
        authors=(Author("Ada", "Lovelace"), Author("Ada", "Lovelace")),
    )
    assert top_authors([dup], 3) == [("Lovelace, Ada", 1)]


def test_top_authors_rank_by_count_then_name():
    articles = [
        make_article(doi=f"10.5555/r.{i}", authors=(Author("Ada", "Lovelace"),))
        for i in range(3)
    ] + [
        make_article(doi=f"10.5555/s.{i}", authors=(Author("Alan", "Turing"),))
        for i in range(2)
    ]
    assert top_authors(articles, 2) == [("Lovelace, Ada", 3), ("Turing, Alan", 2)]
    assert top_authors(articles, 1) == [("Lovelace, Ada", 3)]


def test_top_authors_k_validated():
    with pytest.raises(ValueError):
        top_authors([], 0)
