import csv
import io
import random
from pathlib import Path

import pytest

from litpool.analytics import compute_distributions, extract_hotspots
from litpool.citations import (
    CSV_HEADER,
    CitationStyle,
    bibtex_key,
    export_csv,
    export_report,
    format_citation,
)
from litpool.normalize import (
    AccessProvenance,
    Author,
    FullTextAccess,
    PartialDate,
)

from conftest import make_article, random_article

GOLDEN_DIR = Path(__file__).parent / "goldens" / "citations"


def citation_fixtures():
    return {
        "lovelace": make_article(
            doi="10.1287/mnsc.2024.0001",
            title="Digital Platforms",
            authors=(Author("Ada", "Lovelace"),),
            journal_name="Management Science",
            published=PartialDate(2024),
            volume="70",
            issue="3",
            pages="1-20",
        ),
        "alvarez": make_article(
            doi="10.1177/jm.2023.045",
            title="Pricing Strategies: Evidence from Online Retail",
            authors=(
                Author("José", "Álvarez-Cortés"),
                Author("Zoë", "Müller"),
            ),
            journal_name="Journal of Marketing",
            journal_issn="0022-2429",
            published=PartialDate(2023, 7),
            volume="88",
            issue="2",
            pages="45-67",
        ),
        "turing3": make_article(
            doi="10.1111/jofi.2022.0101",
            title="Computable Numbers in Market Design",
            authors=(
                Author("Alan", "Turing"),
                Author("Grace", "Hopper"),
                Author("Claude", "Shannon"),
            ),
            journal_name="Journal of Finance",
            journal_issn="0022-1082",
            published=PartialDate(2022),
            volume="77",
            issue="1",
            pages="101-142",
        ),
        "sparse": make_article(
            doi="10.25300/misq.2021.777",
            title="Networks Without Numbers",
            authors=(Author("Edith", "Clarke"),),
            journal_name="MIS Quarterly",
            journal_issn="0276-7783",
            published=PartialDate(2021),
        ),
        "undated": make_article(
            doi="10.2308/tar.9999",
            title="The Art of Auditing",
            authors=(Author("Donald", "Knuth"),),
            journal_name="The Accounting Review",
            journal_issn="0001-4826",
            published=None,
            volume="99",
            pages="12-34",
        ),
        "hyphen": make_article(
            doi="10.1002/smj.2020.1201",
            title="Diplomacy as Strategy",
            authors=(Author("Jean-Luc", "Picard"),),
            journal_name="Strategic Management Journal",
            journal_issn="0143-2095",
            published=PartialDate(2020),
            volume="41",
            issue="7",
            pages="1201-1230",
        ),
        "quartet": make_article(
            doi="10.1287/opre.2019.0888",
            title="Consensus Protocols for Supply Networks",
            authors=(
                Author("Barbara", "Liskov"),
                Author("Frances", "Allen"),
                Author("Radia", "Perlman"),
                Author("Margaret", "Hamilton"),
            ),
            journal_name="Operations Research",
            journal_issn="0030-364X",
            published=PartialDate(2019),
            volume="67",
            issue="4",
            pages="888-905",
        ),
        "adversarial": make_article(
            doi="10.1093/rfs/2024.555",
            title='Risk, Return, and "Alpha" in Hedge Funds',
            authors=(Author("Grace", "O'Malley-Smith"),),
            journal_name="Review of Financial Studies",
            journal_issn="0893-9454",
            published=PartialDate(2024),
            volume="37",
            issue="5",
            pages="2001-2055",
        ),
        "volonly": make_article(
            doi="10.1287/mksc.2025.0015",
            title="Entropy Pricing",
            authors=(Author("Claude", "Shannon"),),
            journal_name="Marketing Science",
            journal_issn="0732-2399",
            published=PartialDate(2025),
            volume="44",
            pages="15-38",
        ),
        "anon": make_article(
            doi="10.5465/amr.2023.0001",
            title="Editorial: The State of the Field",
            authors=(),
            journal_name="Academy of Management Review",
            journal_issn="0363-0425",
            published=PartialDate(2023),
            volume="48",
            issue="2",
        ),
    }


@pytest.mark.parametrize("style", list(CitationStyle))
@pytest.mark.parametrize("name", sorted(citation_fixtures()))
def test_golden_citations(name, style):
    article = citation_fixtures()[name]
    golden = (GOLDEN_DIR / f"{name}.{style.value}.txt").read_text(encoding="utf-8")
    assert format_citation(article, style) + "\n" == golden


def test_spec_worked_example_apa_and_bibtex():
    article = citation_fixtures()["lovelace"]
    assert format_citation(article, CitationStyle.APA) == (
        "Lovelace, A. (2024). Digital Platforms. Management Science, 70(3), "
        "1–20. https://doi.org/10.1287/mnsc.2024.0001"
    )
    assert bibtex_key(article) == "lovelace2024digital"
    assert "pages = {1--20}" in format_citation(article, CitationStyle.BIBTEX)


def test_bibtex_omits_absent_fields():
    text = format_citation(citation_fixtures()["sparse"], CitationStyle.BIBTEX)
    assert "volume" not in text
    assert "number" not in text
    assert "pages" not in text


def test_no_empty_punctuation_slots():
    rng = random.Random(41)
    articles = list(citation_fixtures().values()) + [
        random_article(rng, f"10.5555/p.{i}", crossref=True) for i in range(40)
    ]
    for article in articles:
        for style in CitationStyle:
            text = format_citation(article, style)
            assert "()" not in text, (style, text)
            assert ", ," not in text, (style, text)
            assert ",," not in text, (style, text)
            if style is not CitationStyle.BIBTEX:  # bibtex indents fields
                assert "  " not in text, (style, text)
            assert ".." not in text.replace("...", ""), (style, text)


# --- independent BibTeX grammar ----------------------------------------------


def parse_bibtex(entry: str) -> dict:
    """Minimal independent BibTeX grammar: entry type, key, brace-balanced
    field values."""
    assert entry.startswith("@article{")
    body = entry[len("@article{"):].rstrip()
    assert body.endswith("}")
    body = body[:-1]
    key, _, rest = body.partition(",")
    fields = {"_key": key.strip()}
    i = 0
    while i < len(rest):
        eq = rest.find("=", i)
        if eq == -1:
            break
        name = rest[i:eq].strip().strip(",").strip()
        j = rest.find("{", eq)
        depth = 0
        for k in range(j, len(rest)):
            if rest[k] == "{":
                depth += 1
            elif rest[k] == "}":
                depth -= 1
                if depth == 0:
                    fields[name] = rest[j + 1 : k]
                    i = k + 1
                    break
        else:
            raise ValueError("unbalanced braces")
    return fields


def test_bibtex_round_trip_through_independent_grammar():
    for name, article in citation_fixtures().items():
        fields = parse_bibtex(format_citation(article, CitationStyle.BIBTEX))
        assert fields["_key"] == bibtex_key(article)
        assert fields["journal"] == article.journal_name
        assert fields["doi"] == article.doi
        # the double-braced title recovers exactly one brace layer
        assert fields["title"] == "{" + article.title + "}"
        if article.year:
            assert fields["year"] == str(article.year)
        else:
            assert "year" not in fields
        if article.authors:
            parsed_authors = [a.strip() for a in fields["author"].split(" and ")]
            expected = [
                f"{a.family}, {a.given}".strip(", ") for a in article.authors
            ]
            assert parsed_authors == expected
        else:
            assert "author" not in fields


# --- CSV export ---------------------------------------------------------------


def test_csv_empty_is_header_only():
    assert export_csv([]) == CSV_HEADER + "\r\n"


def test_csv_quotes_commas():
    article = make_article(title="Risk, Return")
    line = export_csv([article]).split("\r\n")[1]
    assert '"Risk, Return"' in line


def test_csv_round_trip_independent_reader():
    articles = [
        make_article(
            doi="10.5555/csv.1",
            title='He said "hi", twice',
            authors=(Author("Ada", "Lovelace"), Author("Grace", "Hopper")),
        ),
        make_article(
            doi="10.5555/csv.2",
            title="Line\nbreak and ümlaut, plus comma",
            citation_count=7,
            access=FullTextAccess(
                is_oa=True,
                landing_url="https://x.org/2",
                pdf_url="https://x.org/2.pdf",
                provenance=AccessProvenance.UNPAYWALL,
                source_priority=1,
            ),
        ),
        make_article(doi="10.5555/csv.3", title="plain", published=None),
    ]
    text = export_csv(articles)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == CSV_HEADER.split(",")
    assert len(rows) == 4
    for article, row in zip(articles, rows[1:]):
        assert len(row) == 8
        assert row[0] == article.doi
        assert row[1] == article.title
        assert row[2] == "; ".join(a.display() for a in article.authors)
        assert row[4] == (str(article.year) if article.year else "")
        assert row[6] == ("1" if article.access.is_oa else "0")
    assert rows[2][7] == "https://x.org/2.pdf"  # pdf link preferred
    assert rows[3][7] == "https://doi.org/10.5555/csv.3"


def test_csv_round_trip_randomized():
    rng = random.Random(77)
    articles = [random_article(rng, f"10.5555/r.{i}", True) for i in range(60)]
    rows = list(csv.reader(io.StringIO(export_csv(articles))))
    assert len(rows) == 61
    assert [r[0] for r in rows[1:]] == [a.doi for a in articles]


# --- report export --------------------------------------------------------------


REPORT_HEADINGS = [
    "# Search Report",
    "## Query",
    "## Results",
    "## Top Hotspots",
    "## Journal Distribution",
    "## Year Distribution",
    "## Top Cited",
    "## Articles",
]


def test_report_empty_has_all_headings():
    report = export_report([], compute_distributions([]), "q=none")
    for heading in REPORT_HEADINGS:
        assert heading in report
    assert "0 results" in report
    assert report.count("(none)") >= 4


def test_report_lists_hotspots_and_citations():
    articles = [
        make_article(
            doi=f"10.5555/rep.{i}",
            title="Games in the Supply Chain",
            abstract="We model supply chain games.",
            citation_count=i,
        )
        for i in range(4)
    ]
    analytics = compute_distributions(articles)
    hotspots = extract_hotspots(articles, 10)
    report = export_report(articles, analytics, "q=supply", hotspots)
    assert "| supply chain |" in report
    assert "4 results" in report
    assert report.count("doi:10.5555/rep.") == 4


def test_report_deterministic():
    articles = [make_article(doi="10.5555/rep.42", abstract="stable text")]
    analytics = compute_distributions(articles)
    first = export_report(articles, analytics, "q=x")
    second = export_report(articles, analytics, "q=x")
    assert first == second
