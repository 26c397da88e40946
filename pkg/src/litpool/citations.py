"""Citation formatting (BibTeX, APA, MLA, Chicago, plain) and CSV/report export.

Style templates are documented with worked examples in docs/citation-styles.md.
All functions are pure and deterministic.
"""

from __future__ import annotations

import re
import unicodedata
from enum import Enum
from typing import Optional

from .analytics import AnalyticsSummary, Hotspot, stopwords
from .normalize import Article, Author

EN_DASH = "–"

CSV_HEADER = "doi,title,authors,journal,year,citations,oa,url"


class CitationStyle(Enum):
    BIBTEX = "bibtex"
    APA = "apa"
    MLA = "mla"
    CHICAGO = "chicago"
    PLAIN = "plain"


def _ascii_fold(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if c.isascii())


def _alnum(text: str) -> str:
    return re.sub(r"[^a-z0-9]", "", text.lower())


def _first_significant_word(title: str) -> str:
    stops = stopwords()
    for word in re.findall(r"[A-Za-z0-9]+", title):
        if word.lower() not in stops:
            return word.lower()
    return "untitled"


def _year_text(article: Article) -> Optional[str]:
    return str(article.year) if article.year else None


def _pages(article: Article, dash: str) -> Optional[str]:
    if not article.pages:
        return None
    return re.sub(r"\s*[-–—]+\s*", dash, article.pages.strip())


def _initials(given: str) -> str:
    parts = []
    for token in given.split():
        if "-" in token:
            parts.append(
                "-".join(f"{p[0].upper()}." for p in token.split("-") if p)
            )
        elif token:
            parts.append(f"{token[0].upper()}.")
    return " ".join(parts)


def bibtex_key(article: Article) -> str:
    family = _alnum(_ascii_fold(article.authors[0].family)) if article.authors else "anon"
    year = _year_text(article) or "nd"
    return f"{family}{year}{_alnum(_first_significant_word(article.title))}"


def _bibtex(article: Article) -> str:
    authors = " and ".join(
        f"{a.family}, {a.given}".strip(", ") for a in article.authors
    )
    fields = [("author", authors)] if authors else []
    fields += [
        ("title", f"{{{article.title}}}"),
        ("journal", article.journal_name),
    ]
    year = _year_text(article)
    if year:
        fields.append(("year", year))
    if article.volume:
        fields.append(("volume", article.volume))
    if article.issue:
        fields.append(("number", article.issue))
    pages = _pages(article, "--")
    if pages:
        fields.append(("pages", pages))
    fields.append(("doi", article.doi))
    body = ",\n".join(f"  {name} = {{{value}}}" for name, value in fields)
    return f"@article{{{bibtex_key(article)},\n{body}\n}}"


def _apa_authors(authors: tuple[Author, ...]) -> str:
    names = [f"{a.family}, {_initials(a.given)}".strip(", ").strip() for a in authors]
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + f", & {names[-1]}"


def _apa(article: Article) -> str:
    year = _year_text(article) or "n.d."
    out = f"{_apa_authors(article.authors)} ({year}). " if article.authors else f"({year}). "
    out += f"{article.title}. {article.journal_name}"
    if article.volume:
        out += f", {article.volume}"
        if article.issue:
            out += f"({article.issue})"
    pages = _pages(article, EN_DASH)
    if pages:
        out += f", {pages}"
    return f"{out}. https://doi.org/{article.doi}"


def _mla_authors(authors: tuple[Author, ...]) -> str:
    if not authors:
        return ""
    first = f"{authors[0].family}, {authors[0].given}".strip(", ")
    if len(authors) == 1:
        return first
    if len(authors) == 2:
        return f"{first}, and {authors[1].display()}"
    return f"{first}, et al."


def _mla(article: Article) -> str:
    parts = [f'"{article.title}." {article.journal_name}']
    if article.volume:
        parts.append(f"vol. {article.volume}")
    if article.issue:
        parts.append(f"no. {article.issue}")
    year = _year_text(article)
    if year:
        parts.append(year)
    pages = _pages(article, EN_DASH)
    if pages:
        parts.append(f"pp. {pages}")
    parts.append(f"doi:{article.doi}")
    authors = _mla_authors(article.authors)
    lead = ""
    if authors:
        lead = f"{authors} " if authors.endswith(".") else f"{authors}. "
    return f"{lead}{', '.join(parts)}."


def _chicago_authors(authors: tuple[Author, ...]) -> str:
    if not authors:
        return ""
    first = f"{authors[0].family}, {authors[0].given}".strip(", ")
    if len(authors) == 1:
        return first
    rest = [a.display() for a in authors[1:]]
    return f"{first}, and {rest[0]}" if len(rest) == 1 else (
        f"{first}, " + ", ".join(rest[:-1]) + f", and {rest[-1]}"
    )


def _chicago(article: Article) -> str:
    year = _year_text(article) or "n.d."
    year_part = year if year.endswith(".") else f"{year}."
    authors = _chicago_authors(article.authors)
    lead = f"{authors}. " if authors else ""
    out = f'{lead}{year_part} "{article.title}." {article.journal_name}'
    pages = _pages(article, EN_DASH)
    if article.volume:
        out += f" {article.volume}"
        if article.issue:
            out += f" ({article.issue})"
        if pages:
            out += f": {pages}"
    elif pages:
        out += f", {pages}"
    return f"{out}. https://doi.org/{article.doi}."


def _plain(article: Article) -> str:
    authors = ", ".join(a.display() for a in article.authors)
    year = _year_text(article) or "n.d."
    lead = f"{authors} ({year})" if authors else f"({year})"
    return f"{lead}. {article.title}. {article.journal_name}. doi:{article.doi}"


def format_citation(article: Article, style: CitationStyle) -> str:
    """Deterministic citation text for one article in the requested style."""
    formatter = {
        CitationStyle.BIBTEX: _bibtex,
        CitationStyle.APA: _apa,
        CitationStyle.MLA: _mla,
        CitationStyle.CHICAGO: _chicago,
        CitationStyle.PLAIN: _plain,
    }[style]
    return formatter(article)


def _csv_field(value: str) -> str:
    if any(c in value for c in ',"\n\r'):
        return '"' + value.replace('"', '""') + '"'
    return value


def _article_url(article: Article) -> str:
    return (
        article.access.pdf_url
        or article.access.landing_url
        or f"https://doi.org/{article.doi}"
    )


def export_csv(articles: list[Article]) -> str:
    """RFC 4180 CSV (CRLF line endings) with the fixed 8-column header."""
    lines = [CSV_HEADER]
    for a in articles:
        row = [
            a.doi,
            a.title,
            "; ".join(author.display() for author in a.authors),
            a.journal_name,
            _year_text(a) or "",
            str(a.citation_count) if a.citation_count is not None else "",
            "1" if a.access.is_oa else "0",
            _article_url(a),
        ]
        lines.append(",".join(_csv_field(f) for f in row))
    return "\r\n".join(lines) + "\r\n"


def _table(rows: list[tuple[str, int]], head: tuple[str, str]) -> list[str]:
    if not rows:
        return ["(none)"]
    out = [f"| {head[0]} | {head[1]} |", "| --- | --- |"]
    out += [f"| {label} | {count} |" for label, count in rows]
    return out


def export_report(
    articles: list[Article],
    analytics: AnalyticsSummary,
    query_echo: str,
    hotspots: Optional[list[Hotspot]] = None,
) -> str:
    """Markdown-compatible result report with fixed section order."""
    if hotspots is None:
        from .analytics import extract_hotspots

        hotspots = extract_hotspots(articles, 10)
    lines = [
        "# Search Report",
        "",
        "## Query",
        "",
        query_echo or "(none)",
        "",
        "## Results",
        "",
        f"{len(articles)} results",
        "",
        "## Top Hotspots",
        "",
    ]
    if hotspots:
        lines += ["| phrase | category | score | support |", "| --- | --- | --- | --- |"]
        lines += [
            f"| {h.phrase} | {h.category.name} | {h.score} | {h.support} |"
            for h in hotspots[:10]
        ]
    else:
        lines.append("(none)")
    lines += ["", "## Journal Distribution", ""]
    lines += _table(
        sorted(
            analytics.journal_distribution.items(), key=lambda kv: (-kv[1], kv[0])
        ),
        ("journal", "articles"),
    )
    lines += ["", "## Year Distribution", ""]
    lines += _table(sorted(analytics.year_distribution.items()), ("year", "articles"))
    lines += ["", "## Top Cited", ""]
    if analytics.top_cited:
        lines += [
            f"{i}. {title} ({doi}) — {count} citations"
            for i, (doi, title, count) in enumerate(analytics.top_cited, 1)
        ]
    else:
        lines.append("(none)")
    lines += ["", "## Articles", ""]
    if articles:
        lines += [
            f"{i}. {_plain(article)}" for i, article in enumerate(articles, 1)
        ]
    else:
        lines.append("(none)")
    return "\n".join(lines) + "\n"
