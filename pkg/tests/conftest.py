from __future__ import annotations

import random
from datetime import date
from typing import Optional

import httpx
import pytest

from litpool.clients import ClientConfig, FixtureMode, SourceClients
from litpool.normalize import (
    AccessProvenance,
    Article,
    Author,
    FullTextAccess,
    PartialDate,
    Source,
)
from litpool.registry import Registry, load_registry_file

from fake_upstream import Corpus, FakeUpstream, build_corpus

TODAY = date(2025, 6, 30)  # corpus recent-cluster anchor


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"[ACCEPTANCE] {status} {name}")


@pytest.fixture(scope="session")
def registry() -> Registry:
    return load_registry_file()


@pytest.fixture(scope="session")
def corpus(registry) -> Corpus:
    return build_corpus(registry, today=TODAY)


@pytest.fixture
def upstream(corpus, registry) -> FakeUpstream:
    return FakeUpstream(corpus, registry)


def make_clients(
    upstream: FakeUpstream,
    core_key: Optional[str] = None,
    **config_overrides,
) -> SourceClients:
    config = ClientConfig(
        contact_email="tests@example.org",
        per_host_rate=1e6,
        backoff_base=0.0001,
        core_api_key=core_key,
        **config_overrides,
    )
    return SourceClients(
        config,
        transport=httpx.MockTransport(upstream.handler),
        sleep=lambda _s: None,
    )


@pytest.fixture
def clients(upstream) -> SourceClients:
    built = make_clients(upstream)
    yield built
    built.close()


def make_article(
    doi: str = "10.5555/test.0001",
    title: str = "A Study of Things",
    authors: tuple[Author, ...] = (Author("Ada", "Lovelace"),),
    journal_name: str = "Management Science",
    journal_issn: str = "0025-1909",
    published: Optional[PartialDate] = PartialDate(2024, 3, 15),
    sources: frozenset[Source] = frozenset({Source.CROSSREF}),
    **kwargs,
) -> Article:
    return Article(
        doi=doi,
        title=title,
        authors=authors,
        journal_name=journal_name,
        journal_issn=journal_issn,
        published_date=published,
        sources=sources,
        **kwargs,
    )


def random_article(rng: random.Random, doi: str, crossref: bool) -> Article:
    """Arbitrary valid article for merge/dedup torture tests."""
    maybe = lambda v: v if rng.random() < 0.7 else None  # noqa: E731
    n_authors = rng.randint(0, 3)
    authors = tuple(
        Author(
            given=rng.choice(["Ada", "Grace", "Alan", ""]),
            family=rng.choice(["Lovelace", "Hopper", "Turing", "Liskov"]),
            affiliations=tuple(
                rng.sample(["MIT", "Stanford", "INSEAD"], rng.randint(0, 2))
            ),
        )
        for _ in range(n_authors)
    )
    access = FullTextAccess.unknown()
    if rng.random() < 0.4:
        access = FullTextAccess(
            is_oa=True,
            landing_url=f"https://x.org/{doi}",
            pdf_url=maybe(f"https://x.org/{doi}.pdf"),
            provenance=rng.choice(
                [AccessProvenance.UNPAYWALL, AccessProvenance.CORE]
            ),
            source_priority=rng.choice([1, 2]),
        )
    return Article(
        doi=doi,
        title=rng.choice(
            ["Platforms", "Supply Chains", "Pricing Dynamics", "Risk Models"]
        ),
        authors=authors,
        journal_name=rng.choice(["Management Science", "Journal of Marketing"]),
        journal_issn=rng.choice(["0025-1909", "0022-2429"]),
        published_date=PartialDate(
            rng.randint(2015, 2025), rng.choice([None, rng.randint(1, 12)])
        ),
        abstract=maybe("An abstract about " + rng.choice(["ai", "markets", "ops"])),
        native_keywords=tuple(
            rng.sample(["Marketing", "Finance", "Strategy", "AI"], rng.randint(0, 3))
        ),
        citation_count=maybe(rng.randint(0, 500)),
        volume=maybe(str(rng.randint(1, 80))),
        issue=maybe(str(rng.randint(1, 6))),
        pages=maybe(f"{rng.randint(1, 400)}-{rng.randint(401, 900)}"),
        access=access,
        sources=frozenset({Source.CROSSREF if crossref else Source.OPENALEX}),
        relevance=maybe(round(rng.uniform(0, 40), 2)),
    )
