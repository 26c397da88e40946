#!/usr/bin/env python3
"""Regenerate the committed offline fixture snapshot under fixtures/.

Runs the demo queries through RECORD mode against the synthetic upstream so
the CLI and service can replay them with zero network:

    python scripts/record_fixtures.py [output_dir]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import httpx

from litpool.clients import ClientConfig, FixtureMode, RecordingTransport, SourceClients
from litpool.registry import PoolSelector, load_registry_file
from litpool.search import SearchQuery, run_search
from fake_upstream import FakeUpstream, build_corpus


def main() -> int:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
    out.mkdir(parents=True, exist_ok=True)
    registry = load_registry_file()
    upstream = FakeUpstream(build_corpus(registry), registry)
    clients = SourceClients(
        ClientConfig(
            contact_email="demo@example.org",
            per_host_rate=1e6,
            fixture_mode=FixtureMode.RECORD,
            fixture_dir=out,
        ),
        transport=RecordingTransport(httpx.MockTransport(upstream.handler), out),
        sleep=lambda _s: None,
    )
    demo_queries = [
        SearchQuery(text="platform", selector=PoolSelector.parse("utd24")),
        SearchQuery(text="platform", selector=PoolSelector.parse("utd24"), page_size=3),
        SearchQuery(text="supply chain", selector=PoolSelector.parse("ft50")),
        SearchQuery(text="machine learning", selector=PoolSelector.all()),
    ]
    cite_dois = []
    for query in demo_queries:
        result = run_search(query, registry, clients)
        print(f"recorded {query.text!r} (size={query.page_size}): "
              f"{result.total_matched} matches")
        cite_dois.extend(a.doi for a in result.items[:2])
    for doi in dict.fromkeys(cite_dois):
        clients.crossref_lookup_doi(doi)
    print(f"{len(list(out.glob('*.json')))} fixture files in {out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
