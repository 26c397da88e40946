"""Command-line entry points: serve the API/UI or run a one-off search."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .clients import ClientConfig, SourceClients
from .registry import PoolSelector, load_registry_file
from .search import (
    AllSourcesDegradedError,
    EmptyPoolError,
    SearchQuery,
    SortOrder,
    run_search,
)
from .service import create_app_from_env, serialize_search_result


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    port = args.port or int(os.environ.get("PORT", "8080"))
    uvicorn.run(
        create_app_from_env(),
        host=args.host,
        port=port,
        timeout_graceful_shutdown=10,
        log_level="info",
    )
    return 0


def _search(args: argparse.Namespace) -> int:
    registry = load_registry_file()
    clients = SourceClients(ClientConfig.from_env())
    query = SearchQuery(
        text=args.query,
        selector=PoolSelector.parse(args.pool),
        sort=SortOrder(args.sort),
        page_size=args.size,
    )
    try:
        result = run_search(query, registry, clients)
    except (EmptyPoolError, AllSourcesDegradedError) as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        if clients.config.fixture_mode.value == "replay":
            print(
                "hint: replay mode serves only recorded request shapes; "
                "see README for the recorded demo queries",
                file=sys.stderr,
            )
        return 1
    if args.json:
        json.dump(serialize_search_result(result), sys.stdout, indent=2)
        print()
        return 0
    print(f"{result.total_matched} matches ({len(result.items)} shown)")
    if result.degraded_sources:
        print(f"degraded sources: {', '.join(result.degraded_sources)}")
    for article in result.items:
        year = article.year or "n.d."
        cites = (
            f", {article.citation_count} citations"
            if article.citation_count is not None
            else ""
        )
        print(f"- [{year}] {article.title} ({article.journal_name}{cites})")
        print(f"  doi:{article.doi}")
    if result.hotspots:
        phrases = ", ".join(h.phrase for h in result.hotspots[:5])
        print(f"hotspots: {phrases}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = argparse.ArgumentParser(
        prog="litpool",
        description="Journal-pool-bounded scholarly search service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=_serve)

    search = sub.add_parser("search", help="run one search and print results")
    search.add_argument("query")
    search.add_argument("--pool", default="all", choices=["all", "utd24", "ft50"])
    search.add_argument(
        "--sort", default="relevance", choices=[s.value for s in SortOrder]
    )
    search.add_argument("--size", type=int, default=10)
    search.add_argument("--json", action="store_true")
    search.set_defaults(func=_search)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
