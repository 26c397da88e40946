"""Curated journal pools that bound every search.

The registry is a version-controlled JSON seed shipped with the package
(override with JOURNAL_SEED_PATH). It is immutable after load and safe to
share across request handlers.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

ISSN_RE = re.compile(r"^\d{4}-\d{3}[\dX]$")

SEED_ENV_VAR = "JOURNAL_SEED_PATH"
DEFAULT_SEED_RELPATH = Path("data") / "journals.json"

# registry entries whose keys are a subset of these are file comments
_COMMENT_KEYS = {"comment", "retrieved"}


class Pool(Enum):
    UTD24 = "utd24"
    FT50 = "ft50"


class RegistryError(Exception):
    pass


class RegistryParseError(RegistryError):
    pass


class RegistryValidationError(RegistryError):
    pass


class UnknownJournalIdsError(RegistryError):
    def __init__(self, ids: list[str]):
        super().__init__(f"unknown journal ids: {', '.join(ids)}")
        self.ids = ids


@dataclass(frozen=True)
class Journal:
    id: str
    name: str
    issns: tuple[str, ...]
    pools: frozenset[Pool]
    category: str
    official_url: str
    submission_url: str = ""


@dataclass(frozen=True)
class PoolSelector:
    """UTD24, FT50, or ALL, optionally narrowed to explicit journal ids."""

    pool: Optional[Pool] = None  # None means ALL
    journal_ids: Optional[tuple[str, ...]] = None

    @classmethod
    def all(cls) -> "PoolSelector":
        return cls()

    @classmethod
    def parse(
        cls, token: str, journal_ids: Optional[Iterable[str]] = None
    ) -> "PoolSelector":
        ids = tuple(journal_ids) if journal_ids else None
        token = token.strip().lower()
        if token == "all":
            return cls(None, ids)
        for pool in Pool:
            if token == pool.value:
                return cls(pool, ids)
        raise ValueError(f"unknown pool {token!r}")

    def token(self) -> str:
        return self.pool.value if self.pool else "all"

    def matches(self, journal: Journal) -> bool:
        if self.pool is not None and self.pool not in journal.pools:
            return False
        if self.journal_ids is not None and journal.id not in self.journal_ids:
            return False
        return True


class Registry:
    """Immutable journal directory with ISSN and id lookups."""

    def __init__(self, journals: list[Journal]):
        self.journals: tuple[Journal, ...] = tuple(journals)
        self._by_id = {j.id: j for j in self.journals}
        self._by_issn: dict[str, Journal] = {}
        for journal in self.journals:
            for issn in journal.issns:
                self._by_issn[issn] = journal

    def get(self, journal_id: str) -> Optional[Journal]:
        return self._by_id.get(journal_id)

    def resolve_issn(self, issn: str) -> Optional[Journal]:
        return self._by_issn.get(issn.strip().upper())

    def issns_for(self, selector: PoolSelector) -> frozenset[str]:
        return frozenset(
            issn
            for journal in self.journals
            if selector.matches(journal)
            for issn in journal.issns
        )

    def __len__(self) -> int:
        return len(self.journals)


def _require(entry: dict, key: str, journal_ref: str):
    if key not in entry or entry[key] in (None, "", []):
        raise RegistryValidationError(f"journal {journal_ref}: missing field {key!r}")
    return entry[key]


def _parse_journal(entry: dict, position: int) -> Journal:
    ref = entry.get("id") or f"#{position}"
    jid = _require(entry, "id", ref)
    name = _require(entry, "name", ref)
    issns = _require(entry, "issns", ref)
    pools_raw = _require(entry, "pools", ref)
    category = _require(entry, "category", ref)
    official = _require(entry, "official_url", ref)

    issns = tuple(str(i).strip().upper() for i in issns)
    for issn in issns:
        if not ISSN_RE.match(issn):
            raise RegistryValidationError(f"journal {ref}: bad ISSN {issn!r}")
    if len(set(issns)) != len(issns):
        raise RegistryValidationError(f"journal {ref}: repeated ISSN")

    pools = set()
    for token in pools_raw:
        try:
            pools.add(Pool(str(token).strip().lower()))
        except ValueError:
            raise RegistryValidationError(
                f"journal {ref}: unknown pool {token!r}"
            ) from None

    return Journal(
        id=str(jid),
        name=str(name),
        issns=issns,
        pools=frozenset(pools),
        category=str(category),
        official_url=str(official),
        submission_url=str(entry.get("submission_url") or ""),
    )


def load_registry(seed_document: str) -> Registry:
    """Parse and validate a registry seed document.

    Duplicate ids or ISSNs across distinct journals are rejected; comment
    entries (objects with only comment/retrieved keys) are skipped.
    """
    try:
        data = json.loads(seed_document)
    except json.JSONDecodeError as exc:
        raise RegistryParseError(
            f"seed is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(data, list):
        raise RegistryParseError("seed document must be a JSON array")

    journals: list[Journal] = []
    seen_ids: set[str] = set()
    seen_issns: dict[str, str] = {}
    for position, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise RegistryParseError(f"entry #{position} is not an object")
        if set(entry) <= _COMMENT_KEYS:
            continue
        journal = _parse_journal(entry, position)
        if journal.id in seen_ids:
            raise RegistryValidationError(f"duplicate journal id {journal.id!r}")
        seen_ids.add(journal.id)
        for issn in journal.issns:
            if issn in seen_issns:
                raise RegistryValidationError(
                    f"journal {journal.id!r}: ISSN {issn} already used by "
                    f"{seen_issns[issn]!r}"
                )
            seen_issns[issn] = journal.id
        journals.append(journal)
    return Registry(journals)


def default_seed_path() -> Path:
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        return Path(env)
    local = Path(DEFAULT_SEED_RELPATH)
    if local.exists():
        return local
    return Path(str(resources.files("litpool").joinpath("data/journals.json")))


def load_registry_file(path: Optional[Path] = None) -> Registry:
    """Load the registry from a file, honoring JOURNAL_SEED_PATH."""
    path = path or default_seed_path()
    return load_registry(path.read_text(encoding="utf-8"))


def list_journals(
    registry: Registry,
    selector: PoolSelector,
    name_filter: Optional[str] = None,
) -> list[Journal]:
    """Journals matching the selector, sorted by name ascending.

    name_filter is a case-insensitive substring match; unknown explicit
    journal ids raise UnknownJournalIdsError.
    """
    if selector.journal_ids is not None:
        missing = [i for i in selector.journal_ids if registry.get(i) is None]
        if missing:
            raise UnknownJournalIdsError(missing)
    rows = [j for j in registry.journals if selector.matches(j)]
    if name_filter:
        needle = name_filter.lower()
        rows = [j for j in rows if needle in j.name.lower()]
    return sorted(rows, key=lambda j: j.name)
