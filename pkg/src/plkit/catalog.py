"""Static catalog of built-in and common library predicates.

Plain-text format, records separated by blank lines:
    name/arity
    synopsis line
    one line per argument description
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

_DEFAULT_PATH = os.path.join(os.path.dirname(__file__), "builtin_catalog.txt")


@dataclass
class CatalogEntry:
    name: str
    arity: int
    synopsis: str
    arguments: list[str] = field(default_factory=list)

    @property
    def indicator(self) -> str:
        return f"{self.name}/{self.arity}"


class BuiltinCatalog:
    def __init__(self, entries: list[CatalogEntry]):
        self._by_key = {(e.name, e.arity): e for e in entries}

    def get(self, name: str, arity: int) -> Optional[CatalogEntry]:
        return self._by_key.get((name, arity))

    def entries(self) -> list[CatalogEntry]:
        return sorted(self._by_key.values(), key=lambda e: (e.name, e.arity))


def parse_catalog(text: str) -> BuiltinCatalog:
    entries: list[CatalogEntry] = []
    for chunk in text.split("\n\n"):
        lines = [line.rstrip() for line in chunk.strip().splitlines() if line.strip()]
        if len(lines) < 2:
            continue
        indicator = lines[0].strip()
        name, _, arity_text = indicator.rpartition("/")
        if not name or not arity_text.isdigit():
            continue
        entries.append(
            CatalogEntry(name, int(arity_text), lines[1].strip(),
                         [line.strip() for line in lines[2:]])
        )
    return BuiltinCatalog(entries)


_cached: Optional[BuiltinCatalog] = None


def load_default_catalog() -> BuiltinCatalog:
    global _cached
    if _cached is None:
        with open(_DEFAULT_PATH, encoding="utf-8") as fh:
            _cached = parse_catalog(fh.read())
    return _cached
