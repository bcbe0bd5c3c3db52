"""The 121-game stimulus catalog: eleven rule-variant categories with fixed counts."""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    ORTHOGONALS,
    DIAGONALS,
    BoardGeometry,
    GameSpec,
    OpeningRule,
    Polarity,
    WinRule,
    spec_from_json,
    validate_spec,
)
from .dsl import DslSyntaxError, parse_spec, print_spec

SQUARE = "M in a row on square boards"
RECTANGULAR = "M in a row on rectangular boards"
INFINITE = "Infinite boards"
LOSES = "M in a row loses"
NO_DIAGONAL = "No diagonal wins allowed"
ONLY_DIAGONAL = "Only diagonal wins allowed"
FIRST_TWO = "First player moves 2 pieces"
SECOND_TWO = "Second player moves 2 pieces"
HANDICAP_A = "First player handicap (A)"
HANDICAP_B = "First player handicap (B)"
SECOND_NEEDS_LESS = "Second player needs M-1 to win"

CATEGORY_COUNTS = {
    SQUARE: 20,
    RECTANGULAR: 18,
    INFINITE: 3,
    LOSES: 10,
    NO_DIAGONAL: 10,
    ONLY_DIAGONAL: 10,
    FIRST_TWO: 10,
    SECOND_TWO: 10,
    HANDICAP_A: 10,
    HANDICAP_B: 10,
    SECOND_NEEDS_LESS: 10,
}
CATALOG_SIZE = sum(CATEGORY_COUNTS.values())

PRINTED_EXAMPLE = "printed-example"
RECONSTRUCTED = "reconstructed"


class CatalogError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("\n".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    category: str
    spec: GameSpec
    provenance: str = RECONSTRUCTED

    def to_json(self) -> dict:
        return {"id": self.id, "category": self.category, "spec": print_spec(self.spec),
                "provenance": self.provenance}


@dataclass
class Catalog:
    entries: list[CatalogEntry]

    @property
    def counts(self) -> dict[str, int]:
        return dict(Counter(e.category for e in self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def get(self, game_id: str) -> CatalogEntry:
        for e in self.entries:
            if e.id == game_id:
                return e
        raise KeyError(game_id)

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


# (rows, cols, first m, second m) for each category's systematic candidates.

def _square_pool(sizes, max_m=7):
    return [(n, n, m) for n in sizes for m in range(3, min(n, max_m) + 1)]


def _rect_pool():
    return [(r, c, m) for r in range(1, 8) for c in (5, 6, 7, 8, 9, 10) if r < c
            for m in range(3, min(c, 6) + 1)]


def _build(category: str, rows, cols, m1: int, m2: int) -> GameSpec:
    geometry = BoardGeometry.infinite() if rows is None else BoardGeometry.finite(rows, cols)
    first = WinRule(m1)
    second = WinRule(m2)
    opening = OpeningRule()
    if category == LOSES:
        first = second = WinRule(m1, polarity=Polarity.COMPLETING_LOSES)
    elif category == NO_DIAGONAL:
        first = second = WinRule(m1, ORTHOGONALS)
    elif category == ONLY_DIAGONAL:
        first = second = WinRule(m1, DIAGONALS)
    elif category == FIRST_TWO:
        opening = OpeningRule(first=2)
    elif category == SECOND_TWO:
        opening = OpeningRule(second=2)
    elif category == HANDICAP_A:
        first = WinRule(m1, ORTHOGONALS)
    elif category == HANDICAP_B:
        first = WinRule(m1, DIAGONALS)
    board = "inf" if rows is None else f"{rows}x{cols}"
    prefix = {
        SQUARE: "square", RECTANGULAR: "rect", INFINITE: "infinite", LOSES: "loses",
        NO_DIAGONAL: "nodiag", ONLY_DIAGONAL: "diagonly", FIRST_TWO: "first2",
        SECOND_TWO: "second2", HANDICAP_A: "handicapA", HANDICAP_B: "handicapB",
        SECOND_NEEDS_LESS: "secondless",
    }[category]
    suffix = f"m{m1}" if m1 == m2 else f"m{m1}v{m2}"
    game_id = f"{prefix}-{board}-{suffix}" if rows is not None else f"{prefix}-{suffix}"
    return GameSpec(game_id, category, geometry, first, second, opening)


# Printed examples for each category, always present; the rest of each category is sampled from its pool.
_ANCHORS = {
    SQUARE: [(6, 6, 3), (10, 10, 7)],
    RECTANGULAR: [(1, 5, 3), (5, 10, 6)],
    INFINITE: [(None, None, 3), (None, None, 10)],
    LOSES: [(5, 5, 5)],
    NO_DIAGONAL: [(10, 10, 4)],
    ONLY_DIAGONAL: [(5, 5, 4)],
    FIRST_TWO: [(10, 10, 5)],
    SECOND_TWO: [(10, 10, 10)],
    HANDICAP_A: [(3, 3, 3)],
    HANDICAP_B: [(7, 7, 4)],
    SECOND_NEEDS_LESS: [(5, 5, 4)],
}

_POOLS = {
    SQUARE: _square_pool(range(4, 11)),
    RECTANGULAR: _rect_pool(),
    INFINITE: [(None, None, 5)],
    LOSES: _square_pool(range(3, 11), 6),
    NO_DIAGONAL: _square_pool(range(3, 11)),
    ONLY_DIAGONAL: _square_pool(range(3, 11)),
    FIRST_TWO: _square_pool(range(3, 11)),
    SECOND_TWO: _square_pool(range(3, 11)),
    HANDICAP_A: _square_pool(range(3, 11)),
    HANDICAP_B: _square_pool(range(3, 11)),
    SECOND_NEEDS_LESS: [(n, n, m) for n in range(3, 11) for m in range(4, min(n, 7) + 1)],
}


def _sort_key(params):
    rows, cols, m = params
    return (rows is None, rows or 0, cols or 0, m)


def generate_catalog(seed: int = 0) -> Catalog:
    rng = np.random.default_rng(seed)
    entries = []
    for category, count in CATEGORY_COUNTS.items():
        anchors = _ANCHORS[category]
        pool = [p for p in _POOLS[category] if p not in anchors]
        picks = rng.choice(len(pool), size=count - len(anchors), replace=False)
        chosen = [(p, PRINTED_EXAMPLE) for p in anchors] + [(pool[i], RECONSTRUCTED) for i in picks]
        for (rows, cols, m), provenance in sorted(chosen, key=lambda x: _sort_key(x[0])):
            m2 = m - 1 if category == SECOND_NEEDS_LESS else m
            spec = _build(category, rows, cols, m, m2)
            entries.append(CatalogEntry(spec.id, category, spec, provenance))
    return Catalog(entries)


def validate_catalog(catalog: Catalog, expected_counts: dict[str, int] = CATEGORY_COUNTS) -> list[str]:
    problems = []
    seen: dict[str, int] = {}
    for i, entry in enumerate(catalog.entries):
        if entry.id in seen:
            problems.append(f"duplicate id {entry.id!r} at entries {seen[entry.id]} and {i}")
        else:
            seen[entry.id] = i
        report = validate_spec(entry.spec)
        problems.extend(f"{entry.id}: {e}" for e in report.errors)
    counts = catalog.counts
    for category in sorted(set(expected_counts) | set(counts)):
        want, got = expected_counts.get(category, 0), counts.get(category, 0)
        if want != got:
            problems.append(f"category {category!r}: expected {want} entries, found {got}")
    return problems


def save_catalog(catalog: Catalog, path) -> None:
    Path(path).write_text(json.dumps(catalog.to_json(), indent=2) + "\n", encoding="utf-8")


def _entry_spec(raw, game_id: str, category: str) -> GameSpec:
    if isinstance(raw, str):
        return parse_spec(raw, game_id, category)
    spec = spec_from_json(raw)
    return GameSpec(game_id, category, spec.geometry, spec.first_rule, spec.second_rule, spec.opening)


def load_catalog(path) -> Catalog:
    """Read a catalog JSON array; raises CatalogError naming every bad entry."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise CatalogError(["catalog must be a JSON array"])
    entries, problems = [], []
    seen: dict[str, int] = {}
    for i, item in enumerate(data):
        try:
            game_id, category = str(item["id"]), str(item["category"])
            raw = item["spec"]
        except (KeyError, TypeError):
            problems.append(f"entry {i}: needs id, category and spec")
            continue
        if game_id in seen:
            problems.append(f"duplicate id {game_id!r} at entries {seen[game_id]} and {i}")
            continue
        seen[game_id] = i
        try:
            spec = _entry_spec(raw, game_id, category)
        except DslSyntaxError as exc:
            problems.extend(f"entry {i} ({game_id}): {e}" for e in exc.errors)
            continue
        except (KeyError, ValueError, TypeError) as exc:
            problems.append(f"entry {i} ({game_id}): bad spec object: {exc}")
            continue
        report = validate_spec(spec)
        if report.errors:
            problems.extend(f"entry {i} ({game_id}): {e}" for e in report.errors)
            continue
        entries.append(CatalogEntry(game_id, category, spec, item.get("provenance", RECONSTRUCTED)))
    if problems:
        raise CatalogError(problems)
    return Catalog(entries)
