"""Corpus-level measures.

Reading-time budgets, growth-by-year-and-language series, and the
query-overlap (intersection pattern) analysis that shows how the ranked
result lists of different queries share documents.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .corpus import Membership


@dataclass(frozen=True)
class ReadingParams:
    words_per_doc: float = 5000
    wpm: float = 225
    hours_per_week: float = 37
    weeks_per_year: float = 52

    def validate(self) -> None:
        for name in ("words_per_doc", "wpm", "hours_per_week", "weeks_per_year"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class ReadingBudget:
    n_docs: int
    total_minutes: float
    weeks: float
    years: float


def reading_minutes(words: float, wpm: float) -> float:
    """Minutes needed to read ``words`` at ``wpm`` words per minute."""
    if wpm <= 0:
        raise ValueError("wpm must be strictly positive")
    if words < 0:
        raise ValueError("words must be >= 0")
    return float(Fraction(words) / Fraction(wpm))


def corpus_reading_budget(n_docs: int, params: ReadingParams = ReadingParams()) -> ReadingBudget:
    """Total reading time for a corpus under the given pace assumptions."""
    params.validate()
    if n_docs < 0:
        raise ValueError("n_docs must be >= 0")
    minutes = Fraction(n_docs) * Fraction(params.words_per_doc) / Fraction(params.wpm)
    weeks = minutes / (60 * Fraction(params.hours_per_week))
    years = weeks / Fraction(params.weeks_per_year)
    return ReadingBudget(n_docs, float(minutes), float(weeks), float(years))


@dataclass(frozen=True)
class IntersectionPattern:
    query_ids: frozenset[str]
    doc_count: int
    examples: tuple[str, ...]


@dataclass(frozen=True)
class IntersectionSummary:
    total_memberships: int
    unique_docs: int
    max_overlap: int


class UnknownQueryError(ValueError):
    pass


def query_intersections(
    memberships: Iterable[Membership],
    known_queries: Iterable[str],
) -> tuple[list[IntersectionPattern], IntersectionSummary]:
    """Aggregate documents by the exact set of queries that returned them.

    Each document's query fingerprint becomes one pattern row; the rows
    partition the membership fingerprints, so pattern counts sum to the
    number of unique documents and size-weighted counts sum to the total
    membership count.  Patterns come back sorted by count descending.
    """
    known = set(known_queries)
    fingerprints: dict[str, set[str]] = {}
    total = 0
    for m in memberships:
        if m.query_id not in known:
            raise UnknownQueryError(f"membership references unknown query {m.query_id!r}")
        fingerprints.setdefault(m.doc_id, set()).add(m.query_id)
        total += 1
    grouped: dict[frozenset[str], list[str]] = {}
    for doc_id, qset in fingerprints.items():
        grouped.setdefault(frozenset(qset), []).append(doc_id)
    patterns = [
        IntersectionPattern(qids, len(docs), tuple(sorted(docs)[:3]))
        for qids, docs in grouped.items()
    ]
    patterns.sort(key=lambda p: (-p.doc_count, -len(p.query_ids), sorted(p.query_ids)))
    max_overlap = max((len(q) for q in fingerprints.values()), default=0)
    return patterns, IntersectionSummary(total, len(fingerprints), max_overlap)


def maximal_overlap(memberships: Iterable[Membership]) -> list[tuple[str, int]]:
    """Documents ranked by how many queries returned them (hits desc)."""
    hits: dict[str, int] = {}
    for m in memberships:
        hits[m.doc_id] = hits.get(m.doc_id, 0) + 1
    return sorted(hits.items(), key=lambda kv: (-kv[1], kv[0]))


def collapse_to_genres(
    memberships: Iterable[Membership], genre_of: Mapping[str, str]
) -> list[Membership]:
    """Rewrite query ids to their genre so the four-genre view falls out
    of the same intersection computation as the per-query view."""
    seen: set[tuple[str, str]] = set()
    collapsed: list[Membership] = []
    for m in memberships:
        try:
            genre = genre_of[m.query_id]
        except KeyError:
            raise UnknownQueryError(f"no genre mapping for query {m.query_id!r}") from None
        if (m.doc_id, genre) not in seen:
            seen.add((m.doc_id, genre))
            collapsed.append(Membership(m.doc_id, genre, m.rank))
    return collapsed


_YEAR_RE = re.compile(r"\d{4}")


def parse_year(raw) -> Optional[int]:
    """First 4-digit run of a year-ish string, or the int itself."""
    if raw is None:
        return None
    if isinstance(raw, int):
        return raw
    match = _YEAR_RE.search(str(raw))
    return int(match.group()) if match else None


def growth_series(documents) -> tuple[dict, float]:
    """Per-year counts split by language, plus the non-English share.

    Documents without a year land in the "unknown" bucket so totals are
    conserved.  The share counts every document whose language is not
    "en" (undetermined included) against the corpus size.
    """
    series: dict = {}
    total = 0
    non_english = 0
    for doc in documents:
        year = doc.year if doc.year is not None else "unknown"
        series.setdefault(year, {})
        series[year][doc.language] = series[year].get(doc.language, 0) + 1
        total += 1
        if doc.language != "en":
            non_english += 1
    share = non_english / total if total else 0.0
    return series, share


# -- CSV emission -----------------------------------------------------------


def write_intersections_csv(patterns: list[IntersectionPattern], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pattern", "size", "count"])
        for p in patterns:
            writer.writerow(["+".join(sorted(p.query_ids)), len(p.query_ids), p.doc_count])


def write_growth_csv(series: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["year", "language", "count"])
        def year_key(y):
            return (1, 0) if y == "unknown" else (0, y)
        for year in sorted(series, key=year_key):
            for lang in sorted(series[year]):
                writer.writerow([year, lang, series[year][lang]])


def write_budget_csv(budgets: Iterable[tuple[str, ReadingBudget]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["corpus", "n_docs", "minutes", "weeks", "years"])
        for name, b in budgets:
            writer.writerow([name, b.n_docs, repr(b.total_minutes),
                             repr(b.weeks), repr(b.years)])
