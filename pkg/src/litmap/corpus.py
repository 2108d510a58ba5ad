"""Canonical data model and store for the citation corpus.

Documents, query memberships, citation edges and screening decisions all
live in one :class:`CorpusStore`.  Identity is a dedup key built from the
normalized title plus the year bucket, so case and punctuation variants
of the same record merge instead of multiplying.  The store serializes
to a JSON Lines snapshot with deterministic record ordering; an optional
append-only journal records every mutation for crash recovery.

Mutations are serialized through one writer lock; reads see a consistent
in-memory view.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

from .textlab import normalize_title

SNAPSHOT_FORMAT = "litmap-snapshot"
SNAPSHOT_VERSION = 1

NEAR_DUP_YEAR_WINDOW = 4

GROUP_LABELS = {0: "Unlikely", 1: "Marginal", 2: "Check", 3: "Suitable", 4: "Look-into"}
PASSES = ("title", "abstract", "fulltext")


class InvalidDocumentError(ValueError):
    """A document violates its type invariants."""


class StoreInvariantError(RuntimeError):
    """A mutation would violate a store invariant."""


class SnapshotError(RuntimeError):
    """A snapshot file is unreadable or carries the wrong format version."""


class Stage(str, Enum):
    IDENTIFIED = "identified"
    SCREENED = "screened"
    ELIGIBLE = "eligible"
    CITATION_CORPUS = "citation-corpus"
    SEED = "seed"
    EXCLUDED = "excluded"


# Forward order of the screening flow; excluded is terminal and reachable
# from any other stage.  Seeds outrank plain citation-corpus membership so
# that a seed later harvested as somebody's citer stays a seed.
_STAGE_RANK = {
    Stage.IDENTIFIED: 0,
    Stage.SCREENED: 1,
    Stage.ELIGIBLE: 2,
    Stage.CITATION_CORPUS: 3,
    Stage.SEED: 4,
}


def merge_stages(a: Stage, b: Stage) -> Stage:
    if Stage.EXCLUDED in (a, b):
        return Stage.EXCLUDED
    return a if _STAGE_RANK[a] >= _STAGE_RANK[b] else b


@dataclass
class Document:
    doc_id: str
    title: str
    year: Optional[int] = None
    authors: list[str] = field(default_factory=list)
    venue: Optional[str] = None
    cited_by: int = 0
    language: str = "und"
    layer: int = 0
    stage: Stage = Stage.IDENTIFIED

    def validate(self) -> None:
        if not self.title or not self.title.strip():
            raise InvalidDocumentError(f"{self.doc_id}: empty title")
        if not self.doc_id:
            raise InvalidDocumentError("missing doc_id")
        if self.cited_by < 0:
            raise InvalidDocumentError(f"{self.doc_id}: cited_by < 0")
        if self.layer < 0:
            raise InvalidDocumentError(f"{self.doc_id}: layer < 0")
        if self.year is not None and not isinstance(self.year, int):
            raise InvalidDocumentError(f"{self.doc_id}: year must be int or None")
        if not isinstance(self.stage, Stage):
            raise InvalidDocumentError(f"{self.doc_id}: bad stage {self.stage!r}")

    def to_record(self) -> dict:
        return {
            "kind": "document",
            "doc_id": self.doc_id,
            "title": self.title,
            "year": self.year,
            "authors": list(self.authors),
            "venue": self.venue,
            "cited_by": self.cited_by,
            "language": self.language,
            "layer": self.layer,
            "stage": self.stage.value,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Document":
        return cls(
            doc_id=rec["doc_id"],
            title=rec["title"],
            year=rec["year"],
            authors=list(rec.get("authors") or []),
            venue=rec.get("venue"),
            cited_by=rec.get("cited_by", 0),
            language=rec.get("language", "und"),
            layer=rec.get("layer", 0),
            stage=Stage(rec.get("stage", "identified")),
        )


@dataclass(frozen=True)
class QuerySpec:
    query_id: str
    genre: str                      # IMH | IM | RM | UM
    query_string: str
    specifiers: frozenset[str] = frozenset()   # subset of {"G", "D", "T"}
    k: int = 100

    def __post_init__(self) -> None:
        if self.genre not in ("IMH", "IM", "RM", "UM"):
            raise ValueError(f"{self.query_id}: unknown genre {self.genre!r}")
        if not self.specifiers <= {"G", "D", "T"}:
            raise ValueError(f"{self.query_id}: bad specifiers {set(self.specifiers)!r}")
        if self.k < 1:
            raise ValueError(f"{self.query_id}: k must be >= 1")


@dataclass(frozen=True)
class CitationEdge:
    citing: str
    cited: str
    layer: int


@dataclass(frozen=True)
class Membership:
    doc_id: str
    query_id: str
    rank: int


@dataclass
class ScreeningRecord:
    decision_id: str
    doc_id: str
    pass_: str                      # title | abstract | fulltext
    group: int                      # 0..4
    reviewer: str
    decided_at: str
    note: Optional[str] = None
    resolution: bool = False

    def validate(self) -> None:
        if self.pass_ not in PASSES:
            raise ValueError(f"unknown pass {self.pass_!r}")
        if not isinstance(self.group, int) or not 0 <= self.group <= 4:
            raise ValueError(f"group must be an integer in 0..4, got {self.group!r}")
        if not self.reviewer:
            raise ValueError("missing reviewer")
        if not self.decision_id:
            raise ValueError("missing decision_id")

    def to_record(self) -> dict:
        return {
            "kind": "decision",
            "decision_id": self.decision_id,
            "doc_id": self.doc_id,
            "pass": self.pass_,
            "group": self.group,
            "reviewer": self.reviewer,
            "decided_at": self.decided_at,
            "note": self.note,
            "resolution": self.resolution,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ScreeningRecord":
        return cls(
            decision_id=rec["decision_id"],
            doc_id=rec["doc_id"],
            pass_=rec["pass"],
            group=rec["group"],
            reviewer=rec["reviewer"],
            decided_at=rec.get("decided_at", ""),
            note=rec.get("note"),
            resolution=rec.get("resolution", False),
        )


@dataclass(frozen=True)
class MergeReport:
    status: str                     # "inserted" | "merged"
    doc_id: str


def dedup_key(doc: Document) -> str:
    """Stable identity for a document: normalized title plus year bucket.

    Case and punctuation variants of the same title+year collapse to one
    key; records without a year get the bucket "unknown" and never merge
    with dated records.
    """
    norm = normalize_title(doc.title)
    if not norm:
        raise InvalidDocumentError(f"{doc.doc_id}: title normalizes to nothing")
    bucket = "unknown" if doc.year is None else str(doc.year)
    return f"{norm}|{bucket}"


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class CorpusStore:
    """Single-writer in-memory store with JSONL snapshot persistence."""

    def __init__(self, journal_path: Optional[str | Path] = None):
        self._lock = threading.RLock()
        self.docs: dict[str, Document] = {}
        self._key_to_id: dict[str, str] = {}
        self.edges: dict[tuple[str, str], int] = {}
        self.memberships: dict[tuple[str, str], int] = {}
        self._query_ranks: dict[str, dict[int, str]] = {}
        self._doc_queries: dict[str, set[str]] = {}
        self.decisions: list[ScreeningRecord] = []
        self._decision_ids: dict[str, ScreeningRecord] = {}
        self._decision_index: dict[tuple[str, str], list[ScreeningRecord]] = {}
        self._journal_path = Path(journal_path) if journal_path else None

    # -- journal ------------------------------------------------------------

    def _journal(self, record: dict) -> None:
        if self._journal_path is None:
            return
        with open(self._journal_path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(_dumps(record) + "\n")

    # -- documents ----------------------------------------------------------

    def resolve(self, doc_id: str) -> Optional[Document]:
        return self.docs.get(doc_id)

    def id_for_key(self, key: str) -> Optional[str]:
        return self._key_to_id.get(key)

    def upsert_document(self, doc: Document) -> MergeReport:
        """Insert a document or merge it into the record sharing its key.

        Merge keeps the larger cited-by count, the smaller layer, the more
        advanced stage, and fills missing fields; it is idempotent and
        order-independent in all observable fields.
        """
        doc.validate()
        key = dedup_key(doc)
        with self._lock:
            existing_id = self._key_to_id.get(key)
            if existing_id is None:
                if doc.doc_id in self.docs:
                    raise StoreInvariantError(
                        f"doc_id {doc.doc_id} already present with a different dedup key"
                    )
                stored = replace(doc, authors=list(doc.authors))
                self.docs[doc.doc_id] = stored
                self._key_to_id[key] = doc.doc_id
                self._journal(stored.to_record())
                return MergeReport("inserted", doc.doc_id)
            current = self.docs[existing_id]
            current.cited_by = max(current.cited_by, doc.cited_by)
            current.layer = min(current.layer, doc.layer)
            current.stage = merge_stages(current.stage, doc.stage)
            if current.year is None and doc.year is not None:
                current.year = doc.year
            if not current.venue and doc.venue:
                current.venue = doc.venue
            if not current.authors and doc.authors:
                current.authors = list(doc.authors)
            if current.language == "und" and doc.language != "und":
                current.language = doc.language
            self._journal(current.to_record())
            return MergeReport("merged", existing_id)

    def advance_stage(self, doc_id: str, stage: Stage) -> None:
        """Move a document forward along the screening flow.

        Transitions must be monotone; excluded is terminal and reachable
        from any other stage.
        """
        with self._lock:
            doc = self.docs.get(doc_id)
            if doc is None:
                raise StoreInvariantError(f"unknown doc_id {doc_id}")
            if doc.stage == stage:
                return
            if doc.stage == Stage.EXCLUDED:
                raise StoreInvariantError(f"{doc_id}: excluded is terminal")
            if stage != Stage.EXCLUDED and _STAGE_RANK[stage] < _STAGE_RANK[doc.stage]:
                raise StoreInvariantError(
                    f"{doc_id}: stage may not move backwards "
                    f"({doc.stage.value} -> {stage.value})"
                )
            doc.stage = stage
            self._journal(doc.to_record())

    def set_language(self, doc_id: str, language: str) -> None:
        with self._lock:
            doc = self.docs.get(doc_id)
            if doc is None:
                raise StoreInvariantError(f"unknown doc_id {doc_id}")
            if doc.language != language:
                doc.language = language
                self._journal(doc.to_record())

    # -- memberships ----------------------------------------------------------

    def add_membership(self, doc_id: str, query_id: str, rank: int) -> bool:
        """Record that a query returned a document at a rank.

        Returns False when the (doc, query) pair is already present (the
        first-seen rank wins).  A second document at an occupied rank of
        the same query is an invariant violation.
        """
        with self._lock:
            if doc_id not in self.docs:
                raise StoreInvariantError(f"membership references unknown doc {doc_id}")
            if rank < 1:
                raise StoreInvariantError(f"membership rank must be >= 1, got {rank}")
            if (doc_id, query_id) in self.memberships:
                return False
            ranks = self._query_ranks.setdefault(query_id, {})
            if rank in ranks:
                raise StoreInvariantError(
                    f"query {query_id} already has a document at rank {rank}"
                )
            self.memberships[(doc_id, query_id)] = rank
            ranks[rank] = doc_id
            self._doc_queries.setdefault(doc_id, set()).add(query_id)
            self._journal(
                {"kind": "membership", "doc_id": doc_id, "query_id": query_id, "rank": rank}
            )
            return True

    def queries_of(self, doc_id: str) -> set[str]:
        return set(self._doc_queries.get(doc_id, ()))

    def membership_index(self) -> dict[str, set[str]]:
        """doc_id -> set of query_ids, for every doc with at least one.

        The returned mapping is the live index; treat it as read-only.
        """
        return self._doc_queries

    # -- edges ----------------------------------------------------------------

    def add_edge(self, citing: str, cited: str, layer: int) -> bool:
        with self._lock:
            if citing == cited:
                raise StoreInvariantError(f"self-citation edge on {citing}")
            if citing not in self.docs or cited not in self.docs:
                raise StoreInvariantError(f"edge ({citing}, {cited}) references unknown doc")
            if (citing, cited) in self.edges:
                return False
            self.edges[(citing, cited)] = layer
            self._journal({"kind": "edge", "citing": citing, "cited": cited, "layer": layer})
            return True

    # -- decisions --------------------------------------------------------------

    def add_decision(self, record: ScreeningRecord) -> tuple[ScreeningRecord, bool]:
        """Append a screening decision; idempotent on decision_id.

        Returns (record, created).  Replaying a known id yields the stored
        record unchanged; a new id for an already-decided (doc, pass,
        reviewer) slot is rejected, keeping the log append-only.
        """
        record.validate()
        with self._lock:
            existing = self._decision_ids.get(record.decision_id)
            if existing is not None:
                return existing, False
            if record.doc_id not in self.docs:
                raise StoreInvariantError(f"decision references unknown doc {record.doc_id}")
            slot = self._decision_index.get((record.doc_id, record.pass_), [])
            for rec in slot:
                if rec.resolution == record.resolution and (
                    record.resolution or rec.reviewer == record.reviewer
                ):
                    raise StoreInvariantError(
                        f"{record.doc_id}: duplicate decision for pass {record.pass_}"
                        + ("" if record.resolution else f" by {record.reviewer}")
                    )
            self.decisions.append(record)
            self._decision_ids[record.decision_id] = record
            self._decision_index.setdefault(
                (record.doc_id, record.pass_), []
            ).append(record)
            self._journal(record.to_record())
            return record, True

    def decisions_for(self, doc_id: str, pass_: Optional[str] = None) -> list[ScreeningRecord]:
        if pass_ is not None:
            return list(self._decision_index.get((doc_id, pass_), []))
        out: list[ScreeningRecord] = []
        for p in PASSES:
            out.extend(self._decision_index.get((doc_id, p), []))
        return out

    # -- reports ------------------------------------------------------------------

    def near_duplicates(self) -> list[tuple[str, str]]:
        """Pairs of dated documents sharing a normalized title within 4 years.

        These records deliberately do not merge (the year differs) but are
        surfaced for manual review.
        """
        by_title: dict[str, list[Document]] = {}
        for doc in self.docs.values():
            by_title.setdefault(normalize_title(doc.title), []).append(doc)
        pairs: list[tuple[str, str]] = []
        for docs in by_title.values():
            dated = sorted(
                (d for d in docs if d.year is not None), key=lambda d: (d.year, d.doc_id)
            )
            for i, a in enumerate(dated):
                for b in dated[i + 1:]:
                    if a.year != b.year and abs(a.year - b.year) <= NEAR_DUP_YEAR_WINDOW:
                        pairs.append((a.doc_id, b.doc_id))
        return sorted(pairs)

    # -- persistence -----------------------------------------------------------------

    def records(self) -> list[dict]:
        """All content records in canonical (kind, id) order."""
        recs: list[tuple[tuple, dict]] = []
        for d in self.decisions:
            recs.append((("decision", d.decision_id), d.to_record()))
        for doc_id in self.docs:
            recs.append((("document", doc_id), self.docs[doc_id].to_record()))
        for (citing, cited), layer in self.edges.items():
            recs.append(
                (("edge", citing, cited),
                 {"kind": "edge", "citing": citing, "cited": cited, "layer": layer})
            )
        for (doc_id, query_id), rank in self.memberships.items():
            recs.append(
                (("membership", doc_id, query_id),
                 {"kind": "membership", "doc_id": doc_id, "query_id": query_id, "rank": rank})
            )
        recs.sort(key=lambda pair: pair[0])
        return [rec for _, rec in recs]

    def save_snapshot(self, path: str | Path, created_at: Optional[str] = None) -> None:
        if created_at is None:
            created_at = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        header = {
            "kind": "header",
            "format": SNAPSHOT_FORMAT,
            "format_version": SNAPSHOT_VERSION,
            "created_at": created_at,
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_dumps(header) + "\n")
            for rec in self.records():
                fh.write(_dumps(rec) + "\n")

    @classmethod
    def load_snapshot(cls, path: str | Path) -> "CorpusStore":
        store = cls()
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline()
            try:
                header = json.loads(first)
            except json.JSONDecodeError as exc:
                raise SnapshotError(f"{path}: not a snapshot file ({exc})") from None
            if header.get("kind") != "header" or header.get("format") != SNAPSHOT_FORMAT:
                raise SnapshotError(f"{path}: missing {SNAPSHOT_FORMAT} header")
            if header.get("format_version") != SNAPSHOT_VERSION:
                raise SnapshotError(
                    f"{path}: format_version {header.get('format_version')!r}, "
                    f"expected {SNAPSHOT_VERSION}"
                )
            for line in fh:
                line = line.strip()
                if line:
                    store._apply_record(json.loads(line))
        return store

    def replay_journal(self, path: str | Path) -> int:
        """Apply journal records on top of the current state."""
        count = 0
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self._apply_record(json.loads(line))
                    count += 1
        return count

    def _apply_record(self, rec: dict) -> None:
        kind = rec.get("kind")
        if kind == "document":
            doc = Document.from_record(rec)
            key = dedup_key(doc)
            existing_id = self._key_to_id.get(key)
            if existing_id is None:
                self.docs[doc.doc_id] = doc
                self._key_to_id[key] = doc.doc_id
            else:
                # journal replays carry post-merge states; newest wins
                self.docs[existing_id] = replace(doc, doc_id=existing_id)
        elif kind == "edge":
            self.edges.setdefault((rec["citing"], rec["cited"]), rec["layer"])
        elif kind == "membership":
            if (rec["doc_id"], rec["query_id"]) not in self.memberships:
                self.memberships[(rec["doc_id"], rec["query_id"])] = rec["rank"]
                self._query_ranks.setdefault(rec["query_id"], {})[rec["rank"]] = rec["doc_id"]
                self._doc_queries.setdefault(rec["doc_id"], set()).add(rec["query_id"])
        elif kind == "decision":
            record = ScreeningRecord.from_record(rec)
            if record.decision_id not in self._decision_ids:
                self.decisions.append(record)
                self._decision_ids[record.decision_id] = record
                self._decision_index.setdefault(
                    (record.doc_id, record.pass_), []
                ).append(record)
        else:
            raise SnapshotError(f"unknown record kind {kind!r}")

    # -- bulk views -------------------------------------------------------------

    def documents(self) -> Iterator[Document]:
        for doc_id in sorted(self.docs):
            yield self.docs[doc_id]

    def __len__(self) -> int:
        return len(self.docs)
