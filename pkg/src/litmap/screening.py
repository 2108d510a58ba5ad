"""PRISMA-style screening engine.

Reviewers triage queued documents into five relevance groups per pass
(title, then abstract or full text for the pooled lower groups).  The
decision log is append-only: conflicts between reviewers are resolved by
an extra resolution record, never by editing.  Flow accounting over the
store keeps the stage-conservation identities intact at every point.

Two routings for the deeper passes are supported.  "split" sends each
pooled document to exactly one deeper check (whichever pass the
reviewer files first), matching a workflow where abstracts are checked
when they suffice and full texts otherwise; "sequential" requires an
abstract decision first and escalates the middle groups to full text.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .corpus import (
    CorpusStore,
    ScreeningRecord,
    Stage,
    StoreInvariantError,
)

SPLIT = "split"
SEQUENTIAL = "sequential"

POOLED_GROUPS = frozenset({0, 1, 2})
RETAINED_GROUPS = frozenset({3, 4})
CONFLICT_GAP = 2


class ValidationError(ValueError):
    pass


class OrderingError(ValidationError):
    """A deeper-pass decision arrived before the title decision."""


class NotQueuedError(ValidationError):
    """The document is not pending at the requested pass."""


class IncompletePassError(RuntimeError):
    def __init__(self, pass_: str, pending: list[str]):
        self.pass_ = pass_
        self.pending = pending
        shown = ", ".join(pending[:10]) + ("..." if len(pending) > 10 else "")
        super().__init__(f"pass {pass_!r} incomplete; undecided: {shown}")


@dataclass
class Conflict:
    doc_id: str
    pass_: str
    groups: dict[str, int]          # reviewer -> group


@dataclass
class FlowReport:
    scoping: int
    pruned: int
    eligible: int
    notable_added: int
    seeds: int
    citation_corpus: int
    tallies: dict[str, dict[int, int]] = field(default_factory=dict)
    conflicts: int = 0

    def to_dict(self) -> dict:
        return {
            "scoping": self.scoping,
            "pruned": self.pruned,
            "eligible": self.eligible,
            "notable_added": self.notable_added,
            "seeds": self.seeds,
            "citation_corpus": self.citation_corpus,
            "tallies": {
                p: {str(g): n for g, n in sorted(groups.items())}
                for p, groups in sorted(self.tallies.items())
            },
            "conflicts": self.conflicts,
        }


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class ScreeningEngine:
    def __init__(self, store: CorpusStore, routing: str = SPLIT):
        if routing not in (SPLIT, SEQUENTIAL):
            raise ValidationError(f"unknown routing {routing!r}")
        self.store = store
        self.routing = routing

    # -- decision lookups -----------------------------------------------------

    def _records(self, doc_id: str, pass_: str) -> list[ScreeningRecord]:
        return self.store.decisions_for(doc_id, pass_)

    def effective_group(self, doc_id: str, pass_: str) -> Optional[int]:
        """The group that counts for routing: a resolution record wins,
        otherwise the most optimistic (highest) reviewer group."""
        records = self._records(doc_id, pass_)
        if not records:
            return None
        for rec in records:
            if rec.resolution:
                return rec.group
        return max(rec.group for rec in records)

    def decided(self, doc_id: str, pass_: str, reviewer: Optional[str] = None) -> bool:
        records = self._records(doc_id, pass_)
        if reviewer is None:
            return any(not r.resolution for r in records)
        return any(r.reviewer == reviewer and not r.resolution for r in records)

    def scoping_ids(self) -> list[str]:
        """Unique documents that entered through query result lists."""
        return sorted(self.store.membership_index())

    # -- queues -----------------------------------------------------------------

    def queue(self, pass_: str, reviewer: Optional[str] = None) -> list[str]:
        """Documents pending a decision at a pass, in stable id order.

        With a reviewer given, documents that reviewer has already
        decided drop out even if colleagues still owe a decision.
        """
        if pass_ not in ("title", "abstract", "fulltext"):
            raise ValidationError(f"unknown pass {pass_!r}")
        return [
            d for d in self.scoping_ids() if self._is_pending(d, pass_, reviewer)
        ]

    def _is_pending(self, doc_id: str, pass_: str, reviewer: Optional[str]) -> bool:
        doc = self.store.docs.get(doc_id)
        if doc is None or doc_id not in self.store.membership_index():
            return False
        if self.decided(doc_id, pass_, reviewer):
            return False
        if pass_ == "title":
            return doc.stage != Stage.EXCLUDED
        if not self.decided(doc_id, "title"):
            return False
        if self.effective_group(doc_id, "title") not in POOLED_GROUPS:
            return False
        if self.routing == SPLIT:
            # one deeper check per document; a decision at the other pass
            # claims the document for that route
            other = "fulltext" if pass_ == "abstract" else "abstract"
            return not self.decided(doc_id, other)
        if pass_ == "abstract":
            return True
        return self.effective_group(doc_id, "abstract") in (1, 2)

    def _pooled_ids(self) -> list[str]:
        return [
            d for d in self.scoping_ids()
            if self.decided(d, "title")
            and self.effective_group(d, "title") in POOLED_GROUPS
        ]

    # -- decisions ---------------------------------------------------------------

    def decide(
        self,
        doc_id: str,
        pass_: str,
        reviewer: str,
        group: int,
        note: Optional[str] = None,
        decided_at: Optional[str] = None,
        decision_id: Optional[str] = None,
    ) -> tuple[ScreeningRecord, bool]:
        """Store one reviewer decision; returns (record, conflict_flag).

        Replaying an existing decision id is a no-op that returns the
        stored record, so duplicate submissions over a flaky network
        collapse to one decision.
        """
        if not isinstance(group, int) or isinstance(group, bool) or not 0 <= group <= 4:
            raise ValidationError(f"group must be an integer in 0..4, got {group!r}")
        if pass_ not in ("title", "abstract", "fulltext"):
            raise ValidationError(f"unknown pass {pass_!r}")
        if decision_id and decision_id in self.store._decision_ids:
            existing = self.store._decision_ids[decision_id]
            return existing, self._in_conflict(existing.doc_id, existing.pass_)
        doc = self.store.docs.get(doc_id)
        if doc is None:
            raise NotQueuedError(f"unknown document {doc_id}")
        if pass_ != "title" and not self.decided(doc_id, "title"):
            raise OrderingError(f"{doc_id}: {pass_} decision requires a title decision")
        if not self._is_pending(doc_id, pass_, reviewer):
            raise NotQueuedError(f"{doc_id} is not pending at pass {pass_!r}")

        record = ScreeningRecord(
            decision_id=decision_id or str(uuid.uuid4()),
            doc_id=doc_id,
            pass_=pass_,
            group=group,
            reviewer=reviewer,
            decided_at=decided_at or _now(),
            note=note,
        )
        self.store.add_decision(record)
        if pass_ == "title" and doc.stage == Stage.IDENTIFIED:
            self.store.advance_stage(doc_id, Stage.SCREENED)
        return record, self._in_conflict(doc_id, pass_)

    def _in_conflict(self, doc_id: str, pass_: str) -> bool:
        records = [r for r in self._records(doc_id, pass_) if not r.resolution]
        if any(r.resolution for r in self._records(doc_id, pass_)):
            return False
        groups = [r.group for r in records]
        return len(groups) >= 2 and max(groups) - min(groups) >= CONFLICT_GAP

    def conflicts(self) -> list[Conflict]:
        """Unresolved reviewer disagreements of two or more groups."""
        pending: list[Conflict] = []
        seen: set[tuple[str, str]] = set()
        for rec in self.store.decisions:
            key = (rec.doc_id, rec.pass_)
            if key in seen:
                continue
            seen.add(key)
            if self._in_conflict(*key):
                groups = {
                    r.reviewer: r.group
                    for r in self._records(*key) if not r.resolution
                }
                pending.append(Conflict(rec.doc_id, rec.pass_, groups))
        pending.sort(key=lambda c: (c.doc_id, c.pass_))
        return pending

    def resolve_conflict(
        self,
        doc_id: str,
        pass_: str,
        reviewer: str,
        group: int,
        note: Optional[str] = None,
        decided_at: Optional[str] = None,
        decision_id: Optional[str] = None,
    ) -> ScreeningRecord:
        """File the tiebreaking record; the conflicting originals stay."""
        if not isinstance(group, int) or isinstance(group, bool) or not 0 <= group <= 4:
            raise ValidationError(f"group must be an integer in 0..4, got {group!r}")
        if decision_id and decision_id in self.store._decision_ids:
            return self.store._decision_ids[decision_id]
        if not self._in_conflict(doc_id, pass_):
            raise ValidationError(f"{doc_id} has no pending conflict at pass {pass_!r}")
        record = ScreeningRecord(
            decision_id=decision_id or str(uuid.uuid4()),
            doc_id=doc_id,
            pass_=pass_,
            group=group,
            reviewer=reviewer,
            decided_at=decided_at or _now(),
            note=note,
            resolution=True,
        )
        self.store.add_decision(record)
        return record

    # -- pooling and finalization ---------------------------------------------------

    def pool_for_next_pass(self, pass_: str = "title") -> set[str]:
        """Documents needing the more laborious deeper evaluation.

        Groups 3-4 are retained outright; groups 0-2 pool for the
        abstract/full-text checks.  All queued documents must be decided
        (and conflicts resolved) first.
        """
        pending = self.queue(pass_)
        unresolved = [c.doc_id for c in self.conflicts() if c.pass_ == pass_]
        if pending or unresolved:
            raise IncompletePassError(pass_, sorted(set(pending) | set(unresolved)))
        if pass_ == "title":
            return set(self._pooled_ids())
        return {
            d for d in self.scoping_ids()
            if self.effective_group(d, pass_) in (1, 2)
        }

    def deeper_passes_complete(self) -> list[str]:
        """Pooled documents still owing their deeper decision."""
        missing = []
        for d in self._pooled_ids():
            if self.routing == SPLIT:
                if not (self.decided(d, "abstract") or self.decided(d, "fulltext")):
                    missing.append(d)
            else:
                if not self.decided(d, "abstract"):
                    missing.append(d)
                elif self.effective_group(d, "abstract") in (1, 2) and not self.decided(d, "fulltext"):
                    missing.append(d)
        return missing

    def _final_group(self, doc_id: str) -> int:
        """Last effective group along the document's route."""
        if self.effective_group(doc_id, "title") in RETAINED_GROUPS:
            return self.effective_group(doc_id, "title")
        for pass_ in ("fulltext", "abstract"):
            group = self.effective_group(doc_id, pass_)
            if group is not None:
                return group
        return self.effective_group(doc_id, "title")

    def finalize(self) -> dict[str, int]:
        """Apply eligibility: pooled documents are retained unless their
        deeper pass said group 0.  Returns {eligible, excluded}."""
        pending = self.queue("title")
        if pending:
            raise IncompletePassError("title", pending)
        unresolved = self.conflicts()
        if unresolved:
            raise IncompletePassError(
                unresolved[0].pass_, [c.doc_id for c in unresolved]
            )
        missing = self.deeper_passes_complete()
        if missing:
            raise IncompletePassError("abstract/fulltext", missing)
        eligible = excluded = 0
        for doc_id in self.scoping_ids():
            doc = self.store.docs[doc_id]
            if doc.stage == Stage.EXCLUDED:
                excluded += 1
                continue
            if doc.stage in (Stage.ELIGIBLE, Stage.SEED):
                eligible += 1
                continue
            title_group = self.effective_group(doc_id, "title")
            if title_group in RETAINED_GROUPS:
                self.store.advance_stage(doc_id, Stage.ELIGIBLE)
                eligible += 1
                continue
            deeper = self._final_group(doc_id)
            if deeper == 0:
                self.store.advance_stage(doc_id, Stage.EXCLUDED)
                excluded += 1
            else:
                self.store.advance_stage(doc_id, Stage.ELIGIBLE)
                eligible += 1
        return {"eligible": eligible, "excluded": excluded}

    def mark_seeds(self) -> list[str]:
        """Promote every eligible document to the seed set."""
        seeds = []
        for doc_id in self.scoping_ids():
            if self.store.docs[doc_id].stage == Stage.ELIGIBLE:
                self.store.advance_stage(doc_id, Stage.SEED)
                seeds.append(doc_id)
        return seeds


def prisma_flow(store: CorpusStore, engine: Optional[ScreeningEngine] = None) -> FlowReport:
    """Stage accounting over the whole store.

    The conservation identities hold on any state: eligible is defined
    as scoping minus pruned, and seeds as eligible plus the injected
    notables, so excluding one more document moves exactly one unit.
    """
    engine = engine or ScreeningEngine(store)
    member_index = store.membership_index()
    scoping = len(member_index)
    pruned = sum(
        1 for d in member_index if store.docs[d].stage == Stage.EXCLUDED
    )
    eligible = scoping - pruned
    notable_added = sum(
        1 for doc in store.docs.values()
        if doc.layer == 0 and doc.doc_id not in member_index
        and doc.stage != Stage.EXCLUDED
    )
    seeds = eligible + notable_added
    citation_corpus = sum(
        1 for doc in store.docs.values() if doc.stage != Stage.EXCLUDED
    )
    tallies: dict[str, dict[int, int]] = {}
    decided_docs: dict[str, set[str]] = {}
    for rec in store.decisions:
        decided_docs.setdefault(rec.pass_, set()).add(rec.doc_id)
    for pass_, docs in decided_docs.items():
        counts: dict[int, int] = {}
        for doc_id in docs:
            group = engine.effective_group(doc_id, pass_)
            counts[group] = counts.get(group, 0) + 1
        tallies[pass_] = counts
    return FlowReport(
        scoping=scoping,
        pruned=pruned,
        eligible=eligible,
        notable_added=notable_added,
        seeds=seeds,
        citation_corpus=citation_corpus,
        tallies=tallies,
        conflicts=len(engine.conflicts()),
    )


def apply_decisions_file(engine: ScreeningEngine, path: str | Path) -> int:
    """Replay a JSONL decision log through the engine (scripted screening)."""
    count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("resolution"):
                engine.resolve_conflict(
                    rec["doc_id"], rec["pass"], rec["reviewer"], rec["group"],
                    note=rec.get("note"), decided_at=rec.get("decided_at"),
                    decision_id=rec.get("decision_id"),
                )
            else:
                engine.decide(
                    rec["doc_id"], rec["pass"], rec["reviewer"], rec["group"],
                    note=rec.get("note"), decided_at=rec.get("decided_at"),
                    decision_id=rec.get("decision_id"),
                )
            count += 1
    return count
