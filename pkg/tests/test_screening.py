"""Screening decisions, pooling, conflicts and flow accounting."""

from __future__ import annotations

import random

import pytest

from litmap.corpus import CorpusStore, Document, Stage, StoreInvariantError
from litmap.screening import (
    SEQUENTIAL,
    IncompletePassError,
    NotQueuedError,
    OrderingError,
    ScreeningEngine,
    ValidationError,
    prisma_flow,
)


def letters(n: int) -> str:
    out = []
    n += 1
    while n:
        n, r = divmod(n - 1, 26)
        out.append(chr(97 + r))
    return "".join(reversed(out))


def scoping_store(n: int) -> CorpusStore:
    store = CorpusStore()
    for i in range(n):
        doc_id = f"d{i:03d}"
        store.upsert_document(Document(doc_id, f"Scoping paper {letters(i)}",
                                       1990 + i % 30))
        store.add_membership(doc_id, f"q{i % 3}", i // 3 + 1)
    return store


class TestDecide:
    def test_basic_decision_routes_to_retained(self):
        store = scoping_store(3)
        engine = ScreeningEngine(store)
        record, conflict = engine.decide("d000", "title", "r1", 4)
        assert record.group == 4 and not conflict
        assert store.docs["d000"].stage == Stage.SCREENED
        engine.decide("d001", "title", "r1", 4)
        engine.decide("d002", "title", "r1", 3)
        assert engine.pool_for_next_pass() == set()     # 3 and 4 both retained

    def test_conflict_flag_on_group_gap(self):
        store = scoping_store(2)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 3)
        _, conflict = engine.decide("d000", "title", "r2", 0)
        assert conflict
        conflicts = engine.conflicts()
        assert len(conflicts) == 1
        assert conflicts[0].groups == {"r1": 3, "r2": 0}

    def test_adjacent_groups_do_not_conflict(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 3)
        _, conflict = engine.decide("d000", "title", "r2", 2)
        assert not conflict and engine.conflicts() == []

    def test_group_validation(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        for bad in (7, -1, 2.5, "3", True):
            with pytest.raises(ValidationError):
                engine.decide("d000", "title", "r1", bad)

    def test_pass_order_enforced(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        with pytest.raises(OrderingError):
            engine.decide("d000", "abstract", "r1", 2)
        with pytest.raises(OrderingError):
            engine.decide("d000", "fulltext", "r1", 2)

    def test_unknown_document(self):
        engine = ScreeningEngine(scoping_store(1))
        with pytest.raises(NotQueuedError):
            engine.decide("ghost", "title", "r1", 2)

    def test_duplicate_reviewer_decision_rejected(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        record, _ = engine.decide("d000", "title", "r1", 2, decision_id="one")
        # engine view: already decided, no longer pending for this reviewer
        with pytest.raises(NotQueuedError):
            engine.decide("d000", "title", "r1", 3, decision_id="two")
        # store view: the (doc, pass, reviewer) slot is occupied
        from dataclasses import replace
        with pytest.raises(StoreInvariantError):
            store.add_decision(replace(record, decision_id="two", group=3))

    def test_idempotent_by_decision_id(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        first, _ = engine.decide("d000", "title", "r1", 2, decision_id="same")
        replay, _ = engine.decide("d000", "title", "r1", 2, decision_id="same")
        assert replay is first
        assert len(store.decisions) == 1

    def test_retained_doc_not_queued_deeper(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 4)
        with pytest.raises(NotQueuedError):
            engine.decide("d000", "abstract", "r1", 2)


class TestConflictResolution:
    def build(self):
        store = scoping_store(2)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 3)
        engine.decide("d000", "title", "r2", 0)
        return store, engine

    def test_resolution_clears_conflict_and_keeps_originals(self):
        store, engine = self.build()
        engine.resolve_conflict("d000", "title", "r3", 3)
        assert engine.conflicts() == []
        records = store.decisions_for("d000", "title")
        assert len(records) == 3
        assert sum(1 for r in records if r.resolution) == 1
        assert engine.effective_group("d000", "title") == 3

    def test_resolution_requires_pending_conflict(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 3)
        with pytest.raises(ValidationError):
            engine.resolve_conflict("d000", "title", "r3", 3)

    def test_pooling_blocked_by_unresolved_conflict(self):
        store, engine = self.build()
        engine.decide("d001", "title", "r1", 4)
        with pytest.raises(IncompletePassError) as exc:
            engine.pool_for_next_pass()
        assert "d000" in exc.value.pending


class TestPooling:
    def test_five_group_tallies_pool_bottom_three(self):
        # mirror the demo title tallies at 1/10 scale: 22/8/14/21/11
        sizes = {0: 22, 1: 8, 2: 14, 3: 21, 4: 11}
        store = scoping_store(sum(sizes.values()))
        engine = ScreeningEngine(store)
        ids = sorted(store.docs)
        cursor = 0
        for group, count in sizes.items():
            for _ in range(count):
                engine.decide(ids[cursor], "title", "r1", group)
                cursor += 1
        pooled = engine.pool_for_next_pass()
        assert len(pooled) == sizes[0] + sizes[1] + sizes[2]

    def test_mixed_ten_docs(self):
        store = scoping_store(10)
        engine = ScreeningEngine(store)
        for i, group in enumerate((0, 0, 1, 2, 2, 3, 3, 4, 4, 4)):
            engine.decide(f"d{i:03d}", "title", "r1", group)
        assert len(engine.pool_for_next_pass()) == 5

    def test_incomplete_pass_lists_missing(self):
        store = scoping_store(4)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 1)
        with pytest.raises(IncompletePassError) as exc:
            engine.pool_for_next_pass()
        assert set(exc.value.pending) == {"d001", "d002", "d003"}


class TestRoutings:
    def test_split_one_deeper_decision_per_doc(self):
        store = scoping_store(2)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 1)
        engine.decide("d001", "title", "r1", 2)
        assert engine.queue("abstract") == ["d000", "d001"]
        assert engine.queue("fulltext") == ["d000", "d001"]
        engine.decide("d000", "abstract", "r1", 2)
        assert engine.queue("fulltext") == ["d001"]       # claimed by abstract
        engine.decide("d001", "fulltext", "r1", 0)
        assert engine.deeper_passes_complete() == []
        assert engine.finalize() == {"eligible": 1, "excluded": 1}

    def test_sequential_escalates_middle_groups(self):
        store = scoping_store(3)
        engine = ScreeningEngine(store, routing=SEQUENTIAL)
        for doc_id in ("d000", "d001", "d002"):
            engine.decide(doc_id, "title", "r1", 1)
        engine.decide("d000", "abstract", "r1", 0)   # dropped at abstract
        engine.decide("d001", "abstract", "r1", 2)   # escalates to fulltext
        engine.decide("d002", "abstract", "r1", 4)   # retained at abstract
        assert engine.queue("fulltext") == ["d001"]
        engine.decide("d001", "fulltext", "r1", 0)
        assert engine.finalize() == {"eligible": 1, "excluded": 2}


class TestFinalizeAndFlow:
    def test_flow_identities_on_hand_store(self):
        store = scoping_store(20)
        engine = ScreeningEngine(store)
        ids = sorted(store.docs)
        for i, doc_id in enumerate(ids):
            engine.decide(doc_id, "title", "r1", 4 if i >= 5 else 0)
        for doc_id in ids[:5]:
            engine.decide(doc_id, "abstract", "r1", 0)
        engine.finalize()
        flow = prisma_flow(store, engine)
        assert flow.scoping == 20 and flow.pruned == 5 and flow.eligible == 15
        assert flow.eligible + flow.pruned == flow.scoping

    def test_empty_store_all_zero(self):
        flow = prisma_flow(CorpusStore())
        assert (flow.scoping, flow.pruned, flow.eligible, flow.notable_added,
                flow.seeds, flow.citation_corpus) == (0, 0, 0, 0, 0, 0)

    def test_excluding_one_more_decrements_eligible_by_one(self):
        store = scoping_store(12)
        engine = ScreeningEngine(store)
        for doc_id in sorted(store.docs):
            engine.decide(doc_id, "title", "r1", 4)
        engine.finalize()
        before = prisma_flow(store, engine)
        victim = sorted(store.docs)[0]
        store.advance_stage(victim, Stage.EXCLUDED)
        after = prisma_flow(store, engine)
        assert after.eligible == before.eligible - 1
        assert after.pruned == before.pruned + 1
        assert after.scoping == before.scoping

    def test_tallies_sum_to_decided_docs(self, demo_run):
        flow = demo_run["manifest"]["flow"]
        assert sum(flow["tallies"]["title"].values()) == flow["scoping"]
        assert sum(flow["tallies"]["abstract"].values()) == 237
        assert sum(flow["tallies"]["fulltext"].values()) == 204

    def test_demo_flow_numbers(self, demo_run):
        flow = demo_run["manifest"]["flow"]
        assert flow["scoping"] == 760
        assert flow["pruned"] == 100
        assert flow["eligible"] == 660
        assert flow["notable_added"] == 4
        assert flow["seeds"] == 664


class TestRandomizedConservation:
    def test_thousand_randomized_decision_sequences(self):
        rng = random.Random(20200826)
        for trial in range(1000):
            n = rng.randint(2, 14)
            store = scoping_store(n)
            engine = ScreeningEngine(store)
            ids = sorted(store.docs)
            rng.shuffle(ids)
            for doc_id in ids:
                engine.decide(doc_id, "title", "r1", rng.randint(0, 4),
                              decision_id=f"t-{trial}-{doc_id}")
                # identities hold mid-flight on every store state
                flow = prisma_flow(store, engine)
                assert flow.eligible == flow.scoping - flow.pruned
                assert flow.seeds == flow.eligible + flow.notable_added
            pooled = engine.pool_for_next_pass()
            retained = {
                d for d in ids if engine.effective_group(d, "title") >= 3
            }
            assert pooled | retained == set(ids)
            assert not (pooled & retained)
            for doc_id in sorted(pooled):
                pass_ = rng.choice(("abstract", "fulltext"))
                engine.decide(doc_id, pass_, "r1", rng.randint(0, 4),
                              decision_id=f"d-{trial}-{doc_id}")
            result = engine.finalize()
            flow = prisma_flow(store, engine)
            assert flow.eligible == result["eligible"]
            assert flow.pruned == result["excluded"]
            assert flow.eligible + flow.pruned == flow.scoping
            assert sum(flow.tallies["title"].values()) == n


class TestQueueViews:
    def test_reviewer_scoped_queue(self):
        store = scoping_store(3)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 4)
        assert engine.queue("title", "r1") == ["d001", "d002"]
        assert engine.queue("title", "r2") == ["d000", "d001", "d002"]
        assert engine.queue("title") == ["d001", "d002"]

    def test_unknown_pass_rejected(self):
        engine = ScreeningEngine(scoping_store(1))
        with pytest.raises(ValidationError):
            engine.queue("skim")

    def test_decision_log_is_append_only(self):
        store = scoping_store(1)
        engine = ScreeningEngine(store)
        engine.decide("d000", "title", "r1", 3)
        engine.decide("d000", "title", "r2", 0)
        count_before = len(store.decisions)
        engine.resolve_conflict("d000", "title", "r3", 2)
        assert len(store.decisions) == count_before + 1
