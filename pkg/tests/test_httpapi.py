"""The screening HTTP API, exercised over real sockets."""

from __future__ import annotations

import json
import urllib.error
import urllib.request
import uuid

import pytest

from litmap.corpus import CorpusStore, Document
from litmap.httpapi import ScreeningServer


def letters(n: int) -> str:
    out = []
    n += 1
    while n:
        n, r = divmod(n - 1, 26)
        out.append(chr(97 + r))
    return "".join(reversed(out))


@pytest.fixture
def server():
    store = CorpusStore()
    for i in range(20):
        doc_id = f"d{i:03d}"
        store.upsert_document(Document(doc_id, f"Queued paper {letters(i)}",
                                       2000 + i, venue="Urban Studies",
                                       cited_by=i * 3))
        store.add_membership(doc_id, "q1", i + 1)
    srv = ScreeningServer(store, port=0)
    srv.start()
    yield srv
    srv.shutdown()


def call(server, method, path, body=None, reviewer=None):
    host, port = server.address
    url = f"http://{host}:{port}{path}"
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(url, data=data, method=method)
    req.add_header("Content-Type", "application/json")
    if reviewer:
        req.add_header("X-Reviewer", reviewer)
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read().decode())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read().decode())


def decision_body(doc_id, group, reviewer="r1", pass_="title", decision_id=None):
    return {
        "doc_id": doc_id, "pass": pass_, "group": group, "reviewer": reviewer,
        "decision_id": decision_id or str(uuid.uuid4()),
    }


class TestQueue:
    def test_paged_pending_docs(self, server):
        status, payload = call(server, "GET", "/api/queue?pass=title&page_size=8")
        assert status == 200
        assert payload["total_pending"] == 20
        assert len(payload["items"]) == 8
        first = payload["items"][0]
        assert first["doc_id"] == "d000"
        assert first["title"].startswith("Queued paper")
        assert first["my_decision"] is None

    def test_page_beyond_end_is_empty_not_error(self, server):
        status, payload = call(server, "GET", "/api/queue?pass=title&page=99")
        assert status == 200 and payload["items"] == []

    def test_unknown_pass_is_400(self, server):
        status, payload = call(server, "GET", "/api/queue?pass=skim")
        assert status == 400 and payload["error"]["code"] == "bad-pass"

    def test_other_reviewers_masked(self, server):
        call(server, "POST", "/api/decisions", decision_body("d000", 4, "r1"))
        status, payload = call(server, "GET", "/api/queue?pass=title",
                               reviewer="r2")
        assert status == 200
        item = payload["items"][0]
        assert item["doc_id"] == "d000"
        assert item["others_decided"] == 1
        assert "group" not in item and "decisions" not in item


class TestDecisions:
    def test_post_stores_and_duplicates_collapse(self, server):
        body = decision_body("d000", 4)
        status, payload = call(server, "POST", "/api/decisions", body)
        assert status == 201
        assert payload["record"]["group"] == 4
        # identical retry (network blip): same record, not a second one
        status2, payload2 = call(server, "POST", "/api/decisions", body)
        assert status2 == 200
        assert payload2["record"]["decision_id"] == payload["record"]["decision_id"]
        assert len(server.api.store.decisions) == 1

    def test_validation_errors(self, server):
        status, payload = call(server, "POST", "/api/decisions",
                               decision_body("d000", 7))
        assert status == 400 and payload["error"]["code"] == "invalid"
        status, _ = call(server, "POST", "/api/decisions",
                         {"doc_id": "d000", "pass": "title", "group": 2})
        assert status == 400
        status, payload = call(server, "POST", "/api/decisions",
                               decision_body("ghost", 2))
        assert status == 404

    def test_pass_order_violation_is_409(self, server):
        status, payload = call(server, "POST", "/api/decisions",
                               decision_body("d000", 2, pass_="abstract"))
        assert status == 409 and payload["error"]["code"] == "pass-order"

    def test_reviewer_header_fallback(self, server):
        body = {"doc_id": "d001", "pass": "title", "group": 3,
                "decision_id": str(uuid.uuid4())}
        status, payload = call(server, "POST", "/api/decisions", body,
                               reviewer="r9")
        assert status == 201 and payload["record"]["reviewer"] == "r9"


class TestPrismaAndConflicts:
    def test_prisma_mirrors_engine(self, server):
        for i in range(5):
            call(server, "POST", "/api/decisions", decision_body(f"d{i:03d}", 4))
        status, flow = call(server, "GET", "/api/prisma")
        assert status == 200
        assert flow["scoping"] == 20
        assert flow["tallies"]["title"]["4"] == 5

    def test_conflict_lifecycle(self, server):
        call(server, "POST", "/api/decisions", decision_body("d000", 3, "r1"))
        status, payload = call(server, "POST", "/api/decisions",
                               decision_body("d000", 0, "r2"))
        assert status == 201 and payload["conflict"] is True
        status, conflicts = call(server, "GET", "/api/conflicts")
        assert status == 200
        assert conflicts["conflicts"][0]["doc_id"] == "d000"
        assert conflicts["conflicts"][0]["groups"] == {"r1": 3, "r2": 0}

        resolve = {"pass": "title", "group": 3, "reviewer": "r3",
                   "decision_id": str(uuid.uuid4())}
        status, payload = call(server, "POST", "/api/conflicts/d000/resolve",
                               resolve)
        assert status == 201 and payload["record"]["resolution"] is True
        status, payload = call(server, "POST", "/api/conflicts/d000/resolve",
                               resolve)
        assert status == 200        # idempotent retry
        _, conflicts = call(server, "GET", "/api/conflicts")
        assert conflicts["conflicts"] == []
        _, flow = call(server, "GET", "/api/prisma")
        assert flow["conflicts"] == 0

    def test_resolve_without_conflict_is_400(self, server):
        status, payload = call(server, "POST", "/api/conflicts/d000/resolve",
                               {"pass": "title", "group": 3, "reviewer": "r3"})
        assert status == 400


class TestRouting:
    def test_unknown_route_404(self, server):
        status, payload = call(server, "GET", "/api/nothing")
        assert status == 404 and payload["error"]["code"] == "no-route"

    def test_bad_json_body_400(self, server):
        host, port = server.address
        req = urllib.request.Request(
            f"http://{host}:{port}/api/decisions",
            data=b"{not json", method="POST",
            headers={"Content-Type": "application/json"},
        )
        with pytest.raises(urllib.error.HTTPError) as exc:
            urllib.request.urlopen(req)
        assert exc.value.code == 400


class TestConcurrency:
    def test_parallel_decisions_serialize(self, server):
        import threading

        errors = []

        def worker(offset):
            try:
                for i in range(offset, 20, 4):
                    call(server, "POST", "/api/decisions",
                         decision_body(f"d{i:03d}", 4, reviewer=f"r{offset}"))
            except Exception as exc:   # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(k,)) for k in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        assert len(server.api.store.decisions) == 20
        _, payload = call(server, "GET", "/api/queue?pass=title")
        assert payload["total_pending"] == 0


class TestServeOverWorkspace:
    def test_harvested_workspace_served_and_persisted(self, tmp_path):
        """harvest -> serve -> decide over HTTP -> state survives reload."""
        from litmap import cli
        from litmap.config import load_config
        from litmap.demodata import build_workspace
        from litmap.pipeline import Pipeline

        workspace = build_workspace(tmp_path / "demo")
        assert cli.main(["harvest", "--config", str(workspace.config_path)]) == 0

        config = load_config(workspace.config_path)
        pipeline = Pipeline(config, resume=True)
        assert len(pipeline.store) == 760

        server = ScreeningServer(pipeline.store, config.routing, port=0)
        server.start()
        try:
            status, queue = call(server, "GET", "/api/queue?pass=title&page_size=5")
            assert status == 200 and queue["total_pending"] == 760
            first = queue["items"][0]["doc_id"]
            status, _ = call(server, "POST", "/api/decisions",
                             decision_body(first, 4, "reviewer-a"))
            assert status == 201
        finally:
            server.shutdown()
        pipeline.store.save_snapshot(pipeline.paths.working_snapshot,
                                     pipeline.created_at())

        # both the journal and the working snapshot carry the decision
        reloaded = Pipeline(config, resume=True)
        assert len(reloaded.store.decisions) == 1
        assert reloaded.store.decisions[0].doc_id == first
        snap = CorpusStore.load_snapshot(reloaded.paths.working_snapshot)
        assert len(snap.decisions) == 1


def test_non_integer_paging_is_400(server):
    status, payload = call(server, "GET", "/api/queue?pass=title&page=abc")
    assert status == 400 and payload["error"]["code"] == "bad-page"
