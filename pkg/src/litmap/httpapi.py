"""HTTP API for the screening workflow.

Serves the review queue and accepts decisions; this is the only surface
the browser screening client talks to.  All mutation goes through one
lock, and retried submissions are idempotent through client-supplied
decision UUIDs.

Routes (JSON bodies, UTF-8):
    GET  /api/queue?pass=title|abstract|fulltext&page=N&page_size=M
    POST /api/decisions            {doc_id, pass, group, reviewer, note?, decision_id?}
    GET  /api/prisma
    GET  /api/conflicts
    POST /api/conflicts/{doc_id}/resolve   {pass, group, reviewer, note?, decision_id?}
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .corpus import CorpusStore, StoreInvariantError
from .screening import (
    NotQueuedError,
    OrderingError,
    ScreeningEngine,
    ValidationError,
    prisma_flow,
)

DEFAULT_PAGE_SIZE = 50

_RESOLVE_RE = re.compile(r"^/api/conflicts/([^/]+)/resolve$")


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


class ScreeningAPI:
    """Transport-independent request handling over one engine."""

    def __init__(self, store: CorpusStore, routing: str = "split"):
        self.store = store
        self.engine = ScreeningEngine(store, routing)
        self.lock = threading.Lock()

    # -- views ------------------------------------------------------------

    def queue_view(self, pass_: str, reviewer: Optional[str],
                   page: int, page_size: int) -> dict:
        try:
            pending = self.engine.queue(pass_, reviewer)
        except ValidationError as exc:
            raise _ApiError(400, "bad-pass", str(exc)) from exc
        if page < 0 or page_size < 1:
            raise _ApiError(400, "bad-page", "page must be >= 0, page_size >= 1")
        window = pending[page * page_size:(page + 1) * page_size]
        items = []
        for doc_id in window:
            doc = self.store.docs[doc_id]
            others = [
                r for r in self.store.decisions_for(doc_id, pass_)
                if not r.resolution and r.reviewer != reviewer
            ]
            items.append({
                "doc_id": doc_id,
                "title": doc.title,
                "year": doc.year,
                "venue": doc.venue,
                "cited_by": doc.cited_by,
                "pass": pass_,
                # colleagues' groups stay masked until this reviewer decides
                "others_decided": len(others),
                "my_decision": None,
            })
        return {
            "pass": pass_,
            "page": page,
            "page_size": page_size,
            "total_pending": len(pending),
            "items": items,
        }

    def post_decision(self, body: dict) -> tuple[int, dict]:
        for field in ("doc_id", "pass", "group", "reviewer"):
            if field not in body:
                raise _ApiError(400, "missing-field", f"missing field {field!r}")
        decision_id = body.get("decision_id")
        with self.lock:
            replay = bool(decision_id) and decision_id in self.store._decision_ids
            try:
                record, conflict = self.engine.decide(
                    body["doc_id"], body["pass"], body["reviewer"], body["group"],
                    note=body.get("note"), decision_id=decision_id,
                )
            except OrderingError as exc:
                raise _ApiError(409, "pass-order", str(exc)) from exc
            except NotQueuedError as exc:
                status = 404 if body["doc_id"] not in self.store.docs else 409
                raise _ApiError(status, "not-queued", str(exc)) from exc
            except ValidationError as exc:
                raise _ApiError(400, "invalid", str(exc)) from exc
            except StoreInvariantError as exc:
                raise _ApiError(409, "duplicate", str(exc)) from exc
        payload = {"record": record.to_record(), "conflict": conflict}
        return (200 if replay else 201), payload

    def prisma_view(self) -> dict:
        return prisma_flow(self.store, self.engine).to_dict()

    def conflicts_view(self) -> dict:
        return {"conflicts": [asdict(c) | {"pass": c.pass_}
                              for c in self.engine.conflicts()]}

    def post_resolution(self, doc_id: str, body: dict) -> tuple[int, dict]:
        for field in ("pass", "group", "reviewer"):
            if field not in body:
                raise _ApiError(400, "missing-field", f"missing field {field!r}")
        decision_id = body.get("decision_id")
        with self.lock:
            replay = bool(decision_id) and decision_id in self.store._decision_ids
            try:
                record = self.engine.resolve_conflict(
                    doc_id, body["pass"], body["reviewer"], body["group"],
                    note=body.get("note"), decision_id=decision_id,
                )
            except ValidationError as exc:
                raise _ApiError(400, "invalid", str(exc)) from exc
            except StoreInvariantError as exc:
                raise _ApiError(409, "duplicate", str(exc)) from exc
        return (200 if replay else 201), {"record": record.to_record()}

    # -- dispatch -----------------------------------------------------------

    def handle(self, method: str, path: str, query: dict, body: Optional[dict],
               reviewer: Optional[str]) -> tuple[int, dict]:
        if method == "GET" and path == "/api/queue":
            pass_ = query.get("pass", ["title"])[0]
            try:
                page = int(query.get("page", ["0"])[0])
                page_size = int(query.get("page_size", [str(DEFAULT_PAGE_SIZE)])[0])
            except ValueError:
                raise _ApiError(400, "bad-page", "page and page_size must be integers")
            return 200, self.queue_view(pass_, reviewer, page, page_size)
        if method == "GET" and path == "/api/prisma":
            return 200, self.prisma_view()
        if method == "GET" and path == "/api/conflicts":
            return 200, self.conflicts_view()
        if method == "POST" and path == "/api/decisions":
            if body is None:
                raise _ApiError(400, "bad-json", "request body must be JSON")
            if reviewer and "reviewer" not in body:
                body = body | {"reviewer": reviewer}
            return self.post_decision(body)
        match = _RESOLVE_RE.match(path)
        if method == "POST" and match:
            if body is None:
                raise _ApiError(400, "bad-json", "request body must be JSON")
            if reviewer and "reviewer" not in body:
                body = body | {"reviewer": reviewer}
            return self.post_resolution(match.group(1), body)
        raise _ApiError(404, "no-route", f"no route for {method} {path}")


class _Handler(BaseHTTPRequestHandler):
    api: ScreeningAPI    # set by the server factory

    def _respond(self, status: int, payload: dict) -> None:
        data = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _dispatch(self, method: str) -> None:
        parsed = urlparse(self.path)
        body = None
        if method == "POST":
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if raw:
                try:
                    body = json.loads(raw.decode("utf-8"))
                except json.JSONDecodeError:
                    self._respond(400, {"error": {"code": "bad-json",
                                                  "message": "body is not valid JSON"}})
                    return
        reviewer = self.headers.get("X-Reviewer")
        try:
            status, payload = self.api.handle(
                method, parsed.path, parse_qs(parsed.query), body, reviewer
            )
        except _ApiError as exc:
            self._respond(exc.status,
                          {"error": {"code": exc.code, "message": str(exc)}})
            return
        except Exception as exc:   # pragma: no cover - last-resort guard
            self._respond(500, {"error": {"code": "internal", "message": str(exc)}})
            return
        self._respond(status, payload)

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def log_message(self, fmt, *args) -> None:   # silence per-request noise
        pass


class ScreeningServer:
    """Threaded HTTP server wrapper with a background serve loop."""

    def __init__(self, store: CorpusStore, routing: str = "split",
                 host: str = "127.0.0.1", port: int = 0):
        self.api = ScreeningAPI(store, routing)
        handler = type("BoundHandler", (_Handler,), {"api": self.api})
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: Optional[threading.Thread] = None

    @property
    def address(self) -> tuple[str, int]:
        return self.httpd.server_address[:2]

    def start(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
