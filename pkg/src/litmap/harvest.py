"""Query harvesting and capped snowball expansion.

Everything talks to a pluggable :class:`ScholarlySource`; tests and the
bundled pipeline use the deterministic :class:`ReplaySource`, while live
scraping sits behind :class:`LiveSource` with a politeness gate and is
excluded from any verification.  Expansion is breadth-first by layer
with per-node caps, records citation edges as it goes, and checkpoints
progress so an aborted run can resume.
"""

from __future__ import annotations

import json
import random
import time
import urllib.request
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Protocol

from .corpus import CorpusStore, Document, QuerySpec, Stage

REPLAY_FORMAT = "litmap-replay"
REPLAY_VERSION = 1

CITED_BY_DESC = "cited-by-desc"
SOURCE_ORDER = "source-order"

MAX_RETRIES = 5
BACKOFF_BASE = 0.5


class SourceError(RuntimeError):
    """Transient source failure; the caller may retry."""


class SourceFailure(RuntimeError):
    """A source call failed after exhausting retries."""


class UnknownDocumentError(KeyError):
    """Citer lookup for a document the source has never heard of."""


@dataclass
class HarvestPlan:
    depth: int = 2
    k: int = 100
    citer_ranking: str = CITED_BY_DESC

    def validate(self) -> None:
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.citer_ranking not in (CITED_BY_DESC, SOURCE_ORDER):
            raise ValueError(f"unknown citer_ranking {self.citer_ranking!r}")


class ScholarlySource(Protocol):
    def search(self, query: QuerySpec, k: int) -> list[Document]: ...
    def citers(self, doc_id: str, k: Optional[int]) -> list[Document]: ...


class ReplaySource:
    """Deterministic source backed by a JSON Lines fixture.

    The fixture embeds full document records plus ranked id lists for
    searches (keyed by query id) and citer lookups (keyed by doc id).
    Repeated identical calls return identical results by construction.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._docs: dict[str, Document] = {}
        self._searches: dict[str, list[str]] = {}
        self._citers: dict[str, list[str]] = {}
        self.created_at: str = ""
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            raise SourceError(f"replay fixture not found: {self.path}")
        with open(self.path, "r", encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != REPLAY_FORMAT:
                raise SourceError(f"{self.path}: not a {REPLAY_FORMAT} file")
            if header.get("format_version") != REPLAY_VERSION:
                raise SourceError(
                    f"{self.path}: replay version {header.get('format_version')!r}, "
                    f"expected {REPLAY_VERSION}"
                )
            self.created_at = header.get("created_at", "")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                kind = rec["kind"]
                if kind == "document":
                    doc = Document.from_record(rec)
                    self._docs[doc.doc_id] = doc
                elif kind == "search":
                    self._searches[rec["query_id"]] = list(rec["doc_ids"])
                elif kind == "citers":
                    self._citers[rec["doc_id"]] = list(rec["doc_ids"])
                else:
                    raise SourceError(f"{self.path}: unknown record kind {kind!r}")

    def _materialize(self, doc_ids: list[str]) -> list[Document]:
        return [replace(self._docs[d], authors=list(self._docs[d].authors))
                for d in doc_ids]

    def search(self, query: QuerySpec, k: int) -> list[Document]:
        try:
            ranked = self._searches[query.query_id]
        except KeyError:
            raise SourceError(
                f"replay fixture has no results for query {query.query_id!r}"
            ) from None
        return self._materialize(ranked[:k])

    def citers(self, doc_id: str, k: Optional[int] = None) -> list[Document]:
        if doc_id not in self._docs:
            raise UnknownDocumentError(doc_id)
        ranked = self._citers.get(doc_id, [])
        if k is not None:
            ranked = ranked[:k]
        return self._materialize(ranked)

    def document(self, doc_id: str) -> Document:
        return self._docs[doc_id]

    def all_documents(self) -> list[Document]:
        return [self._docs[d] for d in sorted(self._docs)]


class RateGate:
    """Serializes outbound requests: fixed minimum delay plus uniform jitter."""

    def __init__(
        self,
        min_delay: float = 2.0,
        jitter: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
        rng: Optional[random.Random] = None,
    ):
        self.min_delay = min_delay
        self.jitter = jitter
        self._clock = clock
        self._sleep = sleeper
        self._rng = rng or random.Random()
        self._last: Optional[float] = None

    def wait(self) -> None:
        now = self._clock()
        if self._last is not None:
            due = self._last + self.min_delay + self._rng.uniform(0, self.jitter)
            if now < due:
                self._sleep(due - now)
                now = self._clock()
        self._last = now


def with_retries(
    call: Callable[[], list],
    max_retries: int = MAX_RETRIES,
    sleeper: Optional[Callable[[float], None]] = None,
    backoff_base: float = BACKOFF_BASE,
):
    """Run a source call, retrying transient errors with exponential backoff."""
    sleeper = sleeper if sleeper is not None else time.sleep
    attempt = 0
    while True:
        try:
            return call()
        except SourceError as exc:
            attempt += 1
            if attempt > max_retries:
                raise SourceFailure(
                    f"source failed after {max_retries} retries: {exc}"
                ) from exc
            sleeper(backoff_base * 2 ** (attempt - 1))


class LiveSource:
    """Anonymous-request adapter skeleton for a live scholarly backend.

    Issues plain HTTP GETs (no login, no cookies) through a politeness
    gate.  Page parsing is adapter-private and must be supplied by the
    caller; the package ships no scraping rules, and nothing here is
    exercised by the verification suite.
    """

    def __init__(
        self,
        search_url: Callable[[str, int], str],
        citers_url: Callable[[str, int], str],
        parser: Callable[[str], list[Document]],
        gate: Optional[RateGate] = None,
        fetch: Optional[Callable[[str], str]] = None,
    ):
        self._search_url = search_url
        self._citers_url = citers_url
        self._parser = parser
        self._gate = gate or RateGate()
        self._fetch = fetch or self._default_fetch

    @staticmethod
    def _default_fetch(url: str) -> str:
        req = urllib.request.Request(url, headers={"User-Agent": "litmap/0.1"})
        try:
            with urllib.request.urlopen(req, timeout=30) as resp:
                return resp.read().decode("utf-8", errors="replace")
        except OSError as exc:
            raise SourceError(str(exc)) from exc

    def search(self, query: QuerySpec, k: int) -> list[Document]:
        self._gate.wait()
        return self._parser(self._fetch(self._search_url(query.query_string, k)))[:k]

    def citers(self, doc_id: str, k: Optional[int] = None) -> list[Document]:
        self._gate.wait()
        cap = k if k is not None else 10 ** 6
        return self._parser(self._fetch(self._citers_url(doc_id, cap)))[: (k or None)]


# -- harvesting operations ----------------------------------------------------


def fetch_query_results(
    store: CorpusStore,
    source: ScholarlySource,
    query: QuerySpec,
    sleeper: Optional[Callable[[float], None]] = None,
) -> list[Document]:
    """Run one ranked query, upsert results, and record memberships."""
    results = with_retries(lambda: source.search(query, query.k), sleeper=sleeper)
    results = results[: query.k]
    for rank, doc in enumerate(results, start=1):
        incoming = replace(
            doc, authors=list(doc.authors), layer=0, stage=Stage.IDENTIFIED
        )
        report = store.upsert_document(incoming)
        store.add_membership(report.doc_id, query.query_id, rank)
    return results


def fetch_citers(
    source: ScholarlySource,
    doc_id: str,
    k: int,
    ranking: str = CITED_BY_DESC,
    sleeper: Optional[Callable[[float], None]] = None,
) -> list[Document]:
    """Citing documents of one node, capped at k.

    cited-by-desc re-ranks the source's full list by citation count
    (ties by doc id) before truncating; source-order trusts the backend's
    own ranking.
    """
    if ranking == SOURCE_ORDER:
        return with_retries(lambda: source.citers(doc_id, k), sleeper=sleeper)
    full = with_retries(lambda: source.citers(doc_id, None), sleeper=sleeper)
    full.sort(key=lambda d: (-d.cited_by, d.doc_id))
    return full[:k]


def inject_notables(store: CorpusStore, notables: list[Document]) -> list[str]:
    """Add configured references of notable interest directly to the seeds."""
    ids = []
    for doc in notables:
        incoming = replace(doc, authors=list(doc.authors), layer=0, stage=Stage.SEED)
        ids.append(store.upsert_document(incoming).doc_id)
    return ids


@dataclass
class SnowballReport:
    per_layer_new: dict[int, int] = field(default_factory=dict)
    edges_added: int = 0
    expanded: int = 0


class SnowballCheckpoint:
    """Progress file for resumable expansion: frontier plus completed ids."""

    def __init__(self, path: Optional[str | Path]):
        self.path = Path(path) if path else None
        self.state: Optional[dict] = None
        if self.path and self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                self.state = json.load(fh)

    def write(self, state: dict) -> None:
        self.state = state
        if self.path:
            tmp = self.path.with_suffix(".tmp")
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                json.dump(state, fh, sort_keys=True)
            tmp.replace(self.path)

    def clear(self) -> None:
        self.state = None
        if self.path and self.path.exists():
            self.path.unlink()


def snowball(
    store: CorpusStore,
    source: ScholarlySource,
    seed_ids: list[str],
    plan: HarvestPlan,
    checkpoint: Optional[SnowballCheckpoint] = None,
    sleeper: Optional[Callable[[float], None]] = None,
) -> SnowballReport:
    """Breadth-first cited-by expansion from the seed set.

    Layer l+1 is the union of the top-k citers of every document first
    seen at layer l, deduplicated through the store's upsert; expansion
    stops at plan.depth.  Every fetched citer contributes an edge
    (citer -> cited) tagged with the layer it was harvested at.
    """
    plan.validate()
    if not seed_ids:
        raise ValueError("snowball requires a non-empty seed set")
    for doc_id in seed_ids:
        if doc_id not in store.docs:
            raise ValueError(f"seed {doc_id} not present in store")

    if checkpoint is not None and checkpoint.state:
        st = checkpoint.state
        layer = st["layer"]
        frontier = list(st["frontier"])
        completed = set(st["completed"])
        next_new = list(st["next_new"])
        per_layer_new = {int(k): v for k, v in st["per_layer_new"].items()}
        edges_added = st["edges_added"]
        expanded = st["expanded"]
    else:
        layer = 1
        frontier = sorted(set(seed_ids))
        completed = set()
        next_new = []
        per_layer_new = {}
        edges_added = 0
        expanded = 0

    def save_state() -> None:
        if checkpoint is not None:
            checkpoint.write({
                "layer": layer,
                "frontier": frontier,
                "completed": sorted(completed),
                "next_new": next_new,
                "per_layer_new": {str(k): v for k, v in per_layer_new.items()},
                "edges_added": edges_added,
                "expanded": expanded,
            })

    while layer <= plan.depth:
        per_layer_new.setdefault(layer, 0)
        for cited_id in frontier:
            if cited_id in completed:
                continue
            citing_docs = fetch_citers(
                source, cited_id, plan.k, plan.citer_ranking, sleeper=sleeper
            )
            for doc in citing_docs:
                incoming = replace(
                    doc, authors=list(doc.authors),
                    layer=layer, stage=Stage.CITATION_CORPUS,
                )
                report = store.upsert_document(incoming)
                if report.status == "inserted":
                    per_layer_new[layer] += 1
                    next_new.append(report.doc_id)
                if report.doc_id != cited_id:
                    if store.add_edge(report.doc_id, cited_id, layer):
                        edges_added += 1
            completed.add(cited_id)
            expanded += 1
            save_state()
        layer += 1
        frontier = sorted(next_new)
        next_new = []
        completed = set()
        save_state()

    if checkpoint is not None:
        checkpoint.clear()
    return SnowballReport(per_layer_new, edges_added, expanded)
