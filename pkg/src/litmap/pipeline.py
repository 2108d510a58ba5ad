"""End-to-end pipeline orchestration.

Stages run in a fixed order (harvest, screen, snowball, analyze); each
stage boundary saves a working snapshot and every mutation lands in an
append-only journal, so an aborted run resumes from the last checkpoint.
On a replay source the whole run is deterministic: identical config and
fixture produce byte-identical snapshots and reports.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from . import graphlab, langid, metrics, textlab
from .config import PipelineConfig
from .corpus import CorpusStore, Membership, Stage
from .harvest import (
    HarvestPlan,
    ReplaySource,
    ScholarlySource,
    SnowballCheckpoint,
    fetch_query_results,
    inject_notables,
    snowball,
)
from .screening import (
    IncompletePassError,
    ScreeningEngine,
    apply_decisions_file,
    prisma_flow,
)

STAGE_ORDER = ("harvest", "screen", "snowball", "analyze")

TOP_TERMS_ROWS = 25
MAX_OVERLAP_MIN_HITS = 2


class PipelineError(RuntimeError):
    exit_code = 1


class LiveSourceUnavailable(PipelineError):
    exit_code = 2


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class Paths:
    out: Path
    checkpoints: Path
    reports: Path
    journal: Path
    progress: Path
    working_snapshot: Path
    snapshot: Path
    manifest: Path

    @classmethod
    def under(cls, out_dir: Path) -> "Paths":
        out = Path(out_dir)
        ckpt = out / "checkpoints"
        return cls(
            out=out,
            checkpoints=ckpt,
            reports=out / "reports",
            journal=ckpt / "journal.jsonl",
            progress=ckpt / "progress.json",
            working_snapshot=ckpt / "store.jsonl",
            snapshot=out / "snapshot.jsonl",
            manifest=out / "manifest.json",
        )


class Pipeline:
    def __init__(
        self,
        config: PipelineConfig,
        resume: bool = False,
        source: Optional[ScholarlySource] = None,
        sleeper: Optional[Callable[[float], None]] = None,
    ):
        self.config = config
        self.paths = Paths.under(config.out_dir)
        self.paths.out.mkdir(parents=True, exist_ok=True)
        self.paths.checkpoints.mkdir(parents=True, exist_ok=True)
        self.paths.reports.mkdir(parents=True, exist_ok=True)
        self.sleeper = sleeper
        self._source = source

        if resume and self.paths.progress.exists():
            with open(self.paths.progress) as fh:
                self.progress = json.load(fh)
        else:
            self.progress = {"stages_done": [], "harvest_queries_done": []}
            for stale in (self.paths.journal, self.paths.progress,
                          self.paths.checkpoints / "snowball.json"):
                if stale.exists():
                    stale.unlink()

        self.store = CorpusStore(journal_path=self.paths.journal)
        if resume and self.paths.journal.exists():
            self.store.replay_journal(self.paths.journal)

    # -- plumbing ---------------------------------------------------------------

    def source(self) -> ScholarlySource:
        if self._source is not None:
            return self._source
        if self.config.source == "replay":
            self._source = ReplaySource(self.config.replay_path)
            return self._source
        raise LiveSourceUnavailable(
            "the live adapter needs a page parser; configure source = replay:PATH"
        )

    def created_at(self) -> str:
        if self.config.source == "replay":
            return self.source().created_at or "1970-01-01T00:00:00Z"
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

    def _save_progress(self) -> None:
        with open(self.paths.progress, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.progress, fh, sort_keys=True)

    def _stage_done(self, stage: str) -> None:
        if stage not in self.progress["stages_done"]:
            self.progress["stages_done"].append(stage)
        self._save_progress()
        self.store.save_snapshot(self.paths.working_snapshot, self.created_at())

    def _done(self, stage: str) -> bool:
        return stage in self.progress["stages_done"]

    # -- stages ------------------------------------------------------------------

    def stage_harvest(self) -> None:
        if self._done("harvest"):
            return
        source = self.source()
        for query in self.config.queries:
            if query.query_id in self.progress["harvest_queries_done"]:
                continue
            fetch_query_results(self.store, source, query, sleeper=self.sleeper)
            self.progress["harvest_queries_done"].append(query.query_id)
            self._save_progress()
        self._stage_done("harvest")

    def stage_screen(self) -> None:
        if self._done("screen"):
            return
        engine = ScreeningEngine(self.store, self.config.routing)
        if self.config.decisions_path is not None:
            apply_decisions_file(engine, self.config.decisions_path)
        try:
            engine.finalize()
        except IncompletePassError as exc:
            raise PipelineError(
                f"screening incomplete ({exc}); finish it via screen-serve "
                "or configure a decisions file"
            ) from exc
        self._stage_done("screen")

    def stage_snowball(self) -> None:
        if self._done("snowball"):
            return
        engine = ScreeningEngine(self.store, self.config.routing)
        inject_notables(self.store, self.config.notables)
        engine.mark_seeds()
        seed_ids = sorted(
            d for d, doc in self.store.docs.items() if doc.stage == Stage.SEED
        )
        if not seed_ids:
            raise PipelineError("no seeds: screening must finalize before snowball")
        checkpoint = SnowballCheckpoint(self.paths.checkpoints / "snowball.json")
        report = snowball(
            self.store, self.source(), seed_ids, self.config.plan,
            checkpoint=checkpoint, sleeper=self.sleeper,
        )
        self.progress["snowball"] = {
            "per_layer_new": {str(k): v for k, v in sorted(report.per_layer_new.items())},
            "edges_added": report.edges_added,
            "seeds": len(seed_ids),
        }
        self._stage_done("snowball")

    def stage_analyze(self) -> None:
        if self._done("analyze"):
            return
        analyze_store(self.store, self.config, self.paths.reports)
        self.store.save_snapshot(self.paths.snapshot, self.created_at())
        self._stage_done("analyze")

    def run(self) -> dict:
        self.stage_harvest()
        self.stage_screen()
        self.stage_snowball()
        self.stage_analyze()
        manifest = self.write_manifest()
        return manifest

    def write_manifest(self) -> dict:
        flow = json.loads((self.paths.reports / "flow.json").read_text("utf-8"))
        summary = json.loads(
            (self.paths.reports / "summary.json").read_text("utf-8")
        )
        artifacts = {
            "snapshot.jsonl": sha256_file(self.paths.snapshot),
        }
        for report in sorted(self.paths.reports.iterdir()):
            artifacts[f"reports/{report.name}"] = sha256_file(report)
        manifest = {
            "flow": flow,
            "intersections": summary["intersections"],
            "snapshot": "snapshot.jsonl",
            "artifacts": artifacts,
            "snowball": self.progress.get("snowball", {}),
        }
        with open(self.paths.manifest, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return manifest


def analyze_store(store: CorpusStore, config: PipelineConfig, reports_dir: Path) -> dict:
    """Compute every analysis artifact from the store into ``reports_dir``.

    Pure with respect to persisted snapshots: only report files are
    written (language codes are filled in on the in-memory store).
    """
    reports_dir = Path(reports_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)

    # language identification over titles
    profiles = langid.load_bundled_profiles()
    for doc in store.documents():
        if doc.language == "und" and doc.stage != Stage.EXCLUDED:
            detection = langid.detect(doc.title, profiles, margin=config.langid_margin)
            if detection.lang != "und":
                store.set_language(doc.doc_id, detection.lang)

    engine = ScreeningEngine(store, config.routing)
    flow = prisma_flow(store, engine)
    with open(reports_dir / "flow.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(flow.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")

    # query overlap analysis
    memberships = [
        Membership(doc_id, query_id, rank)
        for (doc_id, query_id), rank in sorted(store.memberships.items())
    ]
    known = [q.query_id for q in config.queries]
    patterns, summary = metrics.query_intersections(memberships, known)
    metrics.write_intersections_csv(patterns, reports_dir / "intersections.csv")
    genre_patterns, _ = metrics.query_intersections(
        metrics.collapse_to_genres(memberships, config.genre_of()),
        set(config.genre_of().values()),
    )
    metrics.write_intersections_csv(
        genre_patterns, reports_dir / "genre_intersections.csv"
    )
    overlap = metrics.maximal_overlap(memberships)
    with open(reports_dir / "maximal_overlap.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "hits", "title", "year", "cited_by"])
        for doc_id, hits in overlap:
            if hits < MAX_OVERLAP_MIN_HITS:
                continue
            doc = store.docs[doc_id]
            writer.writerow([doc_id, hits, doc.title,
                             "" if doc.year is None else doc.year, doc.cited_by])
    max_overlap_docs = sum(1 for _, h in overlap if h == summary.max_overlap)

    # growth and reading budgets
    corpus_docs = [d for d in store.documents() if d.stage != Stage.EXCLUDED]
    series, non_english = metrics.growth_series(corpus_docs)
    metrics.write_growth_csv(series, reports_dir / "growth.csv")
    budgets = [
        ("scoping", metrics.corpus_reading_budget(flow.scoping, config.reading)),
        ("eligible", metrics.corpus_reading_budget(flow.eligible, config.reading)),
        ("seeds", metrics.corpus_reading_budget(flow.seeds, config.reading)),
        ("citation_corpus",
         metrics.corpus_reading_budget(flow.citation_corpus, config.reading)),
    ]
    metrics.write_budget_csv(budgets, reports_dir / "budget.csv")

    # title-term analytics over the citation corpus
    tokenized = [
        (doc.doc_id, textlab.remove_stopwords(textlab.tokenize_title(doc.title)))
        for doc in corpus_docs
    ]
    top = textlab.top_terms([tokens for _, tokens in tokenized], TOP_TERMS_ROWS)
    with open(reports_dir / "top_terms.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["term", "count"])
        writer.writerows(top)
    stemmed = [(doc_id, textlab.stem_tokens(tokens)) for doc_id, tokens in tokenized]
    tdm = textlab.build_tdm(stemmed, config.min_freq)
    tdm.export(reports_dir / "tdm.txt", reports_dir / "tdm.vocab",
               reports_dir / "tdm.docs")
    with open(reports_dir / "associations.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["target", "term", "score"])
        for theme in sorted(config.themes):
            for stem in sorted(config.themes[theme]):
                if stem not in tdm:
                    continue
                result = textlab.associations(tdm, stem, config.min_score)
                for term, score in result.pairs:
                    writer.writerow([stem, term, repr(score)])

    # citation-graph analytics
    graph = graphlab.CitationGraph.from_store(store, graphlab.UNDIRECTED)
    graphlab.write_edge_list(graph, store, reports_dir / "edges.tsv")
    graphlab.write_centrality_report(graph, reports_dir / "centrality.csv")
    for theme in sorted(config.themes):
        sub = graphlab.theme_subgraph(graph, config.themes[theme])
        graphlab.write_centrality_report(
            sub, reports_dir / f"centrality_{theme}.csv"
        )

    # near-duplicate report
    with open(reports_dir / "near_duplicates.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id_a", "doc_id_b", "title", "year_a", "year_b"])
        for a, b in store.near_duplicates():
            writer.writerow([a, b, store.docs[a].title,
                             store.docs[a].year, store.docs[b].year])

    summary_doc = {
        "intersections": {
            "total_memberships": summary.total_memberships,
            "unique_docs": summary.unique_docs,
            "max_overlap": summary.max_overlap,
            "max_overlap_docs": max_overlap_docs,
        },
        "non_english_share": non_english,
        "corpus_size": len(corpus_docs),
        "tdm": {"terms": len(tdm.terms), "docs": len(tdm.docs),
                "min_freq": tdm.min_freq},
        "graph": {"nodes": len(graph), "edges": graph.edge_count()},
    }
    with open(reports_dir / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary_doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return summary_doc
