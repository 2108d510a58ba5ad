"""Citation-graph analytics.

Exact shortest-path betweenness via Brandes' accumulation, bridging
document rankings, and theme-restricted subnetworks.  Graphs are
immutable after construction; the default mode projects citation edges
onto an undirected graph, since bridging is a connectivity notion, with
a directed mode available.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .textlab import title_stems

DIRECTED = "directed"
UNDIRECTED = "undirected-projection"


@dataclass
class NodeAttrs:
    title: str = ""
    year: Optional[int] = None
    cited_by: int = 0
    stems: frozenset[str] = frozenset()


@dataclass
class CitationGraph:
    mode: str = UNDIRECTED
    nodes: dict[str, NodeAttrs] = field(default_factory=dict)
    adjacency: dict[str, set[str]] = field(default_factory=dict)

    def add_node(self, doc_id: str, attrs: Optional[NodeAttrs] = None) -> None:
        if doc_id not in self.nodes:
            self.nodes[doc_id] = attrs or NodeAttrs()
            self.adjacency[doc_id] = set()
        elif attrs is not None:
            self.nodes[doc_id] = attrs

    def add_edge(self, citing: str, cited: str) -> None:
        if citing == cited:
            raise ValueError(f"self-loop on {citing}")
        self.add_node(citing)
        self.add_node(cited)
        self.adjacency[citing].add(cited)
        if self.mode == UNDIRECTED:
            self.adjacency[cited].add(citing)

    def edge_count(self) -> int:
        total = sum(len(nbrs) for nbrs in self.adjacency.values())
        return total // 2 if self.mode == UNDIRECTED else total

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def from_store(cls, store, mode: str = UNDIRECTED,
                   include_excluded: bool = False) -> "CitationGraph":
        """Build the graph over the store's corpus.

        Excluded documents are left out by default; edges survive only
        between surviving endpoints.
        """
        from .corpus import Stage

        graph = cls(mode=mode)
        for doc in store.documents():
            if not include_excluded and doc.stage == Stage.EXCLUDED:
                continue
            graph.add_node(doc.doc_id, NodeAttrs(
                title=doc.title,
                year=doc.year,
                cited_by=doc.cited_by,
                stems=frozenset(title_stems(doc.title)),
            ))
        for (citing, cited) in sorted(store.edges):
            if citing in graph.nodes and cited in graph.nodes:
                graph.add_edge(citing, cited)
        return graph


def betweenness(graph: CitationGraph, normalized: bool = False) -> dict[str, float]:
    """Exact betweenness centrality of every node (Brandes accumulation).

    Unnormalized scores count unordered source-target pairs in undirected
    mode and ordered pairs in directed mode; normalized scores divide by
    the standard pair count for the mode.  Degree-zero nodes score 0 and
    are skipped as sources, which cannot change any other score.
    """
    ids = sorted(graph.nodes)
    scores = {doc_id: 0.0 for doc_id in ids}
    touched = {doc_id for doc_id in ids if graph.adjacency[doc_id]}
    for doc_id in ids:
        touched.update(graph.adjacency[doc_id])
    # isolated nodes can't lie on or terminate a path; skipping them
    # leaves every other score unchanged
    active = [doc_id for doc_id in ids if doc_id in touched]
    index = {doc_id: i for i, doc_id in enumerate(active)}
    adj: list[list[int]] = [
        sorted(index[nbr] for nbr in graph.adjacency[doc_id] if nbr in index)
        for doc_id in active
    ]
    n_active = len(active)
    accum = [0.0] * n_active

    for s in range(n_active):
        # single-source shortest paths with path counting
        dist = [-1] * n_active
        sigma = [0] * n_active
        preds: list[list[int]] = [[] for _ in range(n_active)]
        dist[s] = 0
        sigma[s] = 1
        order: list[int] = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v]
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # dependency accumulation in reverse BFS order
        delta = [0.0] * n_active
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                accum[w] += delta[w]

    n = len(graph.nodes)
    if graph.mode == UNDIRECTED:
        scale = 0.5
        pairs = (n - 1) * (n - 2) / 2
    else:
        scale = 1.0
        pairs = (n - 1) * (n - 2)
    if normalized:
        scale = scale / pairs if pairs > 0 else 0.0
    for doc_id, i in index.items():
        scores[doc_id] = accum[i] * scale
    return scores


def bridging_rank(graph: CitationGraph, top_n: int) -> list[tuple[str, float]]:
    """Top documents by betweenness; ties broken by cited-by then id."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    scores = betweenness(graph, normalized=False)
    ranked = sorted(
        scores.items(),
        key=lambda kv: (-kv[1], -graph.nodes[kv[0]].cited_by, kv[0]),
    )
    return ranked[:top_n]


def theme_subgraph(graph: CitationGraph, stem_set: Iterable[str]) -> CitationGraph:
    """Induced subgraph on nodes whose title stems intersect ``stem_set``."""
    stems = set(stem_set)
    if not stems:
        raise ValueError("stem_set must be non-empty")
    sub = CitationGraph(mode=graph.mode)
    for doc_id, attrs in graph.nodes.items():
        if attrs.stems & stems:
            sub.add_node(doc_id, attrs)
    for doc_id in sub.nodes:
        for nbr in graph.adjacency[doc_id]:
            if nbr in sub.nodes:
                sub.adjacency[doc_id].add(nbr)
    return sub


def write_edge_list(graph: CitationGraph, store, path) -> None:
    """Edge-list export: citing TAB cited TAB layer, sorted."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (citing, cited) in sorted(store.edges):
            if citing in graph.nodes and cited in graph.nodes:
                fh.write(f"{citing}\t{cited}\t{store.edges[(citing, cited)]}\n")


def write_centrality_report(graph: CitationGraph, path, top_n: Optional[int] = None) -> None:
    """Centrality CSV: doc_id, title, year, cited_by, betweenness, rank."""
    ranked = bridging_rank(graph, top_n or max(len(graph), 1))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "title", "year", "cited_by", "betweenness", "rank"])
        for rank, (doc_id, score) in enumerate(ranked, start=1):
            attrs = graph.nodes[doc_id]
            writer.writerow([
                doc_id, attrs.title,
                "" if attrs.year is None else attrs.year,
                attrs.cited_by, repr(score), rank,
            ])
