"""Title-text analytics.

Normalization, tokenization, stopword removal, stemming, the sparse
binary term-document matrix, raw term frequencies and pairwise term
association (phi) scores.  Everything here is pure over immutable
inputs, so call order and corpus order never change a result.
"""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .porter import stem_token

DEFAULT_MIN_FREQ = 50

_DIGITS_RE = re.compile(r"\d+")
_APOSTROPHES_RE = re.compile(r"['’ʼ]")
# any char that is not a unicode letter, a hyphen, or whitespace
_NON_LETTER_RE = re.compile(r"[^\W\d_]")
_LEADING_HYPHEN_RE = re.compile(r"(?<![^\W\d_])-")
_TRAILING_HYPHEN_RE = re.compile(r"-(?![^\W\d_])")


def tokenize_title(raw: str) -> list[str]:
    """Split a raw title into lowercase tokens.

    Digits are deleted outright, apostrophes are dropped, every other
    punctuation mark becomes a separator, and a hyphen survives only
    between two letters ("life-cycle" stays one token while the hyphen
    left behind by "1861-1900" dissolves).
    """
    text = unicodedata.normalize("NFKC", raw).lower()
    text = _DIGITS_RE.sub("", text)
    text = _APOSTROPHES_RE.sub("", text)
    text = "".join(
        ch if (ch == "-" or ch.isspace() or _NON_LETTER_RE.match(ch)) else " "
        for ch in text
    )
    text = _LEADING_HYPHEN_RE.sub(" ", text)
    text = _TRAILING_HYPHEN_RE.sub(" ", text)
    return text.split()


def normalize_title(raw: str) -> str:
    """Canonical whitespace-joined form of a title, used for dedup keys."""
    return " ".join(tokenize_title(raw))


def load_stopwords() -> frozenset[str]:
    """The pinned English stopword list bundled with the package."""
    text = resources.files("litmap.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


_STOPWORDS: frozenset[str] | None = None


def stopwords() -> frozenset[str]:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = load_stopwords()
    return _STOPWORDS


def remove_stopwords(tokens: Iterable[str], stoplist: frozenset[str] | None = None) -> list[str]:
    """Drop tokens present in the stoplist, preserving order."""
    stops = stopwords() if stoplist is None else stoplist
    return [t for t in tokens if t not in stops]


def stem_tokens(tokens: Iterable[str]) -> list[str]:
    return [stem_token(t) for t in tokens]


def title_stems(raw: str) -> list[str]:
    """Full title pipeline: tokenize, de-stopword, stem."""
    return stem_tokens(remove_stopwords(tokenize_title(raw)))


@dataclass
class TermDocMatrix:
    """Sparse binary incidence of stemmed terms against documents.

    ``terms`` is ordered by document frequency (descending, ties broken
    lexicographically); ``incidence[i]`` holds the sorted doc indices in
    which term i occurs, so df equals the row length by construction.
    """

    terms: list[str]
    docs: list[str]
    incidence: list[tuple[int, ...]]
    min_freq: int = DEFAULT_MIN_FREQ
    _term_index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._term_index = {t: i for i, t in enumerate(self.terms)}

    @property
    def df(self) -> dict[str, int]:
        return {t: len(self.incidence[i]) for i, t in enumerate(self.terms)}

    def row(self, term: str) -> tuple[int, ...]:
        try:
            return self.incidence[self._term_index[term]]
        except KeyError:
            raise TermNotFoundError(term) from None

    def __contains__(self, term: str) -> bool:
        return term in self._term_index

    def export(self, triplets_path, vocab_path, docs_path) -> None:
        """Coordinate-triplet export plus vocabulary and doc-id sidecars."""
        with open(triplets_path, "w", encoding="utf-8", newline="\n") as fh:
            for ti in range(len(self.terms)):
                for di in self.incidence[ti]:
                    fh.write(f"{ti}\t{di}\t1\n")
        with open(vocab_path, "w", encoding="utf-8", newline="\n") as fh:
            for term in self.terms:
                fh.write(term + "\n")
        with open(docs_path, "w", encoding="utf-8", newline="\n") as fh:
            for doc_id in self.docs:
                fh.write(doc_id + "\n")


class TermNotFoundError(KeyError):
    """Raised when an association query names a term outside the vocabulary."""


def build_tdm(
    tokenized_docs: Sequence[tuple[str, Sequence[str]]],
    min_freq: int = DEFAULT_MIN_FREQ,
) -> TermDocMatrix:
    """Build the binary matrix from (doc_id, stemmed tokens) pairs.

    Vocabulary is restricted to terms whose document frequency reaches
    ``min_freq``; term order is df-descending then lexicographic, which
    makes the matrix independent of input dict/corpus ordering.
    """
    doc_ids = [doc_id for doc_id, _ in tokenized_docs]
    postings: dict[str, list[int]] = {}
    for di, (_, tokens) in enumerate(tokenized_docs):
        for term in set(tokens):
            postings.setdefault(term, []).append(di)
    kept = [t for t, p in postings.items() if len(p) >= min_freq]
    kept.sort(key=lambda t: (-len(postings[t]), t))
    return TermDocMatrix(
        terms=kept,
        docs=doc_ids,
        incidence=[tuple(postings[t]) for t in kept],
        min_freq=min_freq,
    )


def phi(row_a: Sequence[int], row_b: Sequence[int], n_docs: int) -> float:
    """Pearson correlation of two binary indicator rows (phi coefficient).

    Rows are given as sorted doc-index postings over ``n_docs`` documents.
    Undefined (zero-variance) inputs raise ValueError; callers that need
    a soft signal filter those rows out beforehand.
    """
    na, nb = len(row_a), len(row_b)
    if na == 0 or nb == 0 or na == n_docs or nb == n_docs:
        raise ValueError("phi is undefined for zero-variance rows")
    n11 = len(set(row_a) & set(row_b))
    num = n_docs * n11 - na * nb
    den = math.sqrt(na * (n_docs - na) * nb * (n_docs - nb))
    return num / den


@dataclass
class AssociationResult:
    term: str
    pairs: list[tuple[str, float]]
    zero_variance: list[str]


def associations(tdm: TermDocMatrix, term: str, min_score: float) -> AssociationResult:
    """Score every other vocabulary term against ``term`` by phi.

    Returns pairs with score >= min_score sorted by score descending
    (ties lexicographic).  Zero-variance rows (terms present in no or
    every document) cannot be scored and are reported separately.
    """
    target = tdm.row(term)
    n = len(tdm.docs)
    zero_variance: list[str] = []
    if len(target) == 0 or len(target) == n:
        return AssociationResult(term, [], [term])
    pairs: list[tuple[str, float]] = []
    target_set = set(target)
    na = len(target)
    for i, other in enumerate(tdm.terms):
        if other == term:
            continue
        row = tdm.incidence[i]
        nb = len(row)
        if nb == 0 or nb == n:
            zero_variance.append(other)
            continue
        n11 = len(target_set.intersection(row))
        score = (n * n11 - na * nb) / math.sqrt(na * (n - na) * nb * (n - nb))
        if score >= min_score:
            pairs.append((other, score))
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return AssociationResult(term, pairs, zero_variance)


def top_terms(
    tokenized_docs: Iterable[Sequence[str]], n: int
) -> list[tuple[str, int]]:
    """Most frequent unstemmed (post-stopword) terms pooled across titles.

    Ties break lexicographically; asking for more terms than exist
    returns the whole vocabulary.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts: dict[str, int] = {}
    for tokens in tokenized_docs:
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]
