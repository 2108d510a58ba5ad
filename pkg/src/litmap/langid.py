"""Character n-gram language identification for titles.

A profile per language holds smoothed log relative frequencies of the
bigrams and trigrams seen in its training text.  Detection scores a
title against every profile and keeps the maximum-likelihood language,
falling back to "und" when the winner's margin over the runner-up is
too small or the title is too short to carry a signal.
"""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

PROFILE_FORMAT = "litmap-langprofile"
PROFILE_VERSION = 1

DEFAULT_MARGIN = 2.0        # nats per title
MIN_LETTERS = 3

# Add-one smoothing runs over a fixed virtual n-gram space rather than
# each profile's observed vocabulary, so a profile trained on little
# text gets a low unseen-gram floor instead of an inflated one.
VIRTUAL_ALPHABET = 1 << 16

_WS_RE = re.compile(r"\s+")

BUNDLED_LANGS = ("de", "en", "es", "fr", "pt", "zh")


def _normalize(text: str) -> str:
    text = unicodedata.normalize("NFKC", text).lower()
    return _WS_RE.sub(" ", text).strip()


def _ngrams(text: str) -> list[str]:
    """Bigrams and trigrams over the space-padded text."""
    padded = f" {text} "
    grams = [padded[i:i + 2] for i in range(len(padded) - 1)]
    grams += [padded[i:i + 3] for i in range(len(padded) - 2)]
    return grams


@dataclass
class LanguageProfile:
    lang: str
    ngram_logfreq: dict[str, float]
    floor: float                # log-prob assigned to unseen n-grams

    def score(self, text: str) -> float:
        norm = _normalize(text)
        if not norm:
            return self.floor
        logfreq = self.ngram_logfreq
        floor = self.floor
        return sum(logfreq.get(g, floor) for g in _ngrams(norm))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#{PROFILE_FORMAT}\t{PROFILE_VERSION}\t{self.lang}\n")
            fh.write(f"#floor\t{self.floor!r}\n")
            for gram in sorted(self.ngram_logfreq):
                fh.write(f"{gram}\t{self.ngram_logfreq[gram]!r}\n")

    @classmethod
    def load(cls, path: str | Path) -> "LanguageProfile":
        with open(path, "r", encoding="utf-8") as fh:
            head = fh.readline().rstrip("\n").split("\t")
            if len(head) != 3 or head[0] != f"#{PROFILE_FORMAT}":
                raise ValueError(f"{path}: not a {PROFILE_FORMAT} file")
            if int(head[1]) != PROFILE_VERSION:
                raise ValueError(
                    f"{path}: profile version {head[1]}, expected {PROFILE_VERSION}"
                )
            lang = head[2]
            floor_line = fh.readline().rstrip("\n").split("\t")
            if floor_line[0] != "#floor":
                raise ValueError(f"{path}: missing floor line")
            floor = float(floor_line[1])
            logfreq: dict[str, float] = {}
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                gram, value = line.split("\t")
                logfreq[gram] = float(value)
        return cls(lang, logfreq, floor)


def train_profile(samples: Iterable[str], lang: str) -> LanguageProfile:
    """Build a profile from raw text samples with add-one smoothing."""
    counts: dict[str, int] = {}
    total = 0
    for sample in samples:
        norm = _normalize(sample)
        if not norm:
            continue
        for gram in _ngrams(norm):
            counts[gram] = counts.get(gram, 0) + 1
            total += 1
    if total == 0:
        raise ValueError(f"no usable training text for {lang!r}")
    denom = total + VIRTUAL_ALPHABET
    logfreq = {g: math.log((c + 1) / denom) for g, c in counts.items()}
    return LanguageProfile(lang, logfreq, math.log(1 / denom))


@dataclass(frozen=True)
class Detection:
    lang: str
    confidence: float           # winner's margin over the runner-up, in nats


def detect(
    title: str,
    profiles: Mapping[str, LanguageProfile],
    margin: float = DEFAULT_MARGIN,
    min_letters: int = MIN_LETTERS,
) -> Detection:
    """Maximum-likelihood language of a title, or "und" below confidence.

    The argmax is deterministic regardless of profile-map iteration
    order: scores tie-break on the language code.
    """
    if not profiles:
        raise ValueError("no profiles supplied")
    norm = _normalize(title)
    if sum(ch.isalpha() for ch in norm) < min_letters:
        return Detection("und", 0.0)
    scored = sorted(
        ((profile.score(norm), lang) for lang, profile in profiles.items()),
        key=lambda pair: (-pair[0], pair[1]),
    )
    best_score, best_lang = scored[0]
    gap = best_score - scored[1][0] if len(scored) > 1 else math.inf
    if gap < margin:
        return Detection("und", gap)
    return Detection(best_lang, gap)


_SAMPLES_PKG = "litmap.data.lang_samples"
_PROFILES_PKG = "litmap.data.lang_profiles"


def load_bundled_samples(lang: str) -> list[str]:
    text = resources.files("litmap.data").joinpath(f"lang_samples/{lang}.txt").read_text("utf-8")
    return [line for line in text.splitlines() if line.strip()]


def load_bundled_profiles(langs: Optional[Iterable[str]] = None) -> dict[str, LanguageProfile]:
    profiles: dict[str, LanguageProfile] = {}
    base = resources.files("litmap.data")
    for lang in (langs or BUNDLED_LANGS):
        with resources.as_file(base.joinpath(f"lang_profiles/{lang}.profile")) as path:
            profiles[lang] = LanguageProfile.load(path)
    return profiles


def train_bundled_profiles() -> dict[str, LanguageProfile]:
    """Retrain every bundled profile from its checked-in sample text."""
    return {lang: train_profile(load_bundled_samples(lang), lang) for lang in BUNDLED_LANGS}
