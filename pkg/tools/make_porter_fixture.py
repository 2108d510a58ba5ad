#!/usr/bin/env python3
"""Regenerate tests/data/porter_pairs.tsv from an independent reference stemmer.

The fixture freezes word -> stem pairs produced by a trusted external
implementation (any module exposing the classic ``PorterStemmer`` class
with ``stem(word, 0, len(word)-1)``), so the in-tree stemmer is tested
against an oracle it shares no code with.

Usage:
    python tools/make_porter_fixture.py --oracle /path/to/reference_porter.py
"""

from __future__ import annotations

import argparse
import importlib.util
from pathlib import Path

ROOTS = [
    "relate", "form", "condition", "rate", "valence", "hesitate", "digit",
    "conform", "radical", "differ", "vile", "analogue", "predicate",
    "operate", "feudal", "decisive", "hope", "callous", "formal",
    "sensitive", "sensible", "triplicate", "electric", "good", "revive",
    "allow", "infer", "airline", "gyroscope", "adjust", "defense",
    "irritate", "replace", "depend", "adopt", "commune", "active",
    "angular", "effect", "probate", "cease", "control", "roll", "migrate",
    "house", "urban", "move", "mobile", "study", "segregate", "locate",
    "nation", "city", "region", "employ", "labor", "social", "economy",
    "grow", "transit", "plan", "market", "rent", "tenure", "own",
    "reside", "dwell", "settle", "family", "child", "work", "educate",
    "health", "income", "poverty", "class", "gender", "age", "ethnic",
    "race", "culture", "politic", "policy", "govern", "theory", "model",
    "measure", "analyze", "survey", "sample", "census", "data",
    "evidence", "review", "compare", "explain", "predict", "describe",
    "observe", "test", "cause", "result", "change", "develop",
    "neighborhood", "individual", "household", "spatial", "temporal",
    "dynamic", "global", "local", "suburb", "metropolis", "relocate",
    "commute", "journey", "distance", "flow", "count", "density",
]

SUFFIXES = [
    "", "s", "es", "ed", "ing", "ings", "er", "ers", "ly", "ness",
    "ment", "ments", "tion", "ation", "ations", "al", "ally", "ality",
    "able", "ible", "ive", "ively", "iveness", "ize", "ized", "izing",
    "ization", "ful", "fulness", "ous", "ously", "ousness", "ism", "ist",
    "ity", "ities", "ance", "ence", "ant", "ent", "ator", "icate",
    "ative", "alize", "ical", "y", "ies", "eed",
]

# Classic exercise words for the algorithm's branch conditions.
HAND_WORDS = """
caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing
filing happy sky relational conditional rational valenci hesitanci
digitizer conformabli radicalli differentli vileli analogousli
vietnamization predication operator feudalism decisiveness hopefulness
callousness formaliti sensitiviti sensibiliti formative formalize
electriciti electrical hopeful goodness revival allowance inference
airliner gyroscopic adjustable defensible irritant replacement adjustment
dependent adoption homologou communism activate angulariti homologous
effective bowdlerize probate controll housing house household migration
migrations migratory mobility residential generalizations generalization
generalize generalized general abilities ability oscillate oscillating
skies sties crying string spring exceed succeed proceed feudally
archaeology archaeological geology geological rationalizations
"""


def load_oracle(path: Path):
    spec = importlib.util.spec_from_file_location("reference_porter", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    stemmer = mod.PorterStemmer()
    return lambda w: stemmer.stem(w, 0, len(w) - 1)


def build_vocab() -> list[str]:
    vocab = {root + suffix for root in ROOTS for suffix in SUFFIXES}
    vocab.update(HAND_WORDS.split())
    return sorted(vocab)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--oracle", required=True, type=Path,
                    help="path to a reference PorterStemmer module")
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent
                    / "tests" / "data" / "porter_pairs.tsv")
    args = ap.parse_args()

    oracle = load_oracle(args.oracle)
    vocab = build_vocab()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for word in vocab:
            fh.write(f"{word}\t{oracle(word)}\n")
    print(f"wrote {len(vocab)} pairs to {args.out}")


if __name__ == "__main__":
    main()
