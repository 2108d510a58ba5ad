"""Pipeline configuration.

One declarative INI-style file with nested key-value sections: global
pipeline settings, the harvest plan, reading-pace constants, one
``[query:ID]`` section per search query and one ``[notable:ID]`` section
per injected reference of notable interest.  All defaults mirror the
bundled demo constants (k=100, depth=2, min_freq=50, 5000 words at 225
wpm for 37 hours a week).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Document, QuerySpec
from .harvest import HarvestPlan
from .metrics import ReadingParams


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    base_dir: Path
    out_dir: Path
    source: str                    # "replay" | "live"
    replay_path: Path | None
    queries: list[QuerySpec]
    notables: list[Document]
    plan: HarvestPlan
    reading: ReadingParams
    min_freq: int = 50
    min_score: float = 0.1
    themes: dict[str, frozenset[str]] = field(default_factory=dict)
    routing: str = "split"
    decisions_path: Path | None = None
    langid_margin: float = 2.0

    def genre_of(self) -> dict[str, str]:
        return {q.query_id: q.genre for q in self.queries}

    def validate(self) -> None:
        if not self.queries:
            raise ConfigError("config defines no queries")
        if self.source not in ("replay", "live"):
            raise ConfigError(f"unknown source {self.source!r}")
        if self.source == "replay":
            if self.replay_path is None:
                raise ConfigError("source = replay requires a fixture path")
            if not self.replay_path.exists():
                raise ConfigError(f"replay fixture not found: {self.replay_path}")
        if self.decisions_path is not None and not self.decisions_path.exists():
            raise ConfigError(f"decisions file not found: {self.decisions_path}")
        try:
            self.plan.validate()
            self.reading.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.min_freq < 1:
            raise ConfigError("min_freq must be >= 1")
        seen = set()
        for q in self.queries:
            if q.query_id in seen:
                raise ConfigError(f"duplicate query id {q.query_id}")
            seen.add(q.query_id)


def _resolve(base: Path, raw: str) -> Path:
    p = Path(raw)
    return p if p.is_absolute() else base / p


def load_config(
    path: str | Path,
    out_override: str | None = None,
    source_override: str | None = None,
) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    base = path.parent

    def get(section: str, option: str, fallback=None):
        return parser.get(section, option, fallback=fallback)

    source_raw = source_override or get("pipeline", "source", "replay:replay.jsonl")
    if source_raw.startswith("replay:"):
        source = "replay"
        replay_path = _resolve(base, source_raw.split(":", 1)[1])
    elif source_raw == "live":
        source = "live"
        replay_path = None
    else:
        raise ConfigError(f"source must be 'replay:PATH' or 'live', got {source_raw!r}")

    out_dir = _resolve(base, out_override or get("pipeline", "out", "out"))

    queries: list[QuerySpec] = []
    notables: list[Document] = []
    for section in parser.sections():
        if section.startswith("query:"):
            qid = section.split(":", 1)[1].strip()
            try:
                queries.append(QuerySpec(
                    query_id=qid,
                    genre=parser.get(section, "genre"),
                    query_string=parser.get(section, "string"),
                    specifiers=frozenset(parser.get(section, "specifiers", fallback="")),
                    k=parser.getint(section, "k", fallback=100),
                ))
            except (configparser.Error, ValueError) as exc:
                raise ConfigError(f"[{section}]: {exc}") from exc
        elif section.startswith("notable:"):
            ref = section.split(":", 1)[1]
            try:
                year_raw = parser.get(section, "year", fallback=None)
                notables.append(Document(
                    doc_id=f"notable:{ref}",
                    title=parser.get(section, "title"),
                    year=int(year_raw) if year_raw else None,
                    authors=[a.strip() for a in
                             parser.get(section, "authors", fallback="").split(";")
                             if a.strip()],
                    venue=parser.get(section, "venue", fallback=None),
                    cited_by=parser.getint(section, "cited_by", fallback=0),
                ))
            except (configparser.Error, ValueError) as exc:
                raise ConfigError(f"[{section}]: {exc}") from exc

    themes: dict[str, frozenset[str]] = {}
    if parser.has_section("themes"):
        for name, stems in parser.items("themes"):
            themes[name] = frozenset(s.strip() for s in stems.split(",") if s.strip())

    decisions_raw = get("screening", "decisions", None)

    try:
        config = PipelineConfig(
            base_dir=base,
            out_dir=out_dir,
            source=source,
            replay_path=replay_path,
            queries=queries,
            notables=notables,
            plan=HarvestPlan(
                depth=parser.getint("plan", "depth", fallback=2),
                k=parser.getint("plan", "k", fallback=100),
                citer_ranking=get("plan", "citer_ranking", "cited-by-desc"),
            ),
            reading=ReadingParams(
                words_per_doc=parser.getfloat("reading", "words_per_doc", fallback=5000),
                wpm=parser.getfloat("reading", "wpm", fallback=225),
                hours_per_week=parser.getfloat("reading", "hours_per_week", fallback=37),
                weeks_per_year=parser.getfloat("reading", "weeks_per_year", fallback=52),
            ),
            min_freq=parser.getint("text", "min_freq", fallback=50),
            min_score=parser.getfloat("text", "min_score", fallback=0.1),
            themes=themes,
            routing=get("screening", "routing", "split"),
            decisions_path=_resolve(base, decisions_raw) if decisions_raw else None,
            langid_margin=parser.getfloat("langid", "margin", fallback=2.0),
        )
    except (configparser.Error, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    config.validate()
    return config
