"""Bundled deterministic demo workspace.

Generates the replay fixture, scripted screening decisions and pipeline
config that together exercise the whole toolkit end to end: eleven
ranked queries over a scoping corpus of 760 unique documents (1100
ranked slots), a screening pass that prunes exactly 100, four injected
references of notable interest, and a two-layer citation universe to
snowball through.  Everything is generated from a fixed seed, so two
builds of the workspace are byte-identical.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass
from pathlib import Path

from .corpus import Document, QuerySpec
from .textlab import normalize_title

SEED = 20200826
FIXED_TIME = "2020-08-26T00:00:00Z"
UUID_NS = uuid.UUID("8b1e63d4-5c0a-4d36-9a3c-2b7f6e41aa77")

REVIEWER = "reviewer-a"

# title-pass group sizes, group 0..4
TITLE_TALLIES = (223, 81, 137, 212, 107)
ABSTRACT_CHECKS = 237
FULLTEXT_CHECKS = 204
ABSTRACT_EXCLUDED = 56
FULLTEXT_EXCLUDED = 44

_GEO = "(Britain OR UK OR England)"

QUERIES: list[QuerySpec] = [
    QuerySpec("1_IMH", "IMH", "internal migration housing"),
    QuerySpec("2_IM", "IM", "internal migration"),
    QuerySpec("2G", "IM", f"internal migration {_GEO}", frozenset("G")),
    QuerySpec("2GD", "IM", f"internal migration {_GEO} census", frozenset("GD")),
    QuerySpec("2GT", "IM", f'internal migration {_GEO} "housing market"', frozenset("GT")),
    QuerySpec("3_RM", "RM", "residential mobility"),
    QuerySpec("3G", "RM", f"residential mobility {_GEO}", frozenset("G")),
    QuerySpec("3GD", "RM", f"residential mobility {_GEO} census", frozenset("GD")),
    QuerySpec("3GT", "RM", f'residential mobility {_GEO} "housing market"', frozenset("GT")),
    QuerySpec("4_UM", "UM", "urban migration"),
    QuerySpec("4GT", "UM", f'urban migration {_GEO} "housing market"', frozenset("GT")),
]

QUERY_IDS = [q.query_id for q in QUERIES]

# The four injected references of notable interest.
NOTABLES: list[Document] = [
    Document("notable:ravenstein-laws", "The Laws of Migration", 1885,
             ["EG Ravenstein"], "Journal of the statistical society of London", 5012),
    Document("notable:sjaastad-costs", "The costs and returns of human migration", 1962,
             ["LA Sjaastad"], "Journal of Political Economy", 6057),
    Document("notable:lee-theory", "A Theory of Migration", 1966,
             ["ES Lee"], "Demography", 6592),
    Document("notable:rossi-families", "Why families move", 1980,
             ["PH Rossi"], "SAGE Publications", 1833),
]

# Documents pinned to rank 1 of each query plus the maximal-overlap set;
# fingerprints are the exact query sets whose top-100 lists carry them.
_RM_HEAVY = ("3_RM", "3G", "3GD", "3GT", "2GT", "4GT")

PINNED: list[tuple[str, int, str, int, tuple[str, ...], str | None]] = [
    # (title, year, authors, cited_by, fingerprint, rank1-of)
    ("Does land use planning shape regional economies? A simultaneous analysis "
     "of housing supply, internal migration and local employment growth in the "
     "Netherlands", 2009, "Vermeulen and Ommeren", 63,
     ("1_IMH", "2_IM", "2GT", "3GT", "4GT"), "1_IMH"),
    ("Internal migration in developed countries", 1997, "Greenwood", 1090,
     ("2_IM", "2G"), "2_IM"),
    ("Population movement within the UK", 2005, "Champion", 117,
     ("2G", "2_IM", "2GD"), "2G"),
    ("Internal migration and ethnic groups: evidence for Britain from the 2001 "
     "Census", 2008, "Finney and Simpson", 132,
     ("2GD", "2G", "2GT", "2_IM"), "2GD"),
    ("Migration in a mature economy: emigration and internal migration in "
     "England and Wales 1861-1900", 2003, "Baines", 396,
     ("2GT", "2_IM", "2G"), "2GT"),
    ("Residential satisfaction as an intervening variable in residential "
     "mobility", 1974, "Speare", 876,
     ("3_RM", "3G"), "3_RM"),
    ("Tied down or room to move? Investigating the relationships between "
     "housing tenure, employment status and residential mobility in Britain",
     2002, "Böheim and Taylor", 241,
     ("3G", "3_RM", "3GT"), "3G"),
    ("Life-cycle, housing tenure and intra-urban residential mobility: A "
     "causal model", 1973, "Pickvance", 86,
     ("3GD", "3_RM", "3GT"), "3GD"),
    ("Intra-urban migration and housing submarkets: Theory and evidence", 2004,
     "Jones and Leishman", 99,
     ("3GT", "4GT"), "3GT"),
    ("The intra-urban migration process: a perspective", 1970,
     "Brown and Moore", 1223,
     ("4_UM", "4GT"), "4_UM"),
    ("Spatial mobility, tenure mobility, and emerging social divisions in the "
     "UK housing market", 1987, "Forrest", 82,
     ("4GT", "3GT"), "4GT"),
    # maximal overlap: two documents covering all four RM queries plus the
    # two housing-market specifier queries
    ("The definition of housing market areas and strategic planning", 2002,
     "Jones", 113, _RM_HEAVY, None),
    ("Moving house, creating home: Exploring residential mobility", 2002,
     "Winstanley et al.", 182, _RM_HEAVY, None),
    ("Intercensal mobility in a Victorian city", 1977, "Dennis", 44,
     ("3_RM", "3G", "3GD", "2GD", "2G"), None),
    ("In and out of Chinatown: Residential mobility and segregation of New "
     "York City's Chinese", 1991, "Zhou and Logan", 173,
     ("3_RM", "3G", "3GT", "4_UM", "4GT"), None),
    ("Interregional migration and housing structure in an East European "
     "transition country: A view of Lithuania 2001-2008", 2009, "Bloze", 29,
     ("1_IMH", "2_IM", "2GT", "3GT", "4GT"), None),
    ("Ethnic segregation and residential mobility: relocations of minority "
     "ethnic groups in the Netherlands", 2010, "Bolt and Kempen", 138,
     ("3_RM", "3G", "3GT", "2GT", "4GT"), None),
    ("Explanations for long-distance counter-urban migration into fringe "
     "areas in Denmark", 2011, "Andersen", 43,
     ("3_RM", "3G", "3GT", "4_UM", "4GT"), None),
]

# synthetic fingerprint-size profile for the remaining scoping documents:
# sizes 4/3/2/1 for (760 - 18 pinned) docs, summing with the pinned
# memberships to exactly 11 x 100 ranked slots
SYNTH_SIZES = [4] * 9 + [3] * 36 + [2] * 191 + [1] * 506

_CORE = [
    "migration", "housing", "mobility", "population", "household",
    "neighbourhood", "segregation", "tenure", "employment", "settlement",
    "relocation", "urbanisation", "gentrification", "displacement",
    "commuting", "homeownership", "renting", "dwelling", "suburb", "city",
    "region", "labour", "income", "poverty", "inequality", "ethnicity",
    "ageing", "fertility", "density", "growth", "decline", "planning",
    "policy", "market", "price", "rent", "career", "transition", "network",
    "flow",
]
_ADJ = [
    "internal", "residential", "urban", "rural", "regional", "metropolitan",
    "suburban", "local", "interregional", "intercensal", "longitudinal",
    "comparative", "spatial", "social", "economic", "demographic", "housing",
    "ethnic", "seasonal", "selective", "circular", "return", "onward",
    "counterurban", "stepwise",
]
_PLACE = [
    "Britain", "England", "Wales", "Scotland", "London", "Manchester",
    "Birmingham", "Glasgow", "Leeds", "Sheffield", "Yorkshire", "Merseyside",
    "the Netherlands", "Germany", "Sweden", "Denmark", "France", "Spain",
    "Italy", "Poland", "Lithuania", "China", "Japan", "Korea", "Canada",
    "Australia", "America", "Chicago", "Boston", "Amsterdam", "Stockholm",
    "Copenhagen", "Norway", "Finland", "Ireland", "Austria", "Belgium",
    "Portugal", "Hungary", "Estonia",
]
_METHOD = ["census", "panel", "survey", "register", "cohort", "longitudinal",
           "comparative", "case"]
_VENUES = [
    "Urban Studies", "Housing Studies", "Population Space and Place",
    "Journal of Housing Economics", "Demography", "Regional Studies",
    "Environment and Planning", "Journal of Ethnic and Migration Studies",
    "International Migration Review", "Transactions of British Geographers",
]
_SURNAMES = [
    "Hartley", "Nowak", "Berger", "Lindgren", "Okafor", "Tanaka", "Silva",
    "Moretti", "Kovacs", "Duval", "Eriksen", "Bauer", "Castillo", "Novotna",
    "Farrell", "Ishida", "Petrov", "Olsen", "Mbeki", "Larsson", "Quinn",
    "Haas", "Romero", "Vasquez", "Becker", "Fontaine", "Soares", "Keller",
    "Andrade", "Morgan", "Whitfield", "Carver", "Donnelly", "Esposito",
    "Grieg", "Halvorsen",
]

_NON_EN = {
    "es": ["La movilidad residencial y el mercado de la vivienda en {p}",
           "Migración interna y cambio urbano en {p}",
           "Vivienda, familia y migración en las ciudades de {p}",
           "El crecimiento de la población y la vivienda en {p}",
           "Segregación residencial y barrios en {p}"],
    "de": ["Wohnungsmarkt und Binnenwanderung in {p}",
           "Umzüge und Wohnverhältnisse der Haushalte in {p}",
           "Stadtwachstum, Wohnen und Wanderung in {p}",
           "Die Wohnungsfrage und regionale Mobilität in {p}",
           "Segregation und Nachbarschaft in den Städten von {p}"],
    "fr": ["Mobilité résidentielle et marché du logement en {p}",
           "Migrations internes et croissance urbaine en {p}",
           "Le logement des ménages et les déménagements en {p}",
           "Ségrégation résidentielle et quartiers en {p}",
           "La question du logement et la mobilité en {p}"],
    "pt": ["Mobilidade residencial e mercado de habitação em {p}",
           "Migração interna e crescimento urbano em {p}",
           "Habitação das famílias e mudanças de casa em {p}",
           "Segregação residencial e bairros em {p}",
           "População, habitação e mobilidade em {p}"],
    "zh": ["{p}的住房市场与居住流动性研究",
           "{p}的人口迁移与城市住房",
           "{p}城市住房与家庭搬迁的分析",
           "{p}的居住隔离与社区变化",
           "{p}的住房政策与人口流动"],
}
_NON_EN_PLACES = {
    "es": ["Madrid", "Barcelona", "Valencia", "Sevilla", "Bilbao", "Granada",
           "Zaragoza", "Murcia", "Salamanca", "Oviedo"],
    "de": ["Berlin", "Hamburg", "München", "Köln", "Leipzig", "Dresden",
           "Frankfurt", "Stuttgart", "Bremen", "Hannover"],
    "fr": ["Paris", "Lyon", "Marseille", "Toulouse", "Bordeaux", "Nantes",
           "Lille", "Strasbourg", "Rennes", "Grenoble"],
    "pt": ["Lisboa", "Porto", "Coimbra", "Braga", "Faro", "Aveiro",
           "Setúbal", "Évora", "Guimarães", "Viseu"],
    "zh": ["北京", "上海", "广州", "深圳", "成都", "杭州", "南京", "武汉",
           "西安", "重庆"],
}


@dataclass
class DemoWorkspace:
    root: Path
    replay_path: Path
    decisions_path: Path
    config_path: Path
    expected: dict


class _TitleMint:
    """Deterministic unique-title factory.

    Uniqueness is enforced on the normalized form, which strips digits,
    so two titles may never differ by numbers alone.
    """

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.seen: set[str] = set()

    def claim(self, title: str) -> str:
        norm = normalize_title(title)
        if norm in self.seen:
            raise ValueError(f"duplicate normalized title: {title!r}")
        self.seen.add(norm)
        return title

    def english(self) -> str:
        rng = self.rng
        for _ in range(64):
            pattern = rng.randrange(8)
            c = lambda: rng.choice(_CORE)
            a = lambda: rng.choice(_ADJ)
            p = lambda: rng.choice(_PLACE)
            if pattern == 0:
                t = f"{a().capitalize()} {c()} and {c()} in {p()}"
            elif pattern == 1:
                t = f"The {c()} of {a()} {c()} in {p()}"
            elif pattern == 2:
                t = f"{c().capitalize()}, {c()} and {c()}: evidence from {p()}"
            elif pattern == 3:
                t = f"{a().capitalize()} {c()} in {p()}: a {rng.choice(_METHOD)} study"
            elif pattern == 4:
                t = f"Understanding {a()} {c()} across {p()} and {p()}"
            elif pattern == 5:
                t = f"{c().capitalize()} and the {c()} of {a()} {c()}"
            elif pattern == 6:
                t = f"Rethinking {c()}: {a()} {c()} in {p()}"
            else:
                t = f"{a().capitalize()} {c()}, {c()} and the {c()} question in {p()}"
            norm = normalize_title(t)
            if norm not in self.seen:
                self.seen.add(norm)
                return t
        raise RuntimeError("title pool exhausted")

    def foreign(self, lang: str) -> str:
        rng = self.rng
        for _ in range(64):
            t = rng.choice(_NON_EN[lang]).format(p=rng.choice(_NON_EN_PLACES[lang]))
            norm = normalize_title(t)
            if norm not in self.seen:
                self.seen.add(norm)
                return t
        raise RuntimeError(f"title pool exhausted for {lang}")


def _decision_uuid(doc_id: str, pass_: str, reviewer: str) -> str:
    return str(uuid.uuid5(UUID_NS, f"{doc_id}|{pass_}|{reviewer}"))


def _year(rng: random.Random) -> int:
    # skew towards recent decades, spanning 1885-2020
    return 2020 - int(135 * rng.random() ** 2.6)


def _cited_by(rng: random.Random) -> int:
    return min(5000, int(rng.paretovariate(0.9)))


def _authors(rng: random.Random) -> list[str]:
    n = rng.choice((1, 1, 2, 2, 3))
    return rng.sample(_SURNAMES, n)


def build_workspace(root: str | Path) -> DemoWorkspace:
    """Write replay.jsonl, decisions.jsonl and pipeline.cfg under ``root``."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    mint = _TitleMint(rng)

    docs: dict[str, Document] = {}
    counter = [0]

    def new_id() -> str:
        counter[0] += 1
        return f"gs:{counter[0]:05d}"

    # -- scoping corpus: pinned documents first -------------------------------
    fingerprints: dict[str, tuple[str, ...]] = {}
    rank1_of: dict[str, str] = {}
    pinned_ids: list[str] = []
    for title, year, authors, cited, fp, rank1 in PINNED:
        doc_id = new_id()
        docs[doc_id] = Document(
            doc_id, mint.claim(title), year, [authors],
            rng.choice(_VENUES), cited,
        )
        fingerprints[doc_id] = fp
        pinned_ids.append(doc_id)
        if rank1:
            rank1_of[rank1] = doc_id

    # -- synthetic scoping documents with capacity-feasible fingerprints ------
    capacity = {q: 100 for q in QUERY_IDS}
    for fp in fingerprints.values():
        for q in fp:
            capacity[q] -= 1
    synth_ids: list[str] = []
    for size in SYNTH_SIZES:
        doc_id = new_id()
        docs[doc_id] = Document(
            doc_id, mint.english(), _year(rng), _authors(rng),
            rng.choice(_VENUES), _cited_by(rng),
        )
        synth_ids.append(doc_id)
        open_queries = [q for q in QUERY_IDS if capacity[q] > 0]
        if size >= len(open_queries):
            chosen = open_queries[:size]
        else:
            # weight by remaining capacity to keep the assignment feasible
            chosen: list[str] = []
            pool = list(open_queries)
            for _ in range(size):
                weights = [capacity[q] for q in pool]
                pick = rng.choices(range(len(pool)), weights=weights)[0]
                chosen.append(pool.pop(pick))
        for q in chosen:
            capacity[q] -= 1
        fingerprints[doc_id] = tuple(chosen)
    assert all(v == 0 for v in capacity.values()), capacity

    scoping_ids = pinned_ids + synth_ids
    assert len(scoping_ids) == 760
    assert sum(len(fp) for fp in fingerprints.values()) == 1100

    # -- ranked result lists ---------------------------------------------------
    searches: dict[str, list[str]] = {}
    for q in QUERY_IDS:
        members = [d for d in scoping_ids if q in fingerprints[d]]
        assert len(members) == 100, (q, len(members))
        first = rank1_of[q]
        rest = [d for d in members if d != first]
        rng.shuffle(rest)
        searches[q] = [first] + rest

    # -- scripted screening decisions ------------------------------------------
    title_groups: dict[str, int] = {d: 4 for d in pinned_ids}
    remaining_tallies = list(TITLE_TALLIES)
    remaining_tallies[4] -= len(pinned_ids)
    grouped_pool = [g for g, n in enumerate(remaining_tallies) for _ in range(n)]
    rng.shuffle(grouped_pool)
    assert len(grouped_pool) == len(synth_ids)
    title_groups.update(dict(zip(synth_ids, grouped_pool)))

    pooled = sorted(d for d in scoping_ids if title_groups[d] <= 2)
    assert len(pooled) == ABSTRACT_CHECKS + FULLTEXT_CHECKS == 441
    routed = list(pooled)
    rng.shuffle(routed)
    abstract_docs = sorted(routed[:ABSTRACT_CHECKS])
    fulltext_docs = sorted(routed[ABSTRACT_CHECKS:])
    abstract_zero = set(rng.sample(abstract_docs, ABSTRACT_EXCLUDED))
    fulltext_zero = set(rng.sample(fulltext_docs, FULLTEXT_EXCLUDED))

    decision_lines: list[dict] = []

    def decision(doc_id: str, pass_: str, group: int) -> None:
        decision_lines.append({
            "decision_id": _decision_uuid(doc_id, pass_, REVIEWER),
            "doc_id": doc_id,
            "pass": pass_,
            "group": group,
            "reviewer": REVIEWER,
            "decided_at": FIXED_TIME,
        })

    for doc_id in scoping_ids:
        decision(doc_id, "title", title_groups[doc_id])
    deeper_group = lambda: rng.choice((1, 2, 2, 3, 3, 4))
    for doc_id in abstract_docs:
        decision(doc_id, "abstract", 0 if doc_id in abstract_zero else deeper_group())
    for doc_id in fulltext_docs:
        decision(doc_id, "fulltext", 0 if doc_id in fulltext_zero else deeper_group())

    excluded = abstract_zero | fulltext_zero
    eligible = [d for d in scoping_ids if d not in excluded]
    assert len(excluded) == 100 and len(eligible) == 660

    # -- notable references -----------------------------------------------------
    for doc in NOTABLES:
        mint.claim(doc.title)
        docs[doc.doc_id] = doc
    seeds = eligible + [doc.doc_id for doc in NOTABLES]
    assert len(seeds) == 664

    # -- citation universe -------------------------------------------------------
    layer1_pool = []
    for i in range(520):
        lang = None
        roll = rng.random()
        if roll < 0.030:
            lang = "zh"
        elif roll < 0.070:
            lang = rng.choice(("es", "de", "fr", "pt"))
        title = mint.foreign(lang) if lang else mint.english()
        doc_id = new_id()
        docs[doc_id] = Document(
            doc_id, title, _year(rng), _authors(rng),
            rng.choice(_VENUES), _cited_by(rng),
        )
        layer1_pool.append(doc_id)
    # a deliberate near-duplicate of the oldest notable, four years on
    near_dup_id = new_id()
    docs[near_dup_id] = Document(
        near_dup_id, "The Laws of Migration", 1889, ["EG Ravenstein"],
        "Journal of the Royal Statistical Society", 4100,
    )
    layer1_pool.append(near_dup_id)

    layer2_pool = []
    for i in range(620):
        lang = None
        roll = rng.random()
        if roll < 0.035:
            lang = "zh"
        elif roll < 0.080:
            lang = rng.choice(("es", "de", "fr", "pt"))
        title = mint.foreign(lang) if lang else mint.english()
        doc_id = new_id()
        docs[doc_id] = Document(
            doc_id, title, _year(rng), _authors(rng),
            rng.choice(_VENUES), _cited_by(rng),
        )
        layer2_pool.append(doc_id)

    citers: dict[str, list[str]] = {}

    def draw_citers(pool: list[str], n: int, exclude: str) -> list[str]:
        chosen: set[str] = set()
        while len(chosen) < n:
            pick = rng.choice(pool)
            if pick != exclude:
                chosen.add(pick)
        ordered = sorted(chosen)
        rng.shuffle(ordered)   # fixture order is deliberately not the ranking
        return ordered

    # seeds: heavy tails for the notables, light for the rest
    citers["notable:lee-theory"] = draw_citers(layer1_pool, 110, "")
    citers["notable:ravenstein-laws"] = draw_citers(layer1_pool, 40, "")
    if near_dup_id not in citers["notable:ravenstein-laws"]:
        citers["notable:ravenstein-laws"][-1] = near_dup_id
    citers["notable:sjaastad-costs"] = draw_citers(layer1_pool, 35, "")
    citers["notable:rossi-families"] = draw_citers(layer1_pool, 25, "")
    for doc_id in pinned_ids:
        if doc_id in excluded:
            continue
        citers[doc_id] = draw_citers(layer1_pool, rng.randint(6, 16), doc_id)
    for doc_id in eligible:
        if doc_id in citers or rng.random() < 0.58:
            continue
        lst = draw_citers(layer1_pool, rng.randint(1, 7), doc_id)
        # occasionally a fellow scoping document (even a pruned one) cites it
        if rng.random() < 0.10:
            other = rng.choice(scoping_ids)
            if other != doc_id and other not in lst:
                lst[rng.randrange(len(lst))] = other
        citers[doc_id] = lst
    for doc_id in layer1_pool:
        if rng.random() < 0.52:
            continue
        citers[doc_id] = draw_citers(layer2_pool, rng.randint(1, 5), doc_id)

    # -- fixture-wide invariants ---------------------------------------------------
    keys = {}
    for doc in docs.values():
        key = f"{normalize_title(doc.title)}|{doc.year}"
        assert key not in keys, (key, doc.doc_id, keys.get(key))
        keys[key] = doc.doc_id

    # -- write artifacts -------------------------------------------------------------
    replay_path = root / "replay.jsonl"
    with open(replay_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(
            {"kind": "header", "format": "litmap-replay", "format_version": 1,
             "created_at": FIXED_TIME},
            sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n")
        for doc_id in sorted(docs):
            fh.write(json.dumps(docs[doc_id].to_record(), sort_keys=True,
                                ensure_ascii=False, separators=(",", ":")) + "\n")
        for q in QUERY_IDS:
            fh.write(json.dumps(
                {"kind": "search", "query_id": q, "doc_ids": searches[q]},
                sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n")
        for doc_id in sorted(citers):
            fh.write(json.dumps(
                {"kind": "citers", "doc_id": doc_id, "doc_ids": citers[doc_id]},
                sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n")

    decisions_path = root / "decisions.jsonl"
    with open(decisions_path, "w", encoding="utf-8", newline="\n") as fh:
        for line in decision_lines:
            fh.write(json.dumps(line, sort_keys=True, ensure_ascii=False,
                                separators=(",", ":")) + "\n")

    config_path = root / "pipeline.cfg"
    with open(config_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_render_config())

    expected = {
        "scoping": 760,
        "pruned": 100,
        "eligible": 660,
        "notable_added": 4,
        "seeds": 664,
        "total_memberships": 1100,
        "unique_docs": 760,
        "max_overlap": 6,
        "max_overlap_docs": sorted(
            d for d, fp in fingerprints.items() if len(fp) == 6
        ),
        "title_tallies": dict(enumerate(TITLE_TALLIES)),
        "pooled": 441,
        "abstract_checks": ABSTRACT_CHECKS,
        "fulltext_checks": FULLTEXT_CHECKS,
        "near_dup_pair": sorted(["notable:ravenstein-laws", near_dup_id]),
        "rank1": {q: rank1_of[q] for q in QUERY_IDS},
    }
    return DemoWorkspace(root, replay_path, decisions_path, config_path, expected)


def _render_config() -> str:
    lines = [
        "# litmap demo pipeline configuration",
        "[pipeline]",
        "out = out",
        "source = replay:replay.jsonl",
        "",
        "[plan]",
        "depth = 2",
        "k = 100",
        "citer_ranking = cited-by-desc",
        "",
        "[reading]",
        "words_per_doc = 5000",
        "wpm = 225",
        "hours_per_week = 37",
        "weeks_per_year = 52",
        "",
        "[text]",
        "min_freq = 50",
        "min_score = 0.1",
        "",
        "[langid]",
        "margin = 2.0",
        "",
        "[themes]",
        "housing = hous",
        "social = social",
        "",
        "[screening]",
        "routing = split",
        "decisions = decisions.jsonl",
        "",
    ]
    lines.append("# The four broad genre queries carry their canonical strings;")
    lines.append("# the narrower specifier phrasings are demo placeholders.")
    lines.append("")
    for q in QUERIES:
        lines.append(f"[query:{q.query_id}]")
        lines.append(f"genre = {q.genre}")
        lines.append(f"specifiers = {''.join(sorted(q.specifiers))}")
        lines.append(f"string = {q.query_string}")
        lines.append("k = 100")
        lines.append("")
    for doc in NOTABLES:
        lines.append(f"[notable:{doc.doc_id.split(':', 1)[1]}]")
        lines.append(f"title = {doc.title}")
        lines.append(f"year = {doc.year}")
        lines.append(f"authors = {'; '.join(doc.authors)}")
        lines.append(f"venue = {doc.venue}")
        lines.append(f"cited_by = {doc.cited_by}")
        lines.append("")
    return "\n".join(lines)
