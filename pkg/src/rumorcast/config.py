"""Runtime configuration.

A single JSON file with sections {tokenizer, sentiment, taxonomy, tsne,
geometry, colors, server}. Every section is optional; missing keys fall
back to the defaults below. The path can be given explicitly, or through
the RUMORCAST_CONFIG environment variable.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

ENV_CONFIG_VAR = "RUMORCAST_CONFIG"

DEFAULT_STOPWORDS = [
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "has",
    "he", "in", "is", "it", "its", "of", "on", "or", "she", "that", "the",
    "they", "this", "to", "was", "were", "will", "with",
]

# Scores in [-1, 1]; CJK entries are two-character tokens so they line up
# with the bigram tokenizer.
DEFAULT_LEXICON = {
    "good": 0.7, "great": 0.9, "love": 0.8, "true": 0.5, "support": 0.6,
    "safe": 0.6, "happy": 0.8, "win": 0.5, "help": 0.5, "hero": 0.7,
    "bad": -0.6, "fake": -0.8, "terrible": -1.0, "panic": -0.8,
    "danger": -0.7, "death": -0.9, "lie": -0.8, "fear": -0.7,
    "crash": -0.7, "riot": -0.8, "fraud": -0.9, "misleading": -0.7,
    "真实": 0.5, "点赞": 0.7, "平安": 0.6, "感动": 0.7,
    "谣言": -0.8, "虚假": -0.8, "恐慌": -0.9, "危险": -0.7, "死亡": -0.9,
}

DEFAULT_TAXONOMY = [
    {"label": "World News", "triggers": [
        "election", "protest", "war", "president", "border", "foreign",
        "embassy", "overseas", "国际", "外交", "战争", "总统"]},
    {"label": "Health", "triggers": [
        "virus", "vaccine", "hospital", "disease", "outbreak", "doctor",
        "病毒", "疫苗", "医院", "疫情"]},
    {"label": "Finance", "triggers": [
        "stock", "bank", "money", "market", "tax", "price",
        "股票", "银行", "物价", "金融"]},
    {"label": "Society", "triggers": [
        "police", "school", "city", "crime", "arrest", "traffic",
        "警察", "学校", "城市", "交通"]},
    {"label": "Other", "triggers": []},
]

DEFAULT_TOPIC_PALETTE = [
    "#4C78A8", "#F58518", "#54A24B", "#B279A2", "#E45756",
    "#72B7B2", "#EECA3B", "#9D755D", "#BAB0AC", "#FF9DA6",
]


@dataclass(frozen=True)
class TopicRule:
    label: str
    triggers: frozenset[str]


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 750
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    learning_rate: float = 200.0
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 7


@dataclass(frozen=True)
class GeometryConfig:
    # Propagation view. Radii are abstract units; label thresholds are
    # calibrated at total_radius = 400 and scale with it.
    total_radius: float = 400.0
    center_r_scale: float = 60.0
    center_r_min: float = 12.0
    center_r_max: float = 60.0
    ring_pad: float = 8.0
    min_ring_width: float = 10.0
    gap_angle: float = 0.015
    min_sector_angle: float = 0.04
    label_min_arc: float = 28.0
    label_min_radial: float = 12.0
    # Projection glyphs, in canvas units at the 1000x1000 reference canvas.
    glyph_r_scale: float = 16.0
    glyph_r_min: float = 3.0
    glyph_r_max: float = 16.0
    glyph_arc_gap: float = 0.18
    glyph_arc_width: float = 5.0


@dataclass(frozen=True)
class ColorsConfig:
    sentiment_negative: str = "#D0342C"
    sentiment_neutral: str = "#E7C24B"
    sentiment_positive: str = "#3FA34D"
    topic_palette: tuple[str, ...] = tuple(DEFAULT_TOPIC_PALETTE)

    def for_sentiment(self, label: str) -> str:
        return {
            "negative": self.sentiment_negative,
            "neutral": self.sentiment_neutral,
            "positive": self.sentiment_positive,
        }[label]


@dataclass(frozen=True)
class ServerConfig:
    port: int = 8787
    embed_wait_s: float = 10.0
    audit_path: str = "verdicts.jsonl"
    posts_limit: int = 100


@dataclass(frozen=True)
class Config:
    stopwords: frozenset[str] = frozenset(DEFAULT_STOPWORDS)
    keywords_per_case: int = 10
    lexicon: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_LEXICON))
    sentiment_threshold: float = 0.1
    taxonomy: tuple[TopicRule, ...] = ()
    tsne: TsneConfig = TsneConfig()
    geometry: GeometryConfig = GeometryConfig()
    colors: ColorsConfig = ColorsConfig()
    server: ServerConfig = ServerConfig()

    def topic_labels(self) -> list[str]:
        return [rule.label for rule in self.taxonomy]


def _default_taxonomy() -> tuple[TopicRule, ...]:
    return tuple(
        TopicRule(entry["label"], frozenset(entry["triggers"]))
        for entry in DEFAULT_TAXONOMY
    )


def read_stopword_file(path: str | Path) -> frozenset[str]:
    """One token per line; blank lines ignored."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(tok.strip() for tok in lines if tok.strip())


def read_lexicon_file(path: str | Path) -> dict[str, float]:
    """One "token<TAB>score" per line, scores in [-1, 1]."""
    lexicon: dict[str, float] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        token, _, score = line.partition("\t")
        value = float(score)
        if not -1.0 <= value <= 1.0:
            raise ValueError(f"lexicon score out of [-1, 1] for {token!r}: {value}")
        lexicon[token.strip()] = value
    return lexicon


def read_taxonomy_file(path: str | Path) -> tuple[TopicRule, ...]:
    """JSON list of {label, triggers}; the last entry must be the catch-all."""
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    rules = tuple(TopicRule(e["label"], frozenset(e["triggers"])) for e in entries)
    _check_taxonomy(rules)
    return rules


def _check_taxonomy(rules: tuple[TopicRule, ...]) -> None:
    if not rules:
        raise ValueError("taxonomy must not be empty")
    if rules[-1].triggers:
        raise ValueError("last taxonomy entry must be a catch-all with no triggers")


def _build_section(cls, data: dict):
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = {k: v for k, v in data.items() if k in known}
    if cls is ColorsConfig and "topic_palette" in kwargs:
        kwargs["topic_palette"] = tuple(kwargs["topic_palette"])
    return cls(**kwargs)


def load_config(path: str | Path | None = None) -> Config:
    """Load configuration from `path`, $RUMORCAST_CONFIG, or defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG_VAR) or None
    if path is None:
        return Config(taxonomy=_default_taxonomy())

    data = json.loads(Path(path).read_text(encoding="utf-8"))

    tok = data.get("tokenizer", {})
    stopwords = frozenset(tok["stopwords"]) if "stopwords" in tok else frozenset(DEFAULT_STOPWORDS)
    if "stopword_file" in tok:
        stopwords = read_stopword_file(tok["stopword_file"])
    keywords_per_case = int(tok.get("keywords_per_case", 10))

    sent = data.get("sentiment", {})
    lexicon = dict(sent["lexicon"]) if "lexicon" in sent else dict(DEFAULT_LEXICON)
    if "lexicon_file" in sent:
        lexicon = read_lexicon_file(sent["lexicon_file"])
    threshold = float(sent.get("threshold", 0.1))

    tax = data.get("taxonomy")
    if tax is None:
        taxonomy = _default_taxonomy()
    elif isinstance(tax, dict) and "file" in tax:
        taxonomy = read_taxonomy_file(tax["file"])
    else:
        taxonomy = tuple(TopicRule(e["label"], frozenset(e["triggers"])) for e in tax)
        _check_taxonomy(taxonomy)

    return Config(
        stopwords=stopwords,
        keywords_per_case=keywords_per_case,
        lexicon=lexicon,
        sentiment_threshold=threshold,
        taxonomy=taxonomy,
        tsne=_build_section(TsneConfig, data.get("tsne", {})),
        geometry=_build_section(GeometryConfig, data.get("geometry", {})),
        colors=_build_section(ColorsConfig, data.get("colors", {})),
        server=_build_section(ServerConfig, data.get("server", {})),
    )
