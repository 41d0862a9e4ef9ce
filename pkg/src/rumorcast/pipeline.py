"""Pipeline orchestration: ingest -> features -> aggregates, producing an
immutable dataset handle with lazy, reproducible per-case layout caching.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .aggregation import FilterSpec, region_counts, topic_series
from .config import Config, load_config
from .features import (
    CaseFeatures, PostVisual, Tokenizer, attach_vectors, extract_case_features,
    extract_post_visuals,
)
from .ingest import (
    Cascade, Diagnostic, Post, REGION_CODES, UserProfile, build_cascades,
    parse_posts, parse_users,
)
from .layout import PropagationLayout, compute_layout


class PipelineError(RuntimeError):
    def __init__(self, message: str, diagnostics: Optional[list[Diagnostic]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


@dataclass
class Dataset:
    """Everything the API serves. Immutable after run_pipeline returns;
    the layout cache only memoizes pure recomputations."""

    config: Config
    posts: dict[str, Post]
    users: dict[str, UserProfile]
    cascades: list[Cascade]
    cascades_by_root: dict[str, Cascade]
    case_of_post: dict[str, str]
    features: list[CaseFeatures]
    features_by_case: dict[str, CaseFeatures]
    post_visuals: dict[str, PostVisual]
    known_regions: list[str]
    topic_labels: list[str]
    diagnostics: list[Diagnostic]
    report: dict
    _influence_span: tuple[float, float] = (0.0, 0.0)
    _layout_cache: dict[str, PropagationLayout] = field(default_factory=dict)
    _layout_lock: threading.Lock = field(default_factory=threading.Lock)

    def influence_norm(self, case_id: str) -> float:
        lo, hi = self._influence_span
        influence = self.features_by_case[case_id].influence
        if hi <= lo:
            return 0.0
        return (influence - lo) / (hi - lo)

    def layout_for(self, case_id: str) -> PropagationLayout:
        with self._layout_lock:
            cached = self._layout_cache.get(case_id)
        if cached is not None:
            return cached
        layout = compute_layout(
            self.cascades_by_root[case_id], self.post_visuals,
            self.config.geometry, self.influence_norm(case_id))
        with self._layout_lock:
            self._layout_cache.setdefault(case_id, layout)
            return self._layout_cache[case_id]


def run_pipeline(
    posts_path: str | Path,
    users_path: str | Path,
    config: Config | str | Path | None = None,
) -> Dataset:
    """Load dumps, reconstruct cascades, extract features, warm the
    overview aggregates, and emit a machine-readable build report.

    Raises PipelineError when the dump yields no cases; unreadable files
    raise the underlying OSError.
    """
    cfg = config if isinstance(config, Config) else load_config(config)
    t0 = time.perf_counter()

    with open(posts_path, encoding="utf-8") as fh:
        post_result = parse_posts(fh)
    with open(users_path, encoding="utf-8") as fh:
        user_result = parse_users(fh)
    t_parse = time.perf_counter()

    build = build_cascades(post_result.records)
    if not build.cascades:
        raise PipelineError("no cases", post_result.diagnostics + build.diagnostics)
    t_cascades = time.perf_counter()

    tokenizer = Tokenizer(cfg.stopwords)
    users = {u.id: u for u in user_result.records}
    features, missing_profiles = extract_case_features(
        build.cascades, users, tokenizer, cfg.lexicon, cfg.taxonomy,
        keywords_per_case=cfg.keywords_per_case,
        sentiment_threshold=cfg.sentiment_threshold)
    visuals = extract_post_visuals(
        build.cascades, tokenizer, cfg.lexicon, cfg.sentiment_threshold)
    vectors = attach_vectors(features, cfg.taxonomy)
    t_features = time.perf_counter()

    diagnostics = list(post_result.diagnostics) + list(user_result.diagnostics) \
        + list(build.diagnostics)
    diagnostics.extend(
        Diagnostic("missing_profile", f"case {cid}: root author has no profile",
                   post_id=cid)
        for cid in missing_profiles)

    influences = [cf.influence for cf in features]
    dataset = Dataset(
        config=cfg,
        posts={p.id: p for p in post_result.records},
        users=users,
        cascades=build.cascades,
        cascades_by_root={c.root_id: c for c in build.cascades},
        case_of_post={pid: c.root_id for c in build.cascades for pid in c.nodes},
        features=features,
        features_by_case={cf.case_id: cf for cf in features},
        post_visuals=visuals,
        known_regions=sorted(set(REGION_CODES)
                             | {c.root.region for c in build.cascades}),
        topic_labels=list(cfg.topic_labels()),
        diagnostics=diagnostics,
        report={},
        _influence_span=(min(influences), max(influences)),
    )

    # Warm the default overview so the first request is as cheap as the rest.
    empty = FilterSpec()
    regions = region_counts(dataset, empty)
    series = topic_series(dataset, empty)
    t_aggregates = time.perf_counter()

    dataset.report = {
        "counts": {
            "posts": len(dataset.posts),
            "users": len(dataset.users),
            "cases": len(dataset.cascades),
            "cascade_nodes": sum(c.size for c in dataset.cascades),
            "dropped_posts": len(build.dropped),
            "descendants": sum(cf.influence for cf in features),
            "regions_with_cases": sum(1 for v in regions.values() if v),
            "topics_with_cases": len(series),
            "vector_length": int(vectors.shape[1]),
            "diagnostics": len(diagnostics),
        },
        "timings_s": {
            "parse": round(t_parse - t0, 6),
            "cascades": round(t_cascades - t_parse, 6),
            "features": round(t_features - t_cascades, 6),
            "aggregates": round(t_aggregates - t_features, 6),
            "total": round(t_aggregates - t0, 6),
        },
        "diagnostics": [d.to_json() for d in diagnostics],
    }
    return dataset
