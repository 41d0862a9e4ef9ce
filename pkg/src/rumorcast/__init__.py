"""Rumor cascade analytics: ingestion, features, projection, propagation
geometry, and a read-only JSON API for the exploration front end."""

from .aggregation import FilterSpec, filter_cases, region_counts, topic_series
from .config import Config, load_config
from .features import (
    classify_topic, compute_influence, profile_integrity, sentiment_score,
    tf_idf, tokenize,
)
from .ingest import build_cascades, parse_posts, parse_users
from .layout import cells_for_day, compute_layout, pack_cells, retweet_histogram
from .pipeline import Dataset, PipelineError, run_pipeline
from .projection import build_glyphs, pairwise_affinities, tsne_embed
from .server import create_app

__version__ = "0.1.0"

__all__ = [
    "Config", "Dataset", "FilterSpec", "PipelineError",
    "build_cascades", "build_glyphs", "cells_for_day", "classify_topic",
    "compute_influence", "compute_layout", "create_app", "filter_cases",
    "load_config", "pack_cells", "pairwise_affinities", "parse_posts",
    "parse_users", "profile_integrity", "region_counts", "retweet_histogram",
    "run_pipeline", "sentiment_score", "tf_idf", "tokenize", "topic_series",
    "tsne_embed",
]
