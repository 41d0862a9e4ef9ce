"""Embed case vectors with exact t-SNE and render the glyph map.

Shows the KL trace, the affinity invariants, and writes the projection
SVG (inner circle = topic/influence, four arcs = user metrics).
"""

import json
from pathlib import Path

import numpy as np

from rumorcast.config import load_config
from rumorcast.features import Tokenizer, attach_vectors, extract_case_features
from rumorcast.ingest import build_cascades, parse_posts, parse_users
from rumorcast.projection import build_glyphs, pairwise_affinities, tsne_embed
from rumorcast.svgexport import projection_svg
from rumorcast.synth import generate_dump

cfg = load_config()
posts, users = generate_dump(n_cases=60, n_descendants=1500, n_users=400, seed=21)
cascades = build_cascades(parse_posts(json.dumps(p) for p in posts).records).cascades
profiles = {u.id: u for u in parse_users(json.dumps(u) for u in users).records}
features, _ = extract_case_features(
    cascades, profiles, Tokenizer(cfg.stopwords), cfg.lexicon, cfg.taxonomy)
X = attach_vectors(features, cfg.taxonomy)

P = pairwise_affinities(X, min(cfg.tsne.perplexity, (len(X) - 1) / 3))
print(f"affinities: sum={P.sum():.12f} symmetric={np.max(np.abs(P - P.T)):.1e}")

embedding = tsne_embed(X, cfg.tsne)
print("KL trace (every 50 iterations):",
      " ".join(f"{v:.3f}" for v in embedding.kl_trace))

glyphs = build_glyphs(embedding, features, cfg.geometry, cfg.topic_labels())
out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
svg_path = out / "projection.svg"
svg_path.write_text(projection_svg(glyphs, cfg.colors, cfg.geometry),
                    encoding="utf-8")
print(f"wrote {svg_path} with {len(glyphs)} glyphs")
