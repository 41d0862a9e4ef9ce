"""Extract the per-case feature families: keywords, sentiment, topic,
influence, user metrics, and the standardized vectors.
"""

import json

from rumorcast.config import load_config
from rumorcast.features import Tokenizer, attach_vectors, extract_case_features
from rumorcast.ingest import build_cascades, parse_posts, parse_users
from rumorcast.synth import generate_dump

cfg = load_config()
posts, users = generate_dump(n_cases=12, n_descendants=240, n_users=80, seed=5)
cascades = build_cascades(parse_posts(json.dumps(p) for p in posts).records).cascades
profiles = {u.id: u for u in parse_users(json.dumps(u) for u in users).records}

features, missing = extract_case_features(
    cascades, profiles, Tokenizer(cfg.stopwords), cfg.lexicon, cfg.taxonomy,
    keywords_per_case=cfg.keywords_per_case)
vectors = attach_vectors(features, cfg.taxonomy)
print(f"{len(features)} cases, vector length {vectors.shape[1]} "
      f"(8 scalars + {len(cfg.taxonomy)} topic one-hot)")
print(f"column means ~0: {abs(vectors.mean(axis=0)).max():.2e}")

for cf in features[:5]:
    top = ", ".join(f"{t}:{w:.2f}" for t, w in cf.keywords[:4])
    print(f"\ncase {cf.case_id}: topic={cf.topic} influence={cf.influence} "
          f"sentiment={cf.sentiment.label} ({cf.sentiment.score:+.2f})")
    print(f"  user: log10 fans={cf.log_fans:.2f} integrity={cf.integrity:.1f}")
    print(f"  keywords: {top}")
