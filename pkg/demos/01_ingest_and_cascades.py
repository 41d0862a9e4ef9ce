"""Ingest a dump and reconstruct retweet cascades.

Generates a small synthetic dump, parses it, rebuilds the cascade trees,
and prints size/depth statistics plus any diagnostics.
"""

import json
from collections import Counter

from rumorcast.ingest import build_cascades, parse_posts, parse_users
from rumorcast.synth import generate_dump

# A compact dump: 40 suspected rumors, ~1200 retweets/comments, 300 users.
posts, users = generate_dump(n_cases=40, n_descendants=1200, n_users=300, seed=11)

post_result = parse_posts(json.dumps(p) for p in posts)
user_result = parse_users(json.dumps(u) for u in users)
print(f"parsed {len(post_result.records)} posts, {len(user_result.records)} users")
print(f"parse diagnostics: {len(post_result.diagnostics)}")

build = build_cascades(post_result.records)
print(f"cascades: {len(build.cascades)}, dropped posts: {len(build.dropped)}")

sizes = [c.size for c in build.cascades]
depths = [c.max_depth for c in build.cascades]
print(f"sizes: min={min(sizes)} median={sorted(sizes)[len(sizes) // 2]} max={max(sizes)}")
print(f"depth distribution: {dict(sorted(Counter(depths).items()))}")

big = max(build.cascades, key=lambda c: c.size)
print(f"\nlargest cascade {big.root_id}: {big.size} nodes, depth {big.max_depth}")
per_depth = Counter(big.depth.values())
for depth in sorted(per_depth):
    print(f"  depth {depth}: {per_depth[depth]} nodes")
