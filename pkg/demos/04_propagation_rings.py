"""Compute the circular propagation geometry for one cascade.

Rings are retweet depths, sectors are calendar days (clockwise from 12
o'clock), cells are single retweets with area proportional to word count.
Writes the propagation SVG next to this script.
"""

import json
from pathlib import Path

from rumorcast.pipeline import run_pipeline
from rumorcast.svgexport import propagation_svg
from rumorcast.synth import generate_dump, write_dump

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
posts, users = generate_dump(n_cases=8, n_descendants=900, n_users=200, seed=33)
write_dump(posts, users, out / "posts.jsonl", out / "users.jsonl")

dataset = run_pipeline(out / "posts.jsonl", out / "users.jsonl")
case_id = max(dataset.features, key=lambda cf: cf.influence).case_id
layout = dataset.layout_for(case_id)

print(f"case {case_id}: influence={dataset.features_by_case[case_id].influence} "
      f"center_r={layout.center_radius:.1f}")
for ring in layout.rings:
    n_cells = sum(len(s.cells) for s in ring.sectors)
    print(f"  ring depth {ring.depth}: r=[{ring.r_inner:.1f}, {ring.r_outer:.1f}] "
          f"{len(ring.sectors)} day-sectors, {n_cells} cells")
print("histogram:", " ".join(f"{d.isoformat()}:{c}" for d, c in layout.histogram[:10]),
      "..." if len(layout.histogram) > 10 else "")

svg_path = out / "propagation.svg"
svg_path.write_text(propagation_svg(layout, dataset.config.colors), encoding="utf-8")
print(f"wrote {svg_path}")
