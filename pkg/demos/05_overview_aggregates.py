"""Overview aggregates: choropleth counts and per-topic daily series."""

from pathlib import Path

from rumorcast.aggregation import FilterSpec, filter_cases, region_counts, topic_series
from rumorcast.ingest import parse_timestamp
from rumorcast.pipeline import run_pipeline
from rumorcast.synth import generate_dump, write_dump

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
posts, users = generate_dump(n_cases=120, n_descendants=2000, n_users=500, seed=42)
write_dump(posts, users, out / "posts.jsonl", out / "users.jsonl")
dataset = run_pipeline(out / "posts.jsonl", out / "users.jsonl")

counts = region_counts(dataset, FilterSpec())
top = sorted(counts.items(), key=lambda kv: -kv[1])[:8]
print("suspected rumors by region:",
      ", ".join(f"{region}={n}" for region, n in top if n))

# Narrow to one region and a time window, like clicking the map and brushing.
spec = FilterSpec(regions=frozenset({"overseas"}),
                  time_from=parse_timestamp("2020-01-01T00:00:00Z"),
                  time_to=parse_timestamp("2020-09-01T00:00:00Z"))
selected = filter_cases(dataset, spec)
print(f"\noverseas cases in window: {len(selected)}")

for series in topic_series(dataset, spec, k=3):
    peak_day, peak = max(series.points, key=lambda p: p[1])
    keywords = series.keywords_by_day.get(peak_day, [])
    print(f"  {series.topic}: peak {peak} on {peak_day.isoformat()} "
          f"keywords={keywords}")
