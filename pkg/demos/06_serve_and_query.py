"""Serve the read-only API and walk the coordinated-view queries a front
end would issue: overview -> filtered cases -> propagation details ->
post comparison -> verdict.
"""

import json
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from rumorcast.pipeline import run_pipeline
from rumorcast.server import create_app
from rumorcast.synth import generate_dump, write_dump

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
posts, users = generate_dump(n_cases=50, n_descendants=800, n_users=300, seed=77)
write_dump(posts, users, out / "posts.jsonl", out / "users.jsonl")
dataset = run_pipeline(out / "posts.jsonl", out / "users.jsonl")

app = create_app(dataset, audit_path=out / "verdicts.jsonl")
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=8791,
                                       log_level="error"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)

base = "http://127.0.0.1:8791"
with httpx.Client(base_url=base, timeout=30) as client:
    meta = client.get("/api/meta").json()
    print(f"dataset: {meta['cases']} cases, topics={meta['topics']}")

    regions = client.get("/api/regions").json()
    busiest = max(regions, key=regions.get)
    print(f"busiest region: {busiest} ({regions[busiest]} cases)")

    spec = json.dumps({"regions": [busiest]})
    cases = client.get("/api/cases", params={"filter": spec})
    while cases.status_code == 202:  # embedding job still running
        time.sleep(0.2)
        cases = client.get("/api/cases", params={"filter": spec})
    cases = cases.json()
    chosen = max(cases, key=lambda c: c["influence"])
    print(f"picked case {chosen['case_id']} influence={chosen['influence']} "
          f"topic={chosen['topic']}")

    layout = client.get(f"/api/cases/{chosen['case_id']}/propagation").json()
    print(f"propagation: {len(layout['rings'])} rings, "
          f"{sum(len(s['cells']) for r in layout['rings'] for s in r['sectors'])} cells")

    hist = client.get(f"/api/cases/{chosen['case_id']}/histogram").json()
    if hist:
        busiest_day = max(hist, key=lambda h: h["count"])
        hits = client.get(f"/api/cases/{chosen['case_id']}/cells_for_day",
                          params={"day": busiest_day["day"]}).json()
        print(f"busiest day {busiest_day['day']}: {len(hits['post_ids'])} cells")
        pair = ",".join(hits["post_ids"][:2])
        details = client.get("/api/posts", params={"ids": pair}).json()
        for post in details:
            print(f"  post {post['id']} depth={post['depth']} "
                  f"sentiment={post['sentiment']['label']} words={post['word_count']}")

    verdict = client.post(f"/api/cases/{chosen['case_id']}/verdict",
                          json={"label": "refute", "note": "demo walkthrough"})
    print("verdict recorded:", verdict.json()["ok"])

server.should_exit = True
thread.join(timeout=5)
