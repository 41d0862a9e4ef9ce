"""Read-only HTTP API over a loaded dataset.

Every GET is a pure function of (dataset, query): bodies are canonical
JSON (sorted keys, no whitespace), so repeated identical requests are
byte-identical. The only write surface is the append-only verdict log.
Per-filter embeddings run as background jobs keyed by the filter
fingerprint; a request that arrives before its job finishes gets a 202
with a retry token.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import Response

from .aggregation import FilterError, FilterSpec, filter_cases, region_counts, topic_series
from .layout import cells_for_day, layout_to_json
from .pipeline import Dataset
from .projection import build_glyphs, tsne_embed

VERDICT_LABELS = ("approve", "refute", "undecided")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _json_response(obj, status: int = 200, headers: Optional[dict] = None) -> Response:
    return Response(content=canonical_json(obj), status_code=status,
                    media_type="application/json", headers=headers)


def _error(status: int, message: str, field: Optional[str] = None) -> Response:
    body: dict = {"error": {"message": message}}
    if field is not None:
        body["error"]["field"] = field
    return _json_response(body, status=status)


def _case_payload(dataset: Dataset, case_ids: list[str],
                  coords: np.ndarray, glyphs) -> list[dict]:
    out = []
    for i, cid in enumerate(case_ids):
        cf = dataset.features_by_case[cid]
        root = dataset.cascades_by_root[cid].root
        glyph = glyphs[i]
        out.append({
            "case_id": cid,
            "x": float(coords[i, 0]),
            "y": float(coords[i, 1]),
            "glyph": {
                "inner_radius": glyph.inner_radius,
                "topic_color_index": glyph.topic_color_index,
                "arcs": [{"metric": a.metric, "fraction": a.fraction}
                         for a in glyph.arcs],
            },
            "topic": cf.topic,
            "influence": cf.influence,
            "sentiment": {"score": cf.sentiment.score, "label": cf.sentiment.label},
            "region": root.region,
            "created_at": root.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "user_id": root.user_id,
            "text": root.text,
            "max_depth": cf.max_depth,
            "keywords": [{"token": t, "weight": w} for t, w in cf.keywords],
        })
    return out


class EmbeddingJobs:
    """At most one t-SNE run per filter fingerprint; results are cached
    canonical JSON bodies, so every later hit is byte-identical."""

    def __init__(self, dataset: Dataset):
        self._dataset = dataset
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}

    def _compute(self, fingerprint: str, spec: FilterSpec) -> None:
        job = self._jobs[fingerprint]
        try:
            dataset = self._dataset
            case_ids = filter_cases(dataset, spec)
            if case_ids:
                subset = [dataset.features_by_case[cid] for cid in case_ids]
                X = np.vstack([cf.vector for cf in subset])
                embedding = tsne_embed(X, dataset.config.tsne)
                glyphs = build_glyphs(embedding, subset, dataset.config.geometry,
                                      dataset.topic_labels)
                payload = _case_payload(dataset, case_ids, embedding.coords, glyphs)
            else:
                payload = []
            job["body"] = canonical_json(payload)
            job["status"] = "ready"
        except Exception as exc:  # surfaced as 500 with the message
            job["status"] = "failed"
            job["message"] = str(exc)
        finally:
            job["event"].set()

    def fetch(self, spec: FilterSpec, wait_s: float) -> dict:
        fingerprint = spec.fingerprint()
        with self._lock:
            job = self._jobs.get(fingerprint)
            if job is None:
                job = {"status": "pending", "event": threading.Event()}
                self._jobs[fingerprint] = job
                worker = threading.Thread(
                    target=self._compute, args=(fingerprint, spec), daemon=True)
                worker.start()
        job["event"].wait(timeout=wait_s)
        return {"fingerprint": fingerprint, **job}


class VerdictLog:
    """Append-only JSON-lines audit file; appends are serialized."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = canonical_json(record)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


def _parse_filter(raw: Optional[str]) -> FilterSpec:
    if raw is None or raw == "":
        return FilterSpec()
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FilterError("filter", f"filter is not valid JSON: {exc.msg}") from exc
    return FilterSpec.from_json(obj)


def create_app(dataset: Dataset, audit_path: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="rumorcast", docs_url=None, redoc_url=None)
    jobs = EmbeddingJobs(dataset)
    verdicts = VerdictLog(audit_path or dataset.config.server.audit_path)

    @app.exception_handler(FilterError)
    async def _filter_error(_request, exc: FilterError):
        return _error(400, str(exc), field=exc.field)

    @app.get("/api/meta")
    def meta():
        roots = [c.root.created_at for c in dataset.cascades]
        return _json_response({
            "cases": len(dataset.cascades),
            "regions": list(dataset.known_regions),
            "topics": list(dataset.topic_labels),
            "sentiment_threshold": dataset.config.sentiment_threshold,
            "colors": {
                "sentiment": {
                    "negative": dataset.config.colors.sentiment_negative,
                    "neutral": dataset.config.colors.sentiment_neutral,
                    "positive": dataset.config.colors.sentiment_positive,
                },
                "topic_palette": list(dataset.config.colors.topic_palette),
            },
            "time_range": [min(roots).strftime("%Y-%m-%dT%H:%M:%SZ"),
                           max(roots).strftime("%Y-%m-%dT%H:%M:%SZ")],
        })

    @app.get("/api/regions")
    def regions(filter: Optional[str] = None):
        spec = _parse_filter(filter)
        return _json_response(region_counts(dataset, spec))

    @app.get("/api/topics/series")
    def topics_series(filter: Optional[str] = None, k: int = 5):
        spec = _parse_filter(filter)
        series = topic_series(dataset, spec, k=k)
        return _json_response([
            {
                "topic": s.topic,
                "points": [{"day": d.isoformat(), "count": c} for d, c in s.points],
                "keywords_by_day": {d.isoformat(): kws
                                    for d, kws in sorted(s.keywords_by_day.items())},
            }
            for s in series
        ])

    @app.get("/api/cases")
    def cases(filter: Optional[str] = None):
        spec = _parse_filter(filter)
        filter_cases(dataset, spec)  # validate before queueing a job
        job = jobs.fetch(spec, wait_s=dataset.config.server.embed_wait_s)
        if job["status"] == "ready":
            return Response(content=job["body"], media_type="application/json")
        if job["status"] == "failed":
            return _error(500, job.get("message", "embedding failed"))
        return _json_response(
            {"status": "pending", "token": job["fingerprint"], "retry_after": 1},
            status=202, headers={"Retry-After": "1"})

    @app.get("/api/cases/{case_id}/propagation")
    def propagation(case_id: str):
        if case_id not in dataset.cascades_by_root:
            return _error(404, f"unknown case id: {case_id}")
        layout = dataset.layout_for(case_id)
        influence = dataset.features_by_case[case_id].influence
        return _json_response(layout_to_json(layout, influence))

    @app.get("/api/cases/{case_id}/histogram")
    def histogram(case_id: str):
        if case_id not in dataset.cascades_by_root:
            return _error(404, f"unknown case id: {case_id}")
        layout = dataset.layout_for(case_id)
        return _json_response(
            [{"day": d.isoformat(), "count": c} for d, c in layout.histogram])

    @app.get("/api/cases/{case_id}/cells_for_day")
    def cells_by_day(case_id: str, day: str):
        if case_id not in dataset.cascades_by_root:
            return _error(404, f"unknown case id: {case_id}")
        try:
            target = datetime.strptime(day, "%Y-%m-%d").date()
        except ValueError:
            return _error(400, f"day must be YYYY-MM-DD, got {day!r}", field="day")
        layout = dataset.layout_for(case_id)
        return _json_response({"day": day, "post_ids": cells_for_day(layout, target)})

    @app.get("/api/posts")
    def posts(ids: Optional[str] = None, limit: Optional[int] = None, offset: int = 0):
        if not ids:
            return _error(400, "ids query parameter is required", field="ids")
        requested = [pid for pid in ids.split(",") if pid]
        cap = limit if limit is not None else dataset.config.server.posts_limit
        records = []
        for pid in requested[offset:offset + cap]:
            post = dataset.posts.get(pid)
            if post is None:
                continue
            case_id = dataset.case_of_post.get(pid)
            visual = dataset.post_visuals.get(pid)
            user = dataset.users.get(post.user_id)
            records.append({
                "id": post.id,
                "user_id": post.user_id,
                "created_at": post.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "text": post.text,
                "region": post.region,
                "kind": post.kind,
                "parent_id": post.parent_id,
                "root_id": post.root_id,
                "case_id": case_id,
                "depth": (dataset.cascades_by_root[case_id].depth[pid]
                          if case_id else None),
                "word_count": visual.word_count if visual else None,
                "sentiment": ({"score": visual.sentiment.score,
                               "label": visual.sentiment.label} if visual else None),
                "keyword": visual.keyword if visual else None,
                "user": ({
                    "id": user.id, "screen_name": user.screen_name,
                    "verified": user.verified, "fans": user.fans,
                    "followees": user.followees, "tweets": user.tweets,
                    "has_bio": user.has_bio, "has_avatar": user.has_avatar,
                    "has_location": user.has_location, "has_gender": user.has_gender,
                } if user else None),
            })
        return _json_response(records)

    @app.post("/api/cases/{case_id}/verdict")
    async def verdict(case_id: str, request: Request):
        if case_id not in dataset.cascades_by_root:
            return _error(404, f"unknown case id: {case_id}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return _error(400, "body must be JSON", field="body")
        label = body.get("label")
        if label not in VERDICT_LABELS:
            return _error(400, f"label must be one of {', '.join(VERDICT_LABELS)}",
                          field="label")
        note = body.get("note", "")
        if not isinstance(note, str):
            return _error(400, "note must be a string", field="note")
        record = {
            "case_id": case_id,
            "label": label,
            "note": note,
            "recorded_at": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        }
        verdicts.append(record)
        return _json_response({"ok": True, **record})

    return app
