"""Seeded synthetic dumps for demos, fuzzing, and scale checks.

Generates post/user dumps in the wire format: realistic-ish cascades
(skewed sizes, mixed retweets/comments, date-clustered activity) with
texts sampled from a small bilingual vocabulary so keyword, sentiment and
topic extraction all have something to bite on.
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .ingest import REGION_CODES

_TOPIC_WORDS = {
    "World News": ["election", "protest", "president", "border", "embassy",
                   "war", "国际", "外交"],
    "Health": ["virus", "vaccine", "hospital", "outbreak", "doctor",
               "病毒", "疫苗"],
    "Finance": ["stock", "bank", "market", "price", "tax", "股票", "银行"],
    "Society": ["police", "school", "city", "arrest", "traffic", "警察", "学校"],
}
_FILLER = ["people", "report", "video", "photo", "share", "truth", "official",
           "source", "breaking", "today", "message", "网友", "消息", "转发"]
_OPINION = ["good", "great", "support", "fake", "terrible", "panic", "danger",
            "misleading", "谣言", "恐慌", "感动", "点赞"]


def _ts(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def _text(rng: random.Random, topic: str, n_words: int) -> str:
    pool = _TOPIC_WORDS[topic] + _FILLER + _OPINION
    words = [rng.choice(_TOPIC_WORDS[topic])]
    words += [rng.choice(pool) for _ in range(max(0, n_words - 1))]
    return " ".join(words)


def generate_dump(
    n_cases: int,
    n_descendants: int,
    n_users: int,
    seed: int = 0,
    start: datetime = datetime(2019, 12, 27, tzinfo=timezone.utc),
    span_days: int = 353,
    comment_share: float = 0.2,
    max_span_hours: float = 24.0 * 14,
) -> tuple[list[dict], list[dict]]:
    """Return (post_records, user_records) as JSON-ready dicts.

    Descendant counts per case follow a skewed split so a few cascades
    are deep and heavy, like real rumor spreads. Each descendant attaches
    to a uniformly chosen earlier node of its cascade, which yields
    log-depth trees with occasional long chains.
    """
    rng = random.Random(seed)
    topics = list(_TOPIC_WORDS)

    users = []
    for i in range(n_users):
        fans = int(10 ** rng.uniform(0, 6)) - 1
        users.append({
            "id": f"u{i:06d}",
            "screen_name": f"user_{i:06d}",
            "verified": rng.random() < 0.2,
            "fans": fans,
            "followees": int(10 ** rng.uniform(0, 3.5)),
            "tweets": int(10 ** rng.uniform(0, 4.5)),
            "has_bio": rng.random() < 0.7,
            "has_avatar": rng.random() < 0.9,
            "has_location": rng.random() < 0.5,
            "has_gender": rng.random() < 0.8,
        })

    # Skewed descendant allocation: weight ~ 1/(rank+1).
    weights = [1.0 / (i + 1) for i in range(n_cases)]
    total_w = sum(weights)
    alloc = [int(n_descendants * w / total_w) for w in weights]
    short = n_descendants - sum(alloc)
    for i in range(short):
        alloc[i % n_cases] += 1

    posts = []
    for case_idx in range(n_cases):
        topic = topics[case_idx % len(topics)]
        root_id = f"c{case_idx:05d}"
        root_time = start + timedelta(
            days=rng.uniform(0, span_days), seconds=rng.randrange(0, 86400))
        region = rng.choice(REGION_CODES)
        posts.append({
            "id": root_id,
            "user_id": users[rng.randrange(n_users)]["id"],
            "created_at": _ts(root_time),
            "text": _text(rng, topic, rng.randrange(8, 30)),
            "region": region,
            "kind": "original",
        })
        node_times = {root_id: root_time}
        node_ids = [root_id]
        for j in range(alloc[case_idx]):
            parent = rng.choice(node_ids)
            child_id = f"{root_id}r{j:05d}"
            child_time = node_times[parent] + timedelta(
                hours=rng.uniform(0.05, max_span_hours / (1 + len(node_ids) ** 0.5)))
            kind = "comment" if rng.random() < comment_share else "retweet"
            posts.append({
                "id": child_id,
                "user_id": users[rng.randrange(n_users)]["id"],
                "created_at": _ts(child_time),
                "text": _text(rng, topic, rng.randrange(1, 18)),
                "region": rng.choice(REGION_CODES),
                "kind": kind,
                "parent_id": parent,
                "root_id": root_id,
            })
            node_times[child_id] = child_time
            if kind == "retweet":
                node_ids.append(child_id)
    return posts, users


def write_dump(
    posts: list[dict],
    users: list[dict],
    posts_path: str | Path,
    users_path: str | Path,
) -> None:
    with open(posts_path, "w", encoding="utf-8") as fh:
        for record in posts:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(users_path, "w", encoding="utf-8") as fh:
        for record in users:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def chain_cascade_records(depth: int, root_id: str = "chain0",
                          user_id: str = "u000000",
                          start: datetime = datetime(2020, 3, 1, tzinfo=timezone.utc),
                          ) -> list[dict]:
    """One original plus a single retweet chain of the given depth."""
    records = [{
        "id": root_id, "user_id": user_id, "created_at": _ts(start),
        "text": "breaking report 警察 demonstration", "region": "overseas",
        "kind": "original",
    }]
    prev = root_id
    for d in range(1, depth + 1):
        pid = f"{root_id}d{d}"
        records.append({
            "id": pid, "user_id": user_id,
            "created_at": _ts(start + timedelta(hours=6 * d)),
            "text": f"retweet level {d} id card",
            "region": "overseas", "kind": "retweet",
            "parent_id": prev, "root_id": root_id,
        })
        prev = pid
    return records
