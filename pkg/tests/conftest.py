import json
import sys
from pathlib import Path

import pytest

# Oracles and generators live beside the tests, not in the package.
sys.path.insert(0, str(Path(__file__).parent))

from rumorcast.pipeline import run_pipeline


def _post(pid, user, ts, text, region, kind="original", parent=None, root=None):
    record = {"id": pid, "user_id": user, "created_at": ts, "text": text,
              "region": region, "kind": kind}
    if parent is not None:
        record["parent_id"] = parent
    if root is not None:
        record["root_id"] = root
    return record


def _user(uid, fans, followees, tweets, verified, bio, avatar, location, gender):
    return {"id": uid, "screen_name": f"name_{uid}", "verified": verified,
            "fans": fans, "followees": followees, "tweets": tweets,
            "has_bio": bio, "has_avatar": avatar, "has_location": location,
            "has_gender": gender}


# Five cases: A (overseas, World News, tree of 4), E (overseas, Health),
# F (overseas, Finance), G (GD, Society, one comment), H (GD, Other).
FIVE_CASE_POSTS = [
    _post("A", "uA", "2020-03-01T08:00:00Z",
          "election protest overseas report 警察", "overseas"),
    _post("B", "uB", "2020-03-02T01:00:00Z", "fake misleading election claim",
          "overseas", kind="retweet", parent="A", root="A"),
    _post("C", "uC", "2020-03-02T05:00:00Z", "id card detail 警察 story true",
          "overseas", kind="retweet", parent="B", root="A"),
    _post("D", "uD", "2020-03-03T01:00:00Z", "support good news finally",
          "overseas", kind="retweet", parent="A", root="A"),
    _post("E", "uE", "2020-03-01T09:00:00Z",
          "virus vaccine hospital outbreak warning", "overseas"),
    _post("F", "uA", "2020-03-04T10:00:00Z", "stock market bank price crash",
          "overseas"),
    _post("G", "uB", "2020-03-02T12:00:00Z", "police school city incident",
          "GD"),
    _post("G1", "uC", "2020-03-02T15:00:00Z", "terrible panic comment",
          "GD", kind="comment", parent="G", root="G"),
    _post("H", "uD", "2020-03-05T23:00:00Z", "weekend plans nothing special",
          "GD"),
]

FIVE_CASE_USERS = [
    _user("uA", 999999, 10, 1000, True, True, True, True, True),
    _user("uB", 0, 0, 0, False, False, False, False, False),
    _user("uC", 999, 100, 50, True, True, False, False, False),
    _user("uD", 50, 20, 7, False, True, True, False, False),
    _user("uE", 12345, 300, 2000, True, True, True, False, True),
]


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


@pytest.fixture(scope="session")
def five_case_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("five_case")
    posts = root / "posts.jsonl"
    users = root / "users.jsonl"
    write_jsonl(posts, FIVE_CASE_POSTS)
    write_jsonl(users, FIVE_CASE_USERS)
    return posts, users


@pytest.fixture(scope="session")
def five_case_dataset(five_case_paths):
    posts, users = five_case_paths
    return run_pipeline(posts, users)
