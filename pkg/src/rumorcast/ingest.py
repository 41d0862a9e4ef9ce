"""Post/user dump parsing and cascade tree reconstruction.

Input dumps are UTF-8, one JSON object per line. Parsing is tolerant:
malformed lines become diagnostics, never exceptions. Cascade building is
deterministic and independent of input order; every input post ends up in
exactly one cascade or in the dropped set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional

import json

KINDS = ("original", "retweet", "comment")

# Province-level region codes used by the choropleth, plus "overseas".
REGION_CODES = [
    "AH", "BJ", "CQ", "FJ", "GD", "GS", "GX", "GZ", "HA", "HB", "HE", "HI",
    "HK", "HL", "HN", "JL", "JS", "JX", "LN", "MO", "NM", "NX", "QH", "SC",
    "SD", "SH", "SN", "SX", "TJ", "TW", "XJ", "XZ", "YN", "ZJ", "overseas",
]


@dataclass(frozen=True)
class Post:
    id: str
    user_id: str
    created_at: datetime  # tz-aware, UTC
    text: str
    region: str
    kind: str
    parent_id: Optional[str] = None
    root_id: Optional[str] = None


@dataclass(frozen=True)
class UserProfile:
    id: str
    screen_name: str
    verified: bool
    fans: int
    followees: int
    tweets: int
    has_bio: bool
    has_avatar: bool
    has_location: bool
    has_gender: bool


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    line: Optional[int] = None
    post_id: Optional[str] = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "message": self.message}
        if self.line is not None:
            out["line"] = self.line
        if self.post_id is not None:
            out["post_id"] = self.post_id
        return out


@dataclass
class Cascade:
    """Rooted tree of posts for one suspected rumor."""

    root_id: str
    nodes: dict[str, Post]
    depth: dict[str, int]
    max_depth: int
    size: int

    @property
    def root(self) -> Post:
        return self.nodes[self.root_id]


@dataclass
class ParseResult:
    """Well-formed records in input order plus per-line diagnostics."""

    records: list = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)


@dataclass
class BuildResult:
    cascades: list[Cascade] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)


def parse_timestamp(value: str) -> datetime:
    """Parse "YYYY-MM-DDThh:mm:ssZ" (or an explicit offset) to UTC."""
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        raise ValueError("timestamp lacks a timezone")
    return ts.astimezone(timezone.utc)


_POST_REQUIRED = ("id", "user_id", "created_at", "text", "region", "kind")
_USER_REQUIRED = (
    "id", "screen_name", "verified", "fans", "followees", "tweets",
    "has_bio", "has_avatar", "has_location", "has_gender",
)
_USER_COUNTS = ("fans", "followees", "tweets")
_USER_BOOLS = ("verified", "has_bio", "has_avatar", "has_location", "has_gender")


def _record_from_line(line: str, lineno: int, diags: list[Diagnostic]) -> Optional[dict]:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        diags.append(Diagnostic("bad_json", f"line {lineno}: {exc.msg}", line=lineno))
        return None
    if not isinstance(record, dict):
        diags.append(Diagnostic("bad_json", f"line {lineno}: record is not an object", line=lineno))
        return None
    return record


def parse_posts(stream: Iterable[str]) -> ParseResult:
    """Parse a line-delimited post dump.

    Returns all well-formed posts in input order. Malformed lines, records
    with missing or ill-typed fields, kind/parent mismatches, and duplicate
    ids are reported as diagnostics; the first occurrence of an id wins.
    """
    result = ParseResult()
    seen: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        record = _record_from_line(line, lineno, result.diagnostics)
        if record is None:
            continue

        missing = [f for f in _POST_REQUIRED if record.get(f) is None]
        if missing:
            result.diagnostics.append(Diagnostic(
                "missing_field", f"line {lineno}: missing field(s) {', '.join(missing)}",
                line=lineno))
            continue
        try:
            created_at = parse_timestamp(str(record["created_at"]))
        except ValueError as exc:
            result.diagnostics.append(Diagnostic(
                "bad_timestamp", f"line {lineno}: created_at: {exc}", line=lineno))
            continue

        kind = str(record["kind"])
        if kind not in KINDS:
            result.diagnostics.append(Diagnostic(
                "bad_kind", f"line {lineno}: unknown kind {kind!r}", line=lineno))
            continue
        parent_id = record.get("parent_id")
        if (kind == "original") != (parent_id is None):
            result.diagnostics.append(Diagnostic(
                "kind_parent_mismatch",
                f"line {lineno}: kind {kind!r} inconsistent with parent_id presence",
                line=lineno, post_id=str(record["id"])))
            continue

        post = Post(
            id=str(record["id"]),
            user_id=str(record["user_id"]),
            created_at=created_at,
            text=str(record["text"]),
            region=str(record["region"]),
            kind=kind,
            parent_id=None if parent_id is None else str(parent_id),
            root_id=None if record.get("root_id") is None else str(record["root_id"]),
        )
        if post.id in seen:
            result.diagnostics.append(Diagnostic(
                "duplicate_id", f"line {lineno}: duplicate post id {post.id!r}",
                line=lineno, post_id=post.id))
            continue
        seen.add(post.id)
        result.records.append(post)
    return result


def parse_users(stream: Iterable[str]) -> ParseResult:
    """Parse a line-delimited user profile dump (same conventions as posts)."""
    result = ParseResult()
    seen: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        record = _record_from_line(line, lineno, result.diagnostics)
        if record is None:
            continue
        missing = [f for f in _USER_REQUIRED if record.get(f) is None]
        if missing:
            result.diagnostics.append(Diagnostic(
                "missing_field", f"line {lineno}: missing field(s) {', '.join(missing)}",
                line=lineno))
            continue
        counts = {}
        bad = None
        for name in _USER_COUNTS:
            value = record[name]
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                bad = Diagnostic(
                    "bad_count", f"line {lineno}: {name} must be a non-negative integer",
                    line=lineno)
                break
            counts[name] = value
        if bad is None:
            for name in _USER_BOOLS:
                if not isinstance(record[name], bool):
                    bad = Diagnostic(
                        "bad_flag", f"line {lineno}: {name} must be a boolean", line=lineno)
                    break
        if bad is not None:
            result.diagnostics.append(bad)
            continue
        user = UserProfile(
            id=str(record["id"]),
            screen_name=str(record["screen_name"]),
            verified=record["verified"],
            fans=counts["fans"],
            followees=counts["followees"],
            tweets=counts["tweets"],
            has_bio=record["has_bio"],
            has_avatar=record["has_avatar"],
            has_location=record["has_location"],
            has_gender=record["has_gender"],
        )
        if user.id in seen:
            result.diagnostics.append(Diagnostic(
                "duplicate_id", f"line {lineno}: duplicate user id {user.id!r}", line=lineno))
            continue
        seen.add(user.id)
        result.records.append(user)
    return result


# Node resolution states for build_cascades.
_DROPPED = "dropped"
_PENDING = "pending"


def build_cascades(posts: list[Post]) -> BuildResult:
    """Reconstruct one cascade per original post.

    Every descendant reachable through parent_id chains is attached at
    depth(parent) + 1. Orphans (parent missing or itself dropped) are
    adopted under their root_id at depth 1 when that root exists, else
    dropped. Posts on a parent cycle are dropped. All decisions are pure
    functions of the post set, so input order never matters.
    """
    by_id = {p.id: p for p in posts}
    roots = {p.id for p in posts if p.kind == "original"}
    result = BuildResult()

    # resolution[post_id] = (root_id, depth) or (_DROPPED, reason)
    resolution: dict[str, tuple] = {}
    for root_id in roots:
        resolution[root_id] = (root_id, 0)

    def adopt_or_drop(post: Post, reason: str) -> tuple:
        if post.root_id is not None and post.root_id in roots:
            result.diagnostics.append(Diagnostic(
                "orphan_attached",
                f"post {post.id}: {reason}; attached under root {post.root_id} at depth 1",
                post_id=post.id))
            return (post.root_id, 1)
        result.diagnostics.append(Diagnostic(
            "orphan_dropped", f"post {post.id}: {reason}; no resolvable root", post_id=post.id))
        return (_DROPPED, "orphan")

    def resolve(start: str) -> None:
        # Walk up the parent chain until a resolved node, a missing parent,
        # or a revisit (cycle); then unwind.
        chain: list[str] = []
        on_chain: set[str] = set()
        cur = start
        while True:
            if cur in resolution:
                break
            if cur in on_chain:
                # Posts from `cur` onward in the chain form the cycle.
                idx = chain.index(cur)
                for pid in chain[idx:]:
                    resolution[pid] = (_DROPPED, "cycle")
                    result.diagnostics.append(Diagnostic(
                        "cycle", f"post {pid}: parent chain forms a cycle", post_id=pid))
                chain = chain[:idx]
                break
            chain.append(cur)
            on_chain.add(cur)
            parent = by_id[cur].parent_id
            if parent is None or parent not in by_id:
                resolution[cur] = adopt_or_drop(
                    by_id[cur],
                    "parent_id absent" if parent is None else f"parent {parent} not in dump")
                chain.pop()
                break
            cur = parent
        # Unwind: chain holds unresolved ids, deepest-ancestor last.
        for pid in reversed(chain):
            post = by_id[pid]
            parent_res = resolution[post.parent_id]
            if parent_res[0] == _DROPPED:
                resolution[pid] = adopt_or_drop(post, f"parent {post.parent_id} was dropped")
            else:
                resolution[pid] = (parent_res[0], parent_res[1] + 1)

    for pid in sorted(by_id):
        if pid not in resolution:
            resolve(pid)

    # Flag (but keep) time-order violations and root_id mismatches.
    for pid in sorted(by_id):
        post = by_id[pid]
        res = resolution[pid]
        if res[0] == _DROPPED:
            continue
        if post.parent_id is not None and post.parent_id in by_id:
            parent = by_id[post.parent_id]
            if resolution[parent.id][0] == res[0] and post.created_at < parent.created_at:
                result.diagnostics.append(Diagnostic(
                    "time_order",
                    f"post {pid}: created before its parent {parent.id}", post_id=pid))
        if post.root_id is not None and post.kind != "original" and post.root_id != res[0]:
            result.diagnostics.append(Diagnostic(
                "root_mismatch",
                f"post {pid}: root_id {post.root_id} but reached root {res[0]}", post_id=pid))

    members: dict[str, list[tuple[int, datetime, str]]] = {rid: [] for rid in roots}
    for pid, res in resolution.items():
        if res[0] == _DROPPED:
            result.dropped.append(pid)
        else:
            members[res[0]].append((res[1], by_id[pid].created_at, pid))
    result.dropped.sort()

    cascades = []
    for rid in roots:
        entries = sorted(members[rid])
        nodes = {pid: by_id[pid] for _, _, pid in entries}
        depth = {pid: d for d, _, pid in entries}
        cascades.append(Cascade(
            root_id=rid,
            nodes=nodes,
            depth=depth,
            max_depth=max(depth.values()),
            size=len(nodes),
        ))
    cascades.sort(key=lambda c: (c.root.created_at, c.root_id))
    result.cascades = cascades
    return result
