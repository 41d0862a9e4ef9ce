"""Overview aggregates: filter evaluation, per-region counts, and
per-topic daily series with per-bucket keywords.

All functions are pure reads over the immutable dataset; filters compose
conjunctively and absent fields mean "no constraint".
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Optional, Protocol, Sequence

from .features import CaseFeatures
from .ingest import Cascade, parse_timestamp


class FilterError(ValueError):
    """Invalid filter; `field` names the offending FilterSpec field."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


class CaseSource(Protocol):
    """What the aggregates need from a dataset."""

    cascades: Sequence[Cascade]
    features_by_case: dict[str, CaseFeatures]
    known_regions: Sequence[str]
    topic_labels: Sequence[str]


@dataclass(frozen=True)
class FilterSpec:
    """Conjunctive case filter. Time bounds apply to the root post's
    created_at, inclusive start, exclusive end."""

    regions: Optional[frozenset[str]] = None
    topics: Optional[frozenset[str]] = None
    time_from: Optional[datetime] = None
    time_to: Optional[datetime] = None
    case_ids: Optional[frozenset[str]] = None

    @classmethod
    def from_json(cls, obj: dict) -> "FilterSpec":
        if not isinstance(obj, dict):
            raise FilterError("filter", "filter must be a JSON object")
        known = {"regions", "topics", "time_from", "time_to", "case_ids"}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise FilterError(unknown[0], f"unknown filter field(s): {', '.join(unknown)}")

        def str_set(name: str) -> Optional[frozenset[str]]:
            value = obj.get(name)
            if value is None:
                return None
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise FilterError(name, f"{name} must be a list of strings")
            return frozenset(value)

        def ts(name: str) -> Optional[datetime]:
            value = obj.get(name)
            if value is None:
                return None
            try:
                return parse_timestamp(str(value))
            except ValueError as exc:
                raise FilterError(name, f"{name}: {exc}") from exc

        return cls(
            regions=str_set("regions"),
            topics=str_set("topics"),
            time_from=ts("time_from"),
            time_to=ts("time_to"),
            case_ids=str_set("case_ids"),
        )

    def canonical_json(self) -> str:
        obj: dict = {}
        if self.regions is not None:
            obj["regions"] = sorted(self.regions)
        if self.topics is not None:
            obj["topics"] = sorted(self.topics)
        if self.time_from is not None:
            obj["time_from"] = self.time_from.strftime("%Y-%m-%dT%H:%M:%SZ")
        if self.time_to is not None:
            obj["time_to"] = self.time_to.strftime("%Y-%m-%dT%H:%M:%SZ")
        if self.case_ids is not None:
            obj["case_ids"] = sorted(self.case_ids)
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


@dataclass
class TopicSeries:
    topic: str
    points: list[tuple[date, int]]             # strictly increasing days, zero-filled
    keywords_by_day: dict[date, list[str]]     # only days with at least one case


def validate_filter(dataset: CaseSource, spec: FilterSpec) -> None:
    """Raise FilterError for unknown regions/topics or a reversed window."""
    if spec.time_from is not None and spec.time_to is not None:
        if not spec.time_from < spec.time_to:
            raise FilterError("time_from", "time_from must be earlier than time_to")
    if spec.regions is not None:
        unknown = sorted(spec.regions - set(dataset.known_regions))
        if unknown:
            raise FilterError("regions", f"unknown region(s): {', '.join(unknown)}")
    if spec.topics is not None:
        unknown = sorted(spec.topics - set(dataset.topic_labels))
        if unknown:
            raise FilterError("topics", f"unknown topic(s): {', '.join(unknown)}")


def filter_cases(dataset: CaseSource, spec: FilterSpec) -> list[str]:
    """Case ids satisfying every present constraint, ordered by root
    created_at then id."""
    validate_filter(dataset, spec)
    selected = []
    for cascade in dataset.cascades:
        root = cascade.root
        if spec.regions is not None and root.region not in spec.regions:
            continue
        if spec.case_ids is not None and cascade.root_id not in spec.case_ids:
            continue
        if spec.time_from is not None and root.created_at < spec.time_from:
            continue
        if spec.time_to is not None and root.created_at >= spec.time_to:
            continue
        if spec.topics is not None:
            topic = dataset.features_by_case[cascade.root_id].topic
            if topic not in spec.topics:
                continue
        selected.append((root.created_at, cascade.root_id))
    selected.sort()
    return [cid for _, cid in selected]


def region_counts(dataset: CaseSource, spec: FilterSpec) -> dict[str, int]:
    """Filtered case count per root region, zero-filled over all known
    regions. The spec's own `regions` field is ignored (the choropleth
    always shows the full map)."""
    validate_filter(dataset, spec)
    spec_no_regions = FilterSpec(
        regions=None, topics=spec.topics,
        time_from=spec.time_from, time_to=spec.time_to, case_ids=spec.case_ids)
    roots = {c.root_id: c.root for c in dataset.cascades}
    counts = Counter(roots[cid].region for cid in filter_cases(dataset, spec_no_regions))
    return {region: counts.get(region, 0) for region in dataset.known_regions}


def topic_series(dataset: CaseSource, spec: FilterSpec, k: int = 5) -> list[TopicSeries]:
    """One daily series per topic present in the filtered set.

    Buckets are UTC calendar days of the case root. Every series spans the
    filtered set's full day range, zero-filled, so curves align. Keywords
    per bucket are the top-k tokens by summed TF-IDF weight over that
    topic's cases rooted that day (ties lexicographic).
    """
    case_ids = filter_cases(dataset, spec)
    if not case_ids:
        return []
    roots = {c.root_id: c.root for c in dataset.cascades}
    days = [roots[cid].created_at.date() for cid in case_ids]
    first, last = min(days), max(days)
    full_range = [first + timedelta(days=i) for i in range((last - first).days + 1)]

    by_topic_day: dict[str, Counter] = defaultdict(Counter)
    weights: dict[tuple[str, date], Counter] = defaultdict(Counter)
    for cid, day in zip(case_ids, days):
        cf = dataset.features_by_case[cid]
        by_topic_day[cf.topic][day] += 1
        for token, weight in cf.keywords:
            weights[(cf.topic, day)][token] += weight

    order = {label: i for i, label in enumerate(dataset.topic_labels)}
    series = []
    for topic in sorted(by_topic_day, key=lambda t: (order.get(t, len(order)), t)):
        day_counts = by_topic_day[topic]
        keywords_by_day = {}
        for day in day_counts:
            ranked = sorted(weights[(topic, day)].items(), key=lambda kv: (-kv[1], kv[0]))
            keywords_by_day[day] = [token for token, _ in ranked[:k]]
        series.append(TopicSeries(
            topic=topic,
            points=[(day, day_counts.get(day, 0)) for day in full_range],
            keywords_by_day=keywords_by_day,
        ))
    return series
