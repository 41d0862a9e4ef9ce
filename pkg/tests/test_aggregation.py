import random
from collections import Counter
from dataclasses import dataclass

import pytest

from rumorcast.aggregation import (
    FilterError, FilterSpec, filter_cases, region_counts, topic_series,
)
from rumorcast.config import load_config
from rumorcast.features import Tokenizer, extract_case_features
from rumorcast.ingest import REGION_CODES, build_cascades, parse_posts, parse_timestamp
from rumorcast.synth import generate_dump

from oracles import daily_counts

import json


@dataclass
class MiniDataset:
    cascades: list
    features_by_case: dict
    known_regions: list
    topic_labels: list


def make_dataset(posts_records, seed_users=True):
    cfg = load_config()
    result = parse_posts([json.dumps(r) for r in posts_records])
    assert not result.diagnostics, result.diagnostics
    build = build_cascades(result.records)
    features, _ = extract_case_features(
        build.cascades, {}, Tokenizer(cfg.stopwords), cfg.lexicon, cfg.taxonomy,
        keywords_per_case=cfg.keywords_per_case)
    return MiniDataset(
        cascades=build.cascades,
        features_by_case={cf.case_id: cf for cf in features},
        known_regions=sorted(set(REGION_CODES) | {c.root.region for c in build.cascades}),
        topic_labels=cfg.topic_labels(),
    )


def root_record(pid, region, ts, text="election update"):
    return {"id": pid, "user_id": "u0", "created_at": ts, "text": text,
            "region": region, "kind": "original"}


@pytest.fixture(scope="module")
def dataset():
    records = [
        root_record("a", "overseas", "2020-03-01T08:00:00Z", "election protest abroad"),
        root_record("b", "overseas", "2020-03-01T10:00:00Z", "virus outbreak hospital"),
        root_record("c", "overseas", "2020-03-04T09:00:00Z", "stock market crash"),
        root_record("d", "GD", "2020-03-02T12:00:00Z", "police school incident"),
        root_record("e", "GD", "2020-03-05T23:00:00Z", "plain chatter nothing"),
    ]
    return make_dataset(records)


class TestFilterCases:
    def test_empty_spec_returns_all(self, dataset):
        assert filter_cases(dataset, FilterSpec()) == ["a", "b", "d", "c", "e"]

    def test_region_constraint(self, dataset):
        got = filter_cases(dataset, FilterSpec(regions=frozenset({"overseas"})))
        assert got == ["a", "b", "c"]

    def test_window_before_all_data(self, dataset):
        spec = FilterSpec(time_from=parse_timestamp("2019-01-01T00:00:00Z"),
                          time_to=parse_timestamp("2019-02-01T00:00:00Z"))
        assert filter_cases(dataset, spec) == []

    def test_window_half_open(self, dataset):
        spec = FilterSpec(time_from=parse_timestamp("2020-03-01T08:00:00Z"),
                          time_to=parse_timestamp("2020-03-01T10:00:00Z"))
        assert filter_cases(dataset, spec) == ["a"]  # end exclusive

    def test_topic_constraint(self, dataset):
        got = filter_cases(dataset, FilterSpec(topics=frozenset({"Health"})))
        assert got == ["b"]

    def test_case_ids_constraint(self, dataset):
        got = filter_cases(dataset, FilterSpec(case_ids=frozenset({"e", "a"})))
        assert got == ["a", "e"]

    def test_unknown_region_rejected(self, dataset):
        with pytest.raises(FilterError) as err:
            filter_cases(dataset, FilterSpec(regions=frozenset({"overseas", "XX"})))
        assert err.value.field == "regions"
        assert "XX" in str(err.value)

    def test_unknown_topic_rejected(self, dataset):
        with pytest.raises(FilterError) as err:
            filter_cases(dataset, FilterSpec(topics=frozenset({"Gossip"})))
        assert err.value.field == "topics"
        assert "Gossip" in str(err.value)

    def test_reversed_window_rejected(self, dataset):
        with pytest.raises(FilterError):
            filter_cases(dataset, FilterSpec(
                time_from=parse_timestamp("2020-03-05T00:00:00Z"),
                time_to=parse_timestamp("2020-03-01T00:00:00Z")))

    def test_monotone_under_added_constraints(self, dataset):
        base = set(filter_cases(dataset, FilterSpec()))
        narrower = [
            FilterSpec(regions=frozenset({"GD"})),
            FilterSpec(regions=frozenset({"GD"}), topics=frozenset({"Society"})),
            FilterSpec(regions=frozenset({"GD"}), topics=frozenset({"Society"}),
                       time_to=parse_timestamp("2020-03-03T00:00:00Z")),
        ]
        prev = base
        for spec in narrower:
            cur = set(filter_cases(dataset, spec))
            assert cur <= prev
            prev = cur


class TestRegionCounts:
    def test_fixture_counts(self, dataset):
        counts = region_counts(dataset, FilterSpec())
        assert counts["overseas"] == 3
        assert counts["GD"] == 2
        assert sum(counts.values()) == 5
        assert set(counts) >= set(REGION_CODES)
        assert counts["BJ"] == 0

    def test_single_case_region(self):
        ds = make_dataset([root_record("x", "HB", "2020-03-01T00:00:00Z")])
        counts = region_counts(ds, FilterSpec())
        assert counts["HB"] == 1
        assert all(v == 0 for region, v in counts.items() if region != "HB")

    def test_own_regions_field_ignored(self, dataset):
        counts = region_counts(dataset, FilterSpec(regions=frozenset({"GD"})))
        assert counts["overseas"] == 3

    def test_partition_identity(self, dataset):
        spec = FilterSpec(time_to=parse_timestamp("2020-03-05T00:00:00Z"))
        counts = region_counts(dataset, spec)
        assert sum(counts.values()) == len(filter_cases(dataset, spec))


class TestTopicSeries:
    def test_empty_filtered_set(self, dataset):
        spec = FilterSpec(time_to=parse_timestamp("2019-01-02T00:00:00Z"),
                          time_from=parse_timestamp("2019-01-01T00:00:00Z"))
        assert topic_series(dataset, spec) == []

    def test_single_case_series(self):
        ds = make_dataset([root_record("x", "HB", "2020-03-01T07:00:00Z",
                                       "election protest rally")])
        series = topic_series(ds, FilterSpec())
        assert len(series) == 1
        assert series[0].topic == "World News"
        assert len(series[0].points) == 1
        day, count = series[0].points[0]
        assert (day.isoformat(), count) == ("2020-03-01", 1)

    def test_zero_filled_aligned_ranges(self, dataset):
        series = topic_series(dataset, FilterSpec())
        for s in series:
            days = [d for d, _ in s.points]
            assert days == sorted(days)
            assert len(days) == 5  # 2020-03-01 .. 2020-03-05
            assert all(c >= 0 for _, c in s.points)

    def test_daily_sums_match_histogram_oracle(self, dataset):
        spec = FilterSpec()
        series = topic_series(dataset, spec)
        sums = Counter()
        for s in series:
            for day, count in s.points:
                sums[day] += count
        roots = {c.root_id: c.root for c in dataset.cascades}
        expected = daily_counts([roots[cid].created_at.date()
                                 for cid in filter_cases(dataset, spec)])
        assert dict(sums) == expected

    def test_keywords_only_on_active_days(self, dataset):
        for s in topic_series(dataset, FilterSpec(), k=3):
            point_counts = dict(s.points)
            for day, keywords in s.keywords_by_day.items():
                assert point_counts[day] > 0
                assert 0 < len(keywords) <= 3


class TestFingerprint:
    def test_canonicalization_stable(self):
        a = FilterSpec(regions=frozenset({"GD", "HB"}), topics=frozenset({"Health"}))
        b = FilterSpec(regions=frozenset({"HB", "GD"}), topics=frozenset({"Health"}))
        assert a.canonical_json() == b.canonical_json()
        assert a.fingerprint() == b.fingerprint()
        assert a.fingerprint() != FilterSpec().fingerprint()

    def test_from_json_round_trip(self):
        spec = FilterSpec.from_json({
            "regions": ["GD"], "time_from": "2020-03-01T00:00:00Z"})
        assert spec.regions == frozenset({"GD"})
        assert spec.time_from == parse_timestamp("2020-03-01T00:00:00Z")
        assert spec.topics is None

    def test_from_json_rejects_unknown_field(self):
        with pytest.raises(FilterError) as err:
            FilterSpec.from_json({"regionz": ["GD"]})
        assert err.value.field == "regionz"

    def test_from_json_rejects_bad_types(self):
        with pytest.raises(FilterError) as err:
            FilterSpec.from_json({"regions": "GD"})
        assert err.value.field == "regions"
        with pytest.raises(FilterError) as err:
            FilterSpec.from_json({"time_from": "not-a-time"})
        assert err.value.field == "time_from"


class TestFuzzIdentities:
    def test_partition_identities_on_random_datasets(self):
        for seed in range(10):
            rng = random.Random(seed)
            posts, _ = generate_dump(
                n_cases=rng.randrange(3, 25), n_descendants=rng.randrange(0, 60),
                n_users=5, seed=seed)
            ds = make_dataset(posts)
            all_ids = filter_cases(ds, FilterSpec())
            assert len(all_ids) == len(ds.cascades)

            region_pool = sorted({c.root.region for c in ds.cascades})
            spec = FilterSpec(regions=frozenset(rng.sample(
                region_pool, max(1, len(region_pool) // 2))))
            counts = region_counts(ds, spec)
            assert sum(counts.values()) == len(filter_cases(
                ds, FilterSpec(topics=spec.topics, time_from=spec.time_from,
                               time_to=spec.time_to, case_ids=spec.case_ids)))

            series = topic_series(ds, spec)
            total = sum(c for s in series for _, c in s.points)
            assert total == len(filter_cases(ds, spec))
