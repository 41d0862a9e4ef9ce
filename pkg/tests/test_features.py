import math
import random

import numpy as np
import pytest

from rumorcast.config import TopicRule, load_config
from rumorcast.features import (
    CaseFeatures, SentimentLabel, Tokenizer, attach_vectors, classify_topic,
    compute_influence, extract_case_features, extract_post_visuals,
    feature_matrix, profile_integrity, sentiment_score, standardize_columns,
    tf_idf, tokenize,
)
from rumorcast.ingest import UserProfile, build_cascades

from oracles import descendant_count, tfidf_brute
from generators import random_tree_posts

TAXONOMY = (
    TopicRule("World News", frozenset({"election", "protest"})),
    TopicRule("Health", frozenset({"virus"})),
    TopicRule("Other", frozenset()),
)


class TestTokenize:
    def test_latin_runs(self):
        assert tokenize("Good, good!") == ["good", "good"]

    def test_cjk_bigrams(self):
        assert tokenize("警察局") == ["警察", "察局"]

    def test_empty(self):
        assert tokenize("") == []

    def test_lone_cjk_char(self):
        assert tokenize("好") == ["好"]

    def test_mixed_scripts_and_digits(self):
        assert tokenize("ID card警察 2020!") == ["id", "card", "警察", "2020"]

    def test_stopwords_removed(self):
        assert tokenize("the good the bad", stopwords={"the"}) == ["good", "bad"]

    def test_raw_tokens_keep_stopwords(self):
        tok = Tokenizer(stopwords={"the"})
        assert tok.raw_tokens("the good") == ["the", "good"]


class TestTfIdf:
    CORPUS = [["a", "b"], ["a", "c"], ["c", "c", "d"]]

    def test_hand_derived_weight(self):
        # 0.5 * (ln(4/3) + 1), frozen from the brute-force oracle
        weights = dict(tf_idf(self.CORPUS)[0])
        assert weights["a"] == pytest.approx(0.6438410362258904, abs=1e-15)

    def test_matches_oracle_everywhere(self):
        expected = tfidf_brute(self.CORPUS)
        for got, want in zip(tf_idf(self.CORPUS), expected):
            assert dict(got) == pytest.approx(want, abs=1e-15)

    def test_token_in_every_document_idf_is_one(self):
        weights = dict(tf_idf([["x", "y"], ["x"], ["x", "z"]])[1])
        assert weights["x"] == 1.0  # tf = 1, idf = ln(1) + 1

    def test_single_document(self):
        assert tf_idf([["x"]])[0] == [("x", 1.0)]

    def test_empty_document_gives_empty_list(self):
        assert tf_idf([["a"], []]) [1] == []

    def test_sorted_desc_with_lexicographic_ties(self):
        ranked = tf_idf([["b", "a"]])[0]
        assert ranked == [("a", ranked[0][1]), ("b", ranked[1][1])]
        assert ranked[0][1] == ranked[1][1]

    def test_weights_nonnegative_and_idf_monotone(self):
        rng = random.Random(5)
        vocab = [f"t{i}" for i in range(12)]
        for _ in range(30):
            corpus = [[rng.choice(vocab) for _ in range(rng.randrange(1, 15))]
                      for _ in range(rng.randrange(2, 8))]
            ranked = tf_idf(corpus)
            assert all(w >= 0 for doc in ranked for _, w in doc)
            # Spreading a probe token into one more document never raises
            # its weight in a fixed reference document.
            probe = "probe"
            corpus = [["probe", "x"]] + corpus
            before = dict(tf_idf(corpus)[0])[probe]
            corpus[1] = corpus[1] + [probe]
            after = dict(tf_idf(corpus)[0])[probe]
            assert after <= before + 1e-15


class TestSentiment:
    def test_all_positive(self):
        result = sentiment_score("good good", {"good": 1.0})
        assert result.score == 1.0
        assert result.label == "positive"

    def test_no_hits_neutral(self):
        result = sentiment_score("nothing matches", {"good": 1.0})
        assert result.score == 0.0
        assert result.label == "neutral"

    def test_mean_over_occurrences(self):
        result = sentiment_score("good terrible terrible", {"good": 1.0, "terrible": -1.0})
        assert result.score == pytest.approx(-1.0 / 3.0)
        assert result.label == "negative"

    def test_dead_zone(self):
        assert sentiment_score("good", {"good": 0.05}).label == "neutral"
        assert sentiment_score("good", {"good": 0.2}).label == "positive"

    def test_token_permutation_invariance(self):
        lexicon = {"good": 0.6, "bad": -0.4, "fine": 0.1}
        words = ["good", "bad", "fine", "noise", "good"]
        scores = set()
        for seed in range(10):
            shuffled = list(words)
            random.Random(seed).shuffle(shuffled)
            scores.add(sentiment_score(" ".join(shuffled), lexicon).score)
        assert len(scores) == 1


class TestClassifyTopic:
    def test_empty_keywords(self):
        assert classify_topic([], TAXONOMY) == "Other"

    def test_single_overlap(self):
        assert classify_topic([("election", 0.9)], TAXONOMY) == "World News"

    def test_tie_breaks_by_taxonomy_order(self):
        keywords = [("election", 0.5), ("virus", 0.5)]
        assert classify_topic(keywords, TAXONOMY) == "World News"

    def test_zero_overlap_everywhere(self):
        assert classify_topic([("nothing", 1.0)], TAXONOMY) == "Other"

    def test_scale_invariance(self):
        keywords = [("election", 0.2), ("virus", 0.5), ("x", 0.9)]
        base = classify_topic(keywords, TAXONOMY)
        for scale in (0.001, 3.0, 1e6):
            scaled = [(t, w * scale) for t, w in keywords]
            assert classify_topic(scaled, TAXONOMY) == base


class TestInfluence:
    def test_singleton(self):
        cascade = build_cascades(random_tree_posts(random.Random(0), 1)).cascades[0]
        assert compute_influence(cascade) == 0

    def test_four_node_tree(self):
        cascade = build_cascades(random_tree_posts(random.Random(1), 4)).cascades[0]
        assert compute_influence(cascade) == 3

    def test_matches_bfs_descendant_count_on_random_trees(self):
        for seed in range(100):
            rng = random.Random(seed)
            posts = random_tree_posts(rng, rng.randrange(1, 201))
            cascade = build_cascades(posts).cascades[0]
            parent_of = {p.id: p.parent_id for p in posts if p.parent_id}
            assert compute_influence(cascade) == descendant_count(cascade.root_id, parent_of)


class TestIntegrity:
    def make_user(self, **flags):
        defaults = dict(verified=False, has_bio=False, has_avatar=False,
                        has_location=False, has_gender=False)
        defaults.update(flags)
        return UserProfile(id="u", screen_name="u", fans=0, followees=0,
                           tweets=0, **defaults)

    def test_all_true(self):
        user = self.make_user(verified=True, has_bio=True, has_avatar=True,
                              has_location=True, has_gender=True)
        assert profile_integrity(user) == 1.0

    def test_all_false(self):
        assert profile_integrity(self.make_user()) == 0.0

    def test_verified_only(self):
        assert profile_integrity(self.make_user(verified=True)) == pytest.approx(0.2)


def make_case(case_id="c", influence=5, **overrides):
    base = dict(
        case_id=case_id, keywords=[], sentiment=SentimentLabel(0.3, "positive"),
        topic="Health", influence=influence, log_fans=2.0, log_followees=1.0,
        log_tweets=3.0, integrity=0.6, max_depth=2, duration_days=1.5)
    base.update(overrides)
    return CaseFeatures(**base)


class TestFeatureVectors:
    def test_identical_cases_all_zero(self):
        features = [make_case(f"c{i}") for i in range(4)]
        vectors = attach_vectors(features, TAXONOMY)
        assert np.all(vectors == 0.0)

    def test_two_cases_differing_only_in_influence(self):
        features = [make_case("c0", influence=3), make_case("c1", influence=30)]
        vectors = attach_vectors(features, TAXONOMY)
        diff = vectors[0] != vectors[1]
        assert list(np.nonzero(diff)[0]) == [4]  # the log-influence column
        assert sorted(vectors[:, 4]) == pytest.approx([-1.0, 1.0], abs=1e-12)

    def test_vector_length(self):
        features = [make_case("c0"), make_case("c1", topic="Other")]
        vectors = attach_vectors(features, TAXONOMY)
        assert vectors.shape[1] == 8 + len(TAXONOMY)
        assert all(cf.vector.shape == (8 + len(TAXONOMY),) for cf in features)

    def test_standardized_columns(self):
        rng = np.random.default_rng(9)
        matrix = rng.normal(size=(40, 6))
        matrix[:, 2] = 7.0  # constant column
        out = standardize_columns(matrix)
        means = out.mean(axis=0)
        variances = out.var(axis=0)
        assert np.all(np.abs(means) < 1e-9)
        for col in range(6):
            if col == 2:
                assert variances[col] == 0.0
            else:
                assert abs(variances[col] - 1.0) < 1e-9


class TestExtraction:
    def test_end_to_end_on_synthetic_cascades(self):
        cfg = load_config()
        tokenizer = Tokenizer(cfg.stopwords)
        rng = random.Random(3)
        posts = (random_tree_posts(rng, 6, root_id="r0")
                 + random_tree_posts(rng, 3, root_id="r1"))
        # Give the roots recognizable topical text.
        posts[0] = posts[0].__class__(**{**posts[0].__dict__,
                                         "text": "election protest tonight"})
        cascades = build_cascades(posts).cascades
        users = {"u0": UserProfile(id="u0", screen_name="u0", verified=True,
                                   fans=99, followees=9, tweets=999, has_bio=True,
                                   has_avatar=True, has_location=True, has_gender=True)}
        features, missing = extract_case_features(
            cascades, users, tokenizer, cfg.lexicon, cfg.taxonomy,
            keywords_per_case=cfg.keywords_per_case)
        assert missing == []
        assert [cf.case_id for cf in features] == [c.root_id for c in cascades]
        by_case = {cf.case_id: cf for cf in features}
        assert by_case["r0"].topic == "World News"
        assert by_case["r0"].influence == 5
        assert by_case["r0"].log_fans == pytest.approx(math.log10(100))
        assert all(len(cf.keywords) <= cfg.keywords_per_case for cf in features)
        for cf in features:
            weights = [w for _, w in cf.keywords]
            assert weights == sorted(weights, reverse=True)

    def test_post_visuals(self):
        cfg = load_config()
        tokenizer = Tokenizer(cfg.stopwords)
        posts = random_tree_posts(random.Random(4), 5)
        cascades = build_cascades(posts).cascades
        visuals = extract_post_visuals(cascades, tokenizer, cfg.lexicon)
        assert set(visuals) == {p.id for p in posts}
        for post in posts:
            assert visuals[post.id].word_count == len(tokenizer.raw_tokens(post.text))

    def test_missing_profile_falls_back(self):
        cfg = load_config()
        cascades = build_cascades(random_tree_posts(random.Random(5), 2)).cascades
        features, missing = extract_case_features(
            cascades, {}, Tokenizer(), cfg.lexicon, cfg.taxonomy)
        assert missing == [cascades[0].root_id]
        assert features[0].integrity == 0.0
        assert features[0].log_fans == 0.0
