"""Per-case feature extraction: keywords, sentiment, topic, influence,
user metrics, and the standardized vector fed to the 2-D projection.

Everything here is a pure function of the immutable dataset; cases can be
evaluated in any order (or in parallel) with identical results.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import TopicRule
from .ingest import Cascade, UserProfile

# CJK unified ideographs (base + extension A + compatibility block).
_TOKEN_RE = re.compile(
    r"(?P<latin>[0-9a-z]+)|(?P<cjk>[㐀-䶿一-鿿豈-﫿]+)"
)

#: Scalar columns of the feature vector, before the topic one-hot block.
VECTOR_SCALARS = (
    "log_fans", "log_followees", "log_tweets", "integrity",
    "log_influence", "sentiment", "max_depth", "duration_days",
)


@dataclass(frozen=True)
class SentimentLabel:
    score: float  # in [-1, 1]
    label: str    # negative | neutral | positive


@dataclass
class CaseFeatures:
    """Feature record for one suspected rumor (one cascade)."""

    case_id: str
    keywords: list[tuple[str, float]]
    sentiment: SentimentLabel
    topic: str
    influence: int
    log_fans: float
    log_followees: float
    log_tweets: float
    integrity: float
    max_depth: int
    duration_days: float
    vector: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PostVisual:
    """Per-post attributes the propagation view encodes."""

    post_id: str
    word_count: int
    sentiment: SentimentLabel
    keyword: Optional[str]


class Tokenizer:
    """Lowercasing tokenizer: Latin/digit runs split on non-alphanumerics,
    CJK runs emitted as overlapping character bigrams (a lone CJK char is
    its own token)."""

    def __init__(self, stopwords: Iterable[str] = ()):
        self.stopwords = frozenset(stopwords)

    def raw_tokens(self, text: str) -> list[str]:
        tokens: list[str] = []
        for match in _TOKEN_RE.finditer(text.lower()):
            if match.group("latin") is not None:
                tokens.append(match.group("latin"))
            else:
                run = match.group("cjk")
                if len(run) == 1:
                    tokens.append(run)
                else:
                    tokens.extend(run[i:i + 2] for i in range(len(run) - 1))
        return tokens

    def tokens(self, text: str) -> list[str]:
        return [t for t in self.raw_tokens(text) if t not in self.stopwords]


def tokenize(text: str, stopwords: Iterable[str] = ()) -> list[str]:
    return Tokenizer(stopwords).tokens(text)


def tf_idf(corpus: Sequence[Sequence[str]]) -> list[list[tuple[str, float]]]:
    """Smoothed TF-IDF per document.

    weight(t, d) = (count(t, d) / len(d)) * (ln((1 + N) / (1 + df(t))) + 1)

    Per-document results are sorted by weight descending, ties broken
    lexicographically by token. A document with zero tokens yields an
    empty list.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    n_docs = len(corpus)
    df: Counter = Counter()
    for doc in corpus:
        df.update(set(doc))
    idf = {t: math.log((1 + n_docs) / (1 + c)) + 1.0 for t, c in df.items()}

    out = []
    for doc in corpus:
        if not doc:
            out.append([])
            continue
        counts = Counter(doc)
        inv_len = 1.0 / len(doc)
        weights = [(t, c * inv_len * idf[t]) for t, c in counts.items()]
        weights.sort(key=lambda kv: (-kv[1], kv[0]))
        out.append(weights)
    return out


def sentiment_score(
    text: str,
    lexicon: dict[str, float],
    threshold: float = 0.1,
    tokenizer: Optional[Tokenizer] = None,
) -> SentimentLabel:
    """Mean lexicon value over matched token occurrences, clamped to [-1, 1].

    No matches scores 0 (neutral). The label dead-zone is +-threshold.
    """
    tok = tokenizer if tokenizer is not None else _PLAIN_TOKENIZER
    hits = [lexicon[t] for t in tok.raw_tokens(text) if t in lexicon]
    # fsum: exactly rounded, so the score is invariant under token order
    score = max(-1.0, min(1.0, math.fsum(hits) / len(hits))) if hits else 0.0
    if score < -threshold:
        label = "negative"
    elif score > threshold:
        label = "positive"
    else:
        label = "neutral"
    return SentimentLabel(score=score, label=label)


_PLAIN_TOKENIZER = Tokenizer()


def classify_topic(
    keywords: Sequence[tuple[str, float]],
    taxonomy: Sequence[TopicRule],
) -> str:
    """Label whose trigger set has maximal summed keyword weight.

    Ties break by taxonomy order; zero overlap everywhere falls through to
    the catch-all (last entry, empty trigger set).
    """
    if not taxonomy:
        raise ValueError("taxonomy must be non-empty")
    best_label = taxonomy[-1].label
    best_score = 0.0
    for rule in taxonomy:
        score = sum(w for t, w in keywords if t in rule.triggers)
        if score > best_score:
            best_label, best_score = rule.label, score
    return best_label


def compute_influence(cascade: Cascade) -> int:
    """Descendant count: retweets + comments below the root."""
    return cascade.size - 1


def profile_integrity(user: UserProfile) -> float:
    flags = (user.verified, user.has_bio, user.has_avatar,
             user.has_location, user.has_gender)
    return sum(flags) / 5.0


def log10p(x: float) -> float:
    return math.log10(1.0 + x)


_FALLBACK_USER = UserProfile(
    id="", screen_name="", verified=False, fans=0, followees=0, tweets=0,
    has_bio=False, has_avatar=False, has_location=False, has_gender=False)


def extract_case_features(
    cascades: Sequence[Cascade],
    users: dict[str, UserProfile],
    tokenizer: Tokenizer,
    lexicon: dict[str, float],
    taxonomy: Sequence[TopicRule],
    keywords_per_case: int = 10,
    sentiment_threshold: float = 0.1,
) -> tuple[list[CaseFeatures], list[str]]:
    """Extract all per-case features (vectors not yet attached).

    Returns the feature list (cascade order) and the ids of cases whose
    root author has no profile in the dump; those fall back to an empty
    profile rather than failing.
    """
    corpus = [tokenizer.tokens(c.root.text) for c in cascades]
    keyword_lists = tf_idf(corpus) if corpus else []

    features: list[CaseFeatures] = []
    missing_profiles: list[str] = []
    for cascade, kws in zip(cascades, keyword_lists):
        root = cascade.root
        user = users.get(root.user_id)
        if user is None:
            missing_profiles.append(cascade.root_id)
            user = _FALLBACK_USER
        keywords = kws[:keywords_per_case]
        last_ts = max(p.created_at for p in cascade.nodes.values())
        features.append(CaseFeatures(
            case_id=cascade.root_id,
            keywords=keywords,
            sentiment=sentiment_score(root.text, lexicon, sentiment_threshold, tokenizer),
            topic=classify_topic(keywords, taxonomy),
            influence=compute_influence(cascade),
            log_fans=log10p(user.fans),
            log_followees=log10p(user.followees),
            log_tweets=log10p(user.tweets),
            integrity=profile_integrity(user),
            max_depth=cascade.max_depth,
            duration_days=(last_ts - root.created_at).total_seconds() / 86400.0,
        ))
    return features, missing_profiles


def extract_post_visuals(
    cascades: Sequence[Cascade],
    tokenizer: Tokenizer,
    lexicon: dict[str, float],
    sentiment_threshold: float = 0.1,
) -> dict[str, PostVisual]:
    """Word count, sentiment and top keyword for every post.

    The keyword is the post's top TF-IDF token within its own cascade
    (one document per node), so labels stay local to the rumor.
    """
    visuals: dict[str, PostVisual] = {}
    for cascade in cascades:
        ids = list(cascade.nodes)
        docs = [tokenizer.tokens(cascade.nodes[pid].text) for pid in ids]
        ranked = tf_idf(docs)
        for pid, doc_keywords in zip(ids, ranked):
            post = cascade.nodes[pid]
            visuals[pid] = PostVisual(
                post_id=pid,
                word_count=len(tokenizer.raw_tokens(post.text)),
                sentiment=sentiment_score(post.text, lexicon, sentiment_threshold, tokenizer),
                keyword=doc_keywords[0][0] if doc_keywords else None,
            )
    return visuals


def standardize_columns(matrix: np.ndarray) -> np.ndarray:
    """Z-score each column; zero-variance columns standardize to all-zeros."""
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)  # population std: two-point columns give +-1
    out = np.zeros_like(matrix, dtype=float)
    nonzero = std > 0
    out[:, nonzero] = (matrix[:, nonzero] - mean[nonzero]) / std[nonzero]
    return out


def feature_matrix(
    features: Sequence[CaseFeatures],
    taxonomy: Sequence[TopicRule],
) -> np.ndarray:
    """Raw (unstandardized) feature matrix, 8 scalars + topic one-hot."""
    labels = [rule.label for rule in taxonomy]
    index = {label: i for i, label in enumerate(labels)}
    n_scalars = len(VECTOR_SCALARS)
    mat = np.zeros((len(features), n_scalars + len(labels)))
    for row, cf in enumerate(features):
        mat[row, :n_scalars] = (
            cf.log_fans, cf.log_followees, cf.log_tweets, cf.integrity,
            log10p(cf.influence), cf.sentiment.score, cf.max_depth,
            cf.duration_days,
        )
        mat[row, n_scalars + index[cf.topic]] = 1.0
    return mat


def attach_vectors(
    features: Sequence[CaseFeatures],
    taxonomy: Sequence[TopicRule],
) -> np.ndarray:
    """Standardize the dataset's feature matrix and attach per-case vectors."""
    standardized = standardize_columns(feature_matrix(features, taxonomy))
    for row, cf in enumerate(features):
        cf.vector = standardized[row]
    return standardized
