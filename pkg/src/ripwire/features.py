"""Feature extraction from report timelines under a time cutoff and an
optional sliding window.

Five feature sets: 16 social features, single-model text embeddings
(w2v), per-class embeddings concatenated (multiw2v), and the two
social+text concatenations. All extraction is pure: the same slice and
models always produce the identical vector.
"""

from __future__ import annotations

import math
import os
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from ripwire.corpus.records import Timeline
from ripwire.embeddings import ClassModels, EmbeddingModel, embed_timeline, tokenize
from ripwire.errors import ConfigurationError

__all__ = [
    "TIME_BUCKETS_MIN",
    "WINDOW_FRACTIONS",
    "FEATURE_SETS",
    "SOCIAL_FEATURE_NAMES",
    "WindowSpec",
    "cutoff",
    "window",
    "window_bounds",
    "slice_timeline",
    "follow_ratio",
    "social_features",
    "w2v_features",
    "multiw2v_features",
    "concat_features",
    "feature_length",
    "feature_names",
    "compute_features",
    "ReportFeaturizer",
    "write_feature_matrix",
    "read_feature_matrix",
]

# Elapsed-minutes buckets at which early classification is simulated.
TIME_BUCKETS_MIN: tuple[int, ...] = (0, 5, 10, 15, 30, 60, 120, 180, 300)

# Trailing-window fractions: the window keeps the last p of elapsed time.
WINDOW_FRACTIONS: tuple[float, ...] = (0.1, 0.25, 0.5, 0.75, 1.0)

FEATURE_SETS: tuple[str, ...] = (
    "social",
    "w2v",
    "multiw2v",
    "social+w2v",
    "social+multiw2v",
)

SOCIAL_FEATURE_NAMES: tuple[str, ...] = (
    "user_ratio",
    "retweeting_user_ratio",
    "tweet_length",
    "retweets_per_tweet",
    "reply_ratio",
    "tweeting_rate",
    "link_ratio",
    "question_ratio",
    "exclamation_ratio",
    "picture_ratio",
    "tokens_per_tweet",
    "hashtags_per_tweet",
    "mentions_per_tweet",
    "language_count",
    "avg_follow_ratio",
    "avg_follow_ratio_retweeting",
)


@dataclass(frozen=True, slots=True)
class WindowSpec:
    """Observation time t (seconds since the first tweet) and the
    trailing fraction p of elapsed time to keep."""

    t: float
    p: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"observation time must be >= 0, got {self.t}")
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"window fraction must be in (0, 1], got {self.p}")


def cutoff(timeline: Timeline, t: float) -> Timeline:
    """Tweets posted up to t seconds after the first one. t=0 keeps
    exactly the first tweet, even when others share its timestamp."""
    if t < 0:
        raise ValueError(f"cutoff time must be >= 0, got {t}")
    if t == 0:
        return Timeline(timeline.tweets[:1])
    limit = timeline.t0 + t
    kept = tuple(tw for tw in timeline.tweets if tw.timestamp <= limit)
    return Timeline(kept)


def window_bounds(t0: int, t: float, p: float) -> tuple[float, float]:
    """Inclusive [low, high] timestamp bounds of the trailing window at
    observation time t: the last p of the elapsed interval."""
    high = t0 + t
    low = t0 + t * (1.0 - p)
    return low, high


def window(timeline: Timeline, spec: WindowSpec) -> Timeline:
    """Trailing-window slice of an already-cutoff timeline.

    p=1.0 returns the input unchanged (identical to the cutoff). An
    empty window falls back to the single most recent tweet so every
    instance stays classifiable.
    """
    if spec.p == 1.0 or spec.t == 0:
        return timeline
    low, _ = window_bounds(timeline.t0, spec.t, spec.p)
    kept = tuple(tw for tw in timeline.tweets if tw.timestamp >= low)
    if not kept:
        kept = timeline.tweets[-1:]
    return Timeline(kept)


def slice_timeline(timeline: Timeline, t: float, p: float = 1.0) -> Timeline:
    """Cutoff at t, then apply the trailing window of fraction p."""
    return window(cutoff(timeline, t), WindowSpec(t, p))


def follow_ratio(following: int, followers: int) -> float:
    """log10(following) / log10(followers), an account-reputation proxy.

    Degenerate audiences (either count <= 1) use log10(x+1) smoothing on
    both sides; a zero-follower account maps to 0. Always finite, >= 0.
    """
    if followers <= 1 or following <= 1:
        denom = math.log10(followers + 1)
        if denom == 0.0:
            return 0.0
        return math.log10(following + 1) / denom
    return math.log10(following) / math.log10(followers)


def social_features(slice_: Timeline) -> np.ndarray:
    """The 16 social features, in SOCIAL_FEATURE_NAMES order.

    Unique-user statistics take each user's metadata from their first
    tweet in the slice. A slice spanning under one second uses a one
    second floor for the tweeting rate; a slice with no retweets reports
    0 for the retweeting-user follow ratio.
    """
    tweets = slice_.tweets
    n = len(tweets)
    user_first: dict[str, float] = {}
    rt_user_first: dict[str, float] = {}
    hashtags: set[str] = set()
    mentions: set[str] = set()
    languages: set[str] = set()
    length_sum = 0
    retweet_sum = 0
    reply_count = 0
    link_sum = 0
    q_sum = 0
    e_sum = 0
    pic_sum = 0
    token_sum = 0
    for tw in tweets:
        if tw.user_id not in user_first:
            user_first[tw.user_id] = follow_ratio(tw.following, tw.followers)
        if tw.is_retweet and tw.user_id not in rt_user_first:
            rt_user_first[tw.user_id] = follow_ratio(tw.following, tw.followers)
        hashtags.update(tw.hashtags)
        mentions.update(tw.mentions)
        languages.add(tw.language)
        length_sum += len(tw.text)
        retweet_sum += tw.retweet_count
        reply_count += tw.is_reply
        link_sum += tw.link_count
        q_sum += tw.text.count("?")
        e_sum += tw.text.count("!")
        pic_sum += tw.picture_count
        token_sum += len(tw.text.split())
    span = tweets[-1].timestamp - tweets[0].timestamp
    rate = n / max(span, 1)
    ratios = list(user_first.values())
    rt_ratios = list(rt_user_first.values())
    return np.array(
        [
            len(user_first) / n,
            len(rt_user_first) / n,
            length_sum / n,
            retweet_sum / n,
            reply_count / n,
            rate,
            link_sum / n,
            q_sum / n,
            e_sum / n,
            pic_sum / n,
            token_sum / n,
            len(hashtags) / n,
            len(mentions) / n,
            float(len(languages)),
            sum(ratios) / len(ratios),
            sum(rt_ratios) / len(rt_ratios) if rt_ratios else 0.0,
        ],
        dtype=np.float64,
    )


def w2v_features(slice_: Timeline, model: EmbeddingModel) -> np.ndarray:
    return embed_timeline(slice_, model)


def multiw2v_features(slice_: Timeline, class_models: ClassModels) -> np.ndarray:
    """Per-class timeline embeddings concatenated in canonical label order."""
    return np.concatenate(
        [embed_timeline(slice_, model) for model in class_models.ordered()]
    )


def concat_features(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate(list(parts))


def feature_length(feature_set: str, dimension: int) -> int:
    if feature_set == "social":
        return 16
    if feature_set == "w2v":
        return dimension
    if feature_set == "multiw2v":
        return 3 * dimension
    if feature_set == "social+w2v":
        return 16 + dimension
    if feature_set == "social+multiw2v":
        return 16 + 3 * dimension
    raise ConfigurationError(f"unknown feature set {feature_set!r}")


def feature_names(feature_set: str, dimension: int) -> list[str]:
    """Column names for the feature-matrix file header."""
    social = list(SOCIAL_FEATURE_NAMES)
    w2v = [f"w2v_{i}" for i in range(dimension)]
    multi = [
        f"multiw2v_{label}_{i}"
        for label in ("real", "commemoration", "fake")
        for i in range(dimension)
    ]
    if feature_set == "social":
        return social
    if feature_set == "w2v":
        return w2v
    if feature_set == "multiw2v":
        return multi
    if feature_set == "social+w2v":
        return social + w2v
    if feature_set == "social+multiw2v":
        return social + multi
    raise ConfigurationError(f"unknown feature set {feature_set!r}")


def compute_features(
    slice_: Timeline,
    feature_set: str,
    model: EmbeddingModel | None = None,
    class_models: ClassModels | None = None,
) -> np.ndarray:
    """Reference (unbatched) extraction of one feature set from a slice."""
    if feature_set == "social":
        return social_features(slice_)
    if feature_set == "w2v":
        if model is None:
            raise ConfigurationError("feature set 'w2v' needs the single model")
        return w2v_features(slice_, model)
    if feature_set == "multiw2v":
        if class_models is None:
            raise ConfigurationError("feature set 'multiw2v' needs the class models")
        return multiw2v_features(slice_, class_models)
    if feature_set == "social+w2v":
        if model is None:
            raise ConfigurationError("feature set 'social+w2v' needs the single model")
        return concat_features([social_features(slice_), w2v_features(slice_, model)])
    if feature_set == "social+multiw2v":
        if class_models is None:
            raise ConfigurationError(
                "feature set 'social+multiw2v' needs the class models"
            )
        return concat_features(
            [social_features(slice_), multiw2v_features(slice_, class_models)]
        )
    raise ConfigurationError(f"unknown feature set {feature_set!r}")


class ReportFeaturizer:
    """Per-report precomputation so grid evaluation slices cheaply.

    Tweets are tokenized and embedded once per model; a (bucket, fraction)
    query reduces to an index range over the precomputed arrays. Results
    are identical to compute_features on the corresponding slice.
    """

    def __init__(
        self,
        timeline: Timeline,
        model: EmbeddingModel | None = None,
        class_models: ClassModels | None = None,
    ):
        self.timeline = timeline
        self.ts = [tw.timestamp for tw in timeline.tweets]
        self._embeds: dict[str, np.ndarray] = {}
        self._social_cache: dict[tuple[int, int], np.ndarray] = {}
        # Latest timestamp any supplied model was trained on, so the
        # evaluation leakage guard can see through to the embeddings.
        self.models_max_ts = 0
        token_lists = None
        if model is not None or class_models is not None:
            token_lists = [tokenize(tw.text) for tw in timeline.tweets]
        if model is not None:
            self._embeds["w2v"] = self._embed_matrix(token_lists, model)
            self.models_max_ts = max(self.models_max_ts, model.corpus_max_ts)
        if class_models is not None:
            self.models_max_ts = max(self.models_max_ts, class_models.corpus_max_ts)
            for label, m in zip(
                ("real", "commemoration", "fake"), class_models.ordered()
            ):
                self._embeds[label] = self._embed_matrix(token_lists, m)

    @staticmethod
    def _embed_matrix(token_lists, model: EmbeddingModel) -> np.ndarray:
        matrix = np.zeros((len(token_lists), model.dimension), dtype=np.float64)
        vectors = model.vectors_f64()
        vocab = model.vocabulary
        for i, tokens in enumerate(token_lists):
            rows = vocab.encode(tokens)
            if rows:
                matrix[i] = vectors[rows].mean(axis=0)
        return matrix

    def slice_range(self, t: float, p: float = 1.0) -> tuple[int, int]:
        """[lo, hi) index range of the slice at observation time t with
        trailing fraction p, with the same degenerate-case rules as
        cutoff and window."""
        if t == 0:
            return 0, 1
        t0 = self.ts[0]
        hi = bisect_right(self.ts, t0 + t)
        if p == 1.0:
            return 0, hi
        low, _ = window_bounds(t0, t, p)
        lo = bisect_left(self.ts, low, 0, hi)
        if lo == hi:
            lo = hi - 1
        return lo, hi

    def slice_timeline(self, t: float, p: float = 1.0) -> Timeline:
        lo, hi = self.slice_range(t, p)
        return Timeline(self.timeline.tweets[lo:hi])

    def supports(self, feature_set: str) -> bool:
        """Whether the models given at construction cover this set."""
        if feature_set not in FEATURE_SETS:
            return False
        if feature_set in ("w2v", "social+w2v") and "w2v" not in self._embeds:
            return False
        if feature_set in ("multiw2v", "social+multiw2v") and "real" not in self._embeds:
            return False
        return True

    def features(self, feature_set: str, t: float, p: float = 1.0) -> np.ndarray:
        lo, hi = self.slice_range(t, p)
        parts: list[np.ndarray] = []
        if feature_set in ("social", "social+w2v", "social+multiw2v"):
            # Several feature sets and (t, p) pairs resolve to the same
            # index range; the cached vector must not be mutated.
            social = self._social_cache.get((lo, hi))
            if social is None:
                social = social_features(Timeline(self.timeline.tweets[lo:hi]))
                social.setflags(write=False)
                self._social_cache[lo, hi] = social
            parts.append(social)
        if feature_set in ("w2v", "social+w2v"):
            parts.append(self._embeds["w2v"][lo:hi].mean(axis=0))
        if feature_set in ("multiw2v", "social+multiw2v"):
            for label in ("real", "commemoration", "fake"):
                parts.append(self._embeds[label][lo:hi].mean(axis=0))
        if not parts:
            raise ConfigurationError(f"unknown feature set {feature_set!r}")
        return parts[0] if len(parts) == 1 else np.concatenate(parts)


def write_feature_matrix(
    destination: IO[str] | str,
    feature_set: str,
    dimension: int,
    rows: Iterable[tuple[str, str, int, float, np.ndarray]],
) -> int:
    """Feature-matrix file: header with the schema, then one row per
    (report, bucket, fraction): report_id, label, bucket_min, fraction,
    values. Floats are written with repr so re-parsing is exact."""
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as handle:
            return write_feature_matrix(handle, feature_set, dimension, rows)
    names = feature_names(feature_set, dimension)
    destination.write(
        "\t".join(["report_id", "label", "bucket_min", "fraction"] + names) + "\n"
    )
    count = 0
    for report_id, label, bucket, fraction, values in rows:
        if len(values) != len(names):
            raise ConfigurationError(
                f"row for {report_id} has {len(values)} values, schema has {len(names)}"
            )
        cells = [report_id, label, str(bucket), repr(float(fraction))]
        cells.extend(repr(float(v)) for v in values)
        destination.write("\t".join(cells) + "\n")
        count += 1
    return count


def read_feature_matrix(
    source: IO[str] | str,
) -> tuple[list[str], list[tuple[str, str, int, float, np.ndarray]]]:
    """Inverse of write_feature_matrix: (schema names, rows)."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as handle:
            return read_feature_matrix(handle)
    header = source.readline().rstrip("\n").split("\t")
    names = header[4:]
    rows = []
    for line in source:
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 4:
            continue
        values = np.array([float(x) for x in parts[4:]], dtype=np.float64)
        rows.append((parts[0], parts[1], int(parts[2]), float(parts[3]), values))
    return names, rows
