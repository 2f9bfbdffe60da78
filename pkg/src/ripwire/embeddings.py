"""Word embeddings: tokenizer, skip-gram negative-sampling trainer, and
per-class models.

The single-model path trains on every training tweet; the per-class path
trains one model per label on that label's tweets only, so the same
surface token can carry a different vector (or be absent) in each class.
Timelines embed as the mean over tweet vectors, tweets as the mean over
in-vocabulary token vectors.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from ripwire._kernels import BACKEND, rng_block
from ripwire.corpus.records import Timeline, Tweet
from ripwire.errors import ConfigurationError
from ripwire.labels import LABELS

__all__ = [
    "TOKEN_URL",
    "TOKEN_USER",
    "TOKEN_NUM",
    "tokenize",
    "SGNSParams",
    "Vocabulary",
    "EmbeddingModel",
    "ClassModels",
    "train_sgns",
    "train_class_models",
    "embed_tokens",
    "embed_tweet",
    "embed_timeline",
    "save_model",
    "load_model",
    "save_model_text",
    "load_model_text",
    "corpus_max_timestamp",
]

TOKEN_URL = "<url>"
TOKEN_USER = "<user>"
TOKEN_NUM = "<num>"

_PLACEHOLDERS = frozenset((TOKEN_URL, TOKEN_USER, TOKEN_NUM))
_NUM_RE = re.compile(r"[\d.,:%]*\d[\d.,:%]*")
_HAS_LETTER_RE = re.compile(r"[^\W\d_]")


def _strip_edges(piece: str) -> str:
    start = 0
    end = len(piece)
    while start < end and not piece[start].isalnum():
        start += 1
    while end > start and not piece[end - 1].isalnum():
        end -= 1
    return piece[start:end]


def tokenize(text: str) -> list[str]:
    """Lower-cased tokens with URLs, user mentions, and numbers replaced
    by placeholders; hashtags keep their #. Idempotent: tokenizing the
    space-joined output returns the same sequence."""
    tokens: list[str] = []
    for piece in text.split():
        if piece in _PLACEHOLDERS:
            tokens.append(piece)
            continue
        lowered = piece.lower()
        if lowered.startswith(("http://", "https://", "www.")):
            tokens.append(TOKEN_URL)
            continue
        lead = 0
        while lead < len(piece) and not (piece[lead].isalnum() or piece[lead] in "@#"):
            lead += 1
        trimmed = lowered[lead:]
        if trimmed.startswith("@"):
            if len(trimmed) > 1:
                tokens.append(TOKEN_USER)
            continue
        if trimmed.startswith("#"):
            tag = "#" + _strip_edges(trimmed[1:])
            if tag != "#":
                tokens.append(tag)
            continue
        word = _strip_edges(trimmed)
        if not word:
            continue
        if _NUM_RE.fullmatch(word):
            tokens.append(TOKEN_NUM)
        elif _HAS_LETTER_RE.search(word):
            tokens.append(word)
    return tokens


@dataclass(frozen=True, slots=True)
class SGNSParams:
    """Trainer hyperparameters. The learning rate decays linearly over
    all epochs down to learning_rate * 1e-4."""

    dimension: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_count: int = 5


class Vocabulary:
    """Dense token ids ordered by (frequency desc, token asc); only
    tokens meeting min_count survive."""

    __slots__ = ("tokens", "counts", "index", "min_count")

    def __init__(self, tokens: Sequence[str], counts: Sequence[int], min_count: int):
        self.tokens = tuple(tokens)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        self.min_count = min_count

    @classmethod
    def build(cls, sentences: Iterable[Sequence[str]], min_count: int) -> "Vocabulary":
        freq: dict[str, int] = {}
        for sentence in sentences:
            for token in sentence:
                freq[token] = freq.get(token, 0) + 1
        kept = sorted(
            ((t, c) for t, c in freq.items() if c >= min_count),
            key=lambda tc: (-tc[1], tc[0]),
        )
        return cls([t for t, _ in kept], [c for _, c in kept], min_count)

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, tokens: Iterable[str]) -> list[int]:
        """Token ids, dropping out-of-vocabulary tokens."""
        index = self.index
        return [i for i in (index.get(t) for t in tokens) if i is not None]


class EmbeddingModel:
    """Trained vectors plus the vocabulary they index."""

    __slots__ = (
        "vocabulary",
        "vectors",
        "params",
        "seed",
        "epoch_losses",
        "corpus_max_ts",
        "_vectors64",
    )

    def __init__(
        self,
        vocabulary: Vocabulary,
        vectors: np.ndarray,
        params: SGNSParams,
        seed: int,
        epoch_losses: tuple[float, ...] = (),
        corpus_max_ts: int = 0,
    ):
        if vectors.shape != (len(vocabulary), params.dimension):
            raise ConfigurationError(
                f"vector matrix {vectors.shape} does not match vocabulary "
                f"{len(vocabulary)} x dimension {params.dimension}"
            )
        if not np.all(np.isfinite(vectors)):
            raise ConfigurationError("model contains non-finite vectors")
        self.vocabulary = vocabulary
        self.vectors = vectors
        self.params = params
        self.seed = seed
        self.epoch_losses = tuple(epoch_losses)
        # Latest training-corpus tweet timestamp, carried with the model
        # so downstream evaluation can enforce its leakage guard. 0 means
        # unknown (models trained from bare sentences).
        self.corpus_max_ts = corpus_max_ts
        self._vectors64 = None

    @property
    def dimension(self) -> int:
        return self.params.dimension

    def vector(self, token: str) -> np.ndarray | None:
        i = self.vocabulary.index.get(token)
        return None if i is None else self.vectors[i]

    def vectors_f64(self) -> np.ndarray:
        """Float64 view of the matrix, cached (averaging precision)."""
        if self._vectors64 is None:
            self._vectors64 = self.vectors.astype(np.float64)
        return self._vectors64


@dataclass(frozen=True)
class ClassModels:
    """One embedding model per label, equal dimension."""

    models: dict[str, EmbeddingModel]

    def __post_init__(self):
        if set(self.models) != set(LABELS):
            raise ConfigurationError(
                f"class models must cover exactly {LABELS}, got {sorted(self.models)}"
            )
        dims = {m.dimension for m in self.models.values()}
        if len(dims) != 1:
            raise ConfigurationError(f"class models disagree on dimension: {dims}")

    @property
    def dimension(self) -> int:
        return next(iter(self.models.values())).dimension

    def ordered(self) -> tuple[EmbeddingModel, ...]:
        """Models in canonical label order."""
        return tuple(self.models[label] for label in LABELS)

    @property
    def corpus_max_ts(self) -> int:
        return max(m.corpus_max_ts for m in self.models.values())


_NEG_TABLE_SIZE = 1 << 20


def _negative_table(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(np.float64) ** 0.75
    cum = np.cumsum(weights)
    cum /= cum[-1]
    probes = (np.arange(_NEG_TABLE_SIZE, dtype=np.float64) + 0.5) / _NEG_TABLE_SIZE
    return np.searchsorted(cum, probes).astype(np.int32)


def _encode_corpus(
    sentences: Iterable[Sequence[str]], vocabulary: Vocabulary
) -> tuple[np.ndarray, np.ndarray]:
    ids: list[int] = []
    lengths: list[int] = []
    for sentence in sentences:
        encoded = vocabulary.encode(sentence)
        ids.extend(encoded)
        lengths.append(len(encoded))
    tokens = np.asarray(ids, dtype=np.int32)
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return tokens, offsets


def train_sgns(
    sentences: Sequence[Sequence[str]],
    params: SGNSParams,
    seed: int,
    corpus_max_ts: int = 0,
) -> EmbeddingModel:
    """Train one skip-gram model; deterministic for a fixed seed.

    The first rows of the splitmix64 stream initialize the input vectors
    (uniform in (-0.5/d, 0.5/d]); training consumes the stream from
    there, so both kernel backends see identical window and negative
    draws.

    Raises:
        ConfigurationError: nothing survives min_count pruning.
    """
    if not hasattr(sentences, "__len__"):
        sentences = [list(s) for s in sentences]
    vocabulary = Vocabulary.build(sentences, params.min_count)
    v = len(vocabulary)
    if v == 0:
        raise ConfigurationError(
            f"no tokens survive min_count={params.min_count}; corpus too small"
        )
    d = params.dimension
    uniform = (rng_block(seed, 0, v * d) >> np.uint64(11)).astype(np.float64) * 2.0**-53
    syn0 = ((uniform - 0.5) / d).astype(np.float32).reshape(v, d)
    syn1 = np.zeros((v, d), dtype=np.float32)
    counter = v * d

    tokens, offsets = _encode_corpus(sentences, vocabulary)
    neg_table = _negative_table(vocabulary.counts)
    total_words = int(len(tokens)) * params.epochs
    words_done = 0
    losses: list[float] = []
    for _ in range(params.epochs):
        loss_sum, events, counter, words_done = BACKEND.sgns_epoch(
            tokens,
            offsets,
            syn0,
            syn1,
            neg_table,
            params.window,
            params.negatives,
            params.learning_rate,
            params.learning_rate * 1e-4,
            words_done,
            total_words,
            seed,
            counter,
        )
        losses.append(loss_sum / max(events, 1))
    return EmbeddingModel(vocabulary, syn0, params, seed, tuple(losses), corpus_max_ts)


def _timeline_sort_key(timeline: Timeline):
    return (timeline.t0, timeline.tweets[0].id)


def train_class_models(
    labeled_timelines: Iterable[tuple[Timeline, str]],
    params: SGNSParams,
    seed: int,
) -> ClassModels:
    """One model per label from that label's timelines only.

    Corpus order is normalized (timelines sorted by first tweet) so the
    result does not depend on input order. Each class trains with a seed
    offset by its label index.

    Raises:
        ConfigurationError: some label has no timeline.
    """
    per_class: dict[str, list[Timeline]] = {label: [] for label in LABELS}
    for timeline, label in labeled_timelines:
        if label not in per_class:
            raise ConfigurationError(f"unknown label {label!r}")
        per_class[label].append(timeline)
    models: dict[str, EmbeddingModel] = {}
    for offset, label in enumerate(LABELS):
        timelines = sorted(per_class[label], key=_timeline_sort_key)
        if not timelines:
            raise ConfigurationError(f"no training timelines for class {label!r}")
        sentences = [tokenize(t.text) for tl in timelines for t in tl]
        max_ts = corpus_max_timestamp(timelines)
        models[label] = train_sgns(sentences, params, seed + offset, max_ts)
    return ClassModels(models)


def embed_tokens(tokens: Sequence[str], model: EmbeddingModel) -> np.ndarray:
    """Mean of in-vocabulary token vectors; zero vector when none are."""
    rows = model.vocabulary.encode(tokens)
    if not rows:
        return np.zeros(model.dimension, dtype=np.float64)
    return model.vectors_f64()[rows].mean(axis=0)


def embed_tweet(tweet: Tweet, model: EmbeddingModel) -> np.ndarray:
    return embed_tokens(tokenize(tweet.text), model)


def embed_timeline(timeline: Timeline, model: EmbeddingModel) -> np.ndarray:
    """Mean over tweet vectors (all-OOV tweets contribute zero vectors)."""
    stacked = np.stack([embed_tweet(t, model) for t in timeline.tweets])
    return stacked.mean(axis=0)


_MAGIC = b"RWV1"


def save_model(model: EmbeddingModel, path: str) -> None:
    """Versioned binary format: header, vocabulary table, little-endian
    float32 matrix."""
    p = model.params
    with open(path, "wb") as out:
        out.write(_MAGIC)
        out.write(
            struct.pack(
                "<IQIIIIIdQq",
                1,
                len(model.vocabulary),
                p.dimension,
                p.window,
                p.negatives,
                p.epochs,
                p.min_count,
                p.learning_rate,
                model.seed,
                model.corpus_max_ts,
            )
        )
        for token, count in zip(model.vocabulary.tokens, model.vocabulary.counts):
            raw = token.encode("utf-8")
            out.write(struct.pack("<IQ", len(raw), int(count)))
            out.write(raw)
        matrix = np.ascontiguousarray(model.vectors, dtype="<f4")
        out.write(matrix.tobytes())


def load_model(path: str) -> EmbeddingModel:
    with open(path, "rb") as src:
        if src.read(4) != _MAGIC:
            raise ValueError(f"{path}: not an embedding model file")
        header = struct.unpack("<IQIIIIIdQq", src.read(struct.calcsize("<IQIIIIIdQq")))
        version, v, d, window, negatives, epochs, min_count, lr, seed, max_ts = header
        if version != 1:
            raise ValueError(f"{path}: unsupported model version {version}")
        tokens: list[str] = []
        counts: list[int] = []
        for _ in range(v):
            length, count = struct.unpack("<IQ", src.read(12))
            tokens.append(src.read(length).decode("utf-8"))
            counts.append(count)
        matrix = np.frombuffer(src.read(v * d * 4), dtype="<f4").reshape(v, d).copy()
    params = SGNSParams(
        dimension=d,
        window=window,
        negatives=negatives,
        epochs=epochs,
        learning_rate=lr,
        min_count=min_count,
    )
    return EmbeddingModel(
        Vocabulary(tokens, counts, min_count), matrix, params, seed, (), max_ts
    )


def save_model_text(model: EmbeddingModel, path: str) -> None:
    """Interchange format: one `token v1 .. vd` line per token."""
    with open(path, "w", encoding="utf-8") as out:
        for token, row in zip(model.vocabulary.tokens, model.vectors):
            out.write(token)
            out.write(" ")
            out.write(" ".join(repr(float(x)) for x in row))
            out.write("\n")


def load_model_text(path: str, params: SGNSParams | None = None, seed: int = 0) -> EmbeddingModel:
    tokens: list[str] = []
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as src:
        for line in src:
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                continue
            tokens.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    if not rows:
        raise ValueError(f"{path}: empty model file")
    matrix = np.asarray(rows, dtype=np.float32)
    if params is None:
        params = SGNSParams(dimension=matrix.shape[1], min_count=1)
    vocabulary = Vocabulary(tokens, [params.min_count] * len(tokens), params.min_count)
    return EmbeddingModel(vocabulary, matrix, params, seed)


def corpus_max_timestamp(timelines: Iterable[Timeline]) -> int:
    """Latest tweet timestamp across timelines; 0 for an empty corpus
    (the "unknown" sentinel)."""
    return max((t.timestamp for tl in timelines for t in tl), default=0)
