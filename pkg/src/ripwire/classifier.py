"""Multinomial logistic regression trained by full-batch gradient
descent with a backtracking line search.

Small feature counts and a few thousand instances make full-batch
optimization with an exact objective both fast and reproducible: no
minibatch shuffling, no learning-rate schedule, and the fitted weights
are a deterministic function of the data.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ripwire.errors import ConfigurationError
from ripwire.labels import LABELS

__all__ = [
    "softmax",
    "loss_and_gradient",
    "Standardizer",
    "LogisticModel",
    "TrainConfig",
    "train_classifier",
    "ClassifierBundle",
    "save_classifier",
    "load_classifier",
    "save_classifier_text",
]

# Standard-deviation floor: constant columns standardize to zero instead
# of dividing by zero.
_STD_FLOOR = 1e-12


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shifted by the row max for stability. Each row
    of the result sums to 1 within 1e-12."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def loss_and_gradient(
    weights: np.ndarray,
    biases: np.ndarray,
    x: np.ndarray,
    y_onehot: np.ndarray,
    l2: float,
    sample_weights: np.ndarray | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy plus (l2/2)*||W||^2 and its exact gradient.

    Biases are not regularized. sample_weights, when given, must be
    normalized to mean 1 so the loss scale stays comparable.
    """
    n = x.shape[0]
    probs = softmax(x @ weights + biases)
    logp = np.log(np.clip(probs, 1e-300, None))
    per_row = -(y_onehot * logp).sum(axis=1)
    if sample_weights is not None:
        per_row = per_row * sample_weights
    loss = per_row.mean() + 0.5 * l2 * float((weights * weights).sum())
    delta = probs - y_onehot
    if sample_weights is not None:
        delta = delta * sample_weights[:, None]
    grad_w = x.T @ delta / n + l2 * weights
    grad_b = delta.sum(axis=0) / n
    return float(loss), grad_w, grad_b


@dataclass(frozen=True, slots=True)
class Standardizer:
    """Per-column z-scoring with statistics frozen at fit time."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardizer":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        scale = np.where(std < _STD_FLOOR, 1.0, std)
        return cls(mean=mean, scale=scale)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.scale


@dataclass(frozen=True, slots=True)
class TrainConfig:
    l2: float | None = None  # None means 1/N
    max_epochs: int = 1000
    tolerance: float = 1e-6
    standardize: bool = True
    class_weights: bool = False

    def __post_init__(self):
        if self.l2 is not None and self.l2 < 0:
            raise ConfigurationError(f"l2 must be >= 0, got {self.l2}")
        if self.max_epochs < 1:
            raise ConfigurationError("max_epochs must be >= 1")
        if self.tolerance <= 0:
            raise ConfigurationError("tolerance must be > 0")


@dataclass(frozen=True, slots=True)
class LogisticModel:
    """Fitted weights plus the frozen standardizer. Columns of weights
    follow the canonical label order, so argmax tie-breaking prefers the
    earlier label."""

    weights: np.ndarray
    biases: np.ndarray
    standardizer: Standardizer | None
    loss_history: tuple[float, ...] = field(repr=False, default=())

    def decision_scores(self, x: np.ndarray) -> np.ndarray:
        if self.standardizer is not None:
            x = self.standardizer.transform(x)
        return x @ self.weights + self.biases

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.decision_scores(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Class indices; argmax takes the first maximum, so exact ties
        resolve to the earliest label in canonical order."""
        return np.argmax(self.decision_scores(x), axis=1)

    def predict_labels(self, x: np.ndarray) -> list[str]:
        return [LABELS[i] for i in self.predict(x)]


def train_classifier(
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig = TrainConfig(),
) -> LogisticModel:
    """Fit the three-class model on (x, y) with y as class indices.

    Descends the exact full-batch gradient; each step's length comes
    from Armijo backtracking, so no learning rate is exposed. Stops when
    the loss improvement falls below tolerance or the gradient norm
    vanishes.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2:
        raise ConfigurationError(f"x must be 2-D, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise ConfigurationError(
            f"y shape {y.shape} does not match {x.shape[0]} instances"
        )
    if x.shape[0] == 0:
        raise ConfigurationError("cannot train on an empty matrix")
    if y.min() < 0 or y.max() >= len(LABELS):
        raise ConfigurationError("class indices out of range")

    n, d = x.shape
    k = len(LABELS)
    standardizer = None
    if config.standardize:
        standardizer = Standardizer.fit(x)
        x = standardizer.transform(x)
    y_onehot = np.zeros((n, k), dtype=np.float64)
    y_onehot[np.arange(n), y] = 1.0

    sample_weights = None
    if config.class_weights:
        counts = y_onehot.sum(axis=0)
        # Inverse-frequency weights normalized to mean 1 over instances.
        per_class = np.where(counts > 0, n / (k * np.maximum(counts, 1.0)), 0.0)
        sample_weights = per_class[y]
        sample_weights = sample_weights / sample_weights.mean()

    l2 = config.l2 if config.l2 is not None else 1.0 / n
    weights = np.zeros((d, k), dtype=np.float64)
    biases = np.zeros(k, dtype=np.float64)

    loss, grad_w, grad_b = loss_and_gradient(
        weights, biases, x, y_onehot, l2, sample_weights
    )
    history = [loss]
    step = 1.0
    for _ in range(config.max_epochs):
        grad_sq = float((grad_w * grad_w).sum() + (grad_b * grad_b).sum())
        if grad_sq == 0.0:
            break
        # Armijo backtracking from a step that adapts across iterations:
        # start slightly above the last accepted step so the search can
        # grow as curvature flattens.
        step = min(step * 2.0, 1e6)
        accepted = False
        for _ in range(60):
            new_w = weights - step * grad_w
            new_b = biases - step * grad_b
            new_loss, new_gw, new_gb = loss_and_gradient(
                new_w, new_b, x, y_onehot, l2, sample_weights
            )
            if new_loss <= loss - 1e-4 * step * grad_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = loss - new_loss
        weights, biases = new_w, new_b
        loss, grad_w, grad_b = new_loss, new_gw, new_gb
        history.append(loss)
        if improvement < config.tolerance:
            break

    return LogisticModel(
        weights=weights,
        biases=biases,
        standardizer=standardizer,
        loss_history=tuple(history),
    )


@dataclass(frozen=True, slots=True)
class ClassifierBundle:
    """A fitted model plus the schema it was trained against."""

    model: LogisticModel
    feature_names: tuple[str, ...]
    meta: dict[str, str]


_MAGIC = b"RWC1"


def _write_str(out, text: str) -> None:
    raw = text.encode("utf-8")
    out.write(struct.pack("<I", len(raw)))
    out.write(raw)


def _read_str(src) -> str:
    (length,) = struct.unpack("<I", src.read(4))
    return src.read(length).decode("utf-8")


def save_classifier(
    model: LogisticModel,
    path: str,
    feature_names: tuple[str, ...] = (),
    meta: dict[str, str] | None = None,
) -> None:
    """Versioned binary bundle: schema, standardizer, weights.

    Raises:
        ConfigurationError: feature_names given but their count does not
            match the weight matrix.
    """
    d, k = model.weights.shape
    if feature_names and len(feature_names) != d:
        raise ConfigurationError(
            f"{len(feature_names)} feature names for {d} weight rows"
        )
    meta = dict(meta or {})
    flags = 1 if model.standardizer is not None else 0
    with open(path, "wb") as out:
        out.write(_MAGIC)
        out.write(struct.pack("<IIII", 1, d, k, flags))
        out.write(struct.pack("<I", len(meta)))
        for key in sorted(meta):
            _write_str(out, key)
            _write_str(out, meta[key])
        for label in LABELS:
            _write_str(out, label)
        out.write(struct.pack("<I", len(feature_names)))
        for name in feature_names:
            _write_str(out, name)
        if model.standardizer is not None:
            out.write(np.ascontiguousarray(model.standardizer.mean, "<f8").tobytes())
            out.write(np.ascontiguousarray(model.standardizer.scale, "<f8").tobytes())
        out.write(np.ascontiguousarray(model.weights, "<f8").tobytes())
        out.write(np.ascontiguousarray(model.biases, "<f8").tobytes())
        out.write(struct.pack("<Q", len(model.loss_history)))
        out.write(np.asarray(model.loss_history, "<f8").tobytes())


def load_classifier(path: str) -> ClassifierBundle:
    with open(path, "rb") as src:
        if src.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a classifier file")
        version, d, k, flags = struct.unpack("<IIII", src.read(16))
        if version != 1:
            raise ValueError(f"{path}: unsupported classifier version {version}")
        (n_meta,) = struct.unpack("<I", src.read(4))
        meta = {}
        for _ in range(n_meta):
            key = _read_str(src)
            meta[key] = _read_str(src)
        labels = tuple(_read_str(src) for _ in range(k))
        if labels != LABELS:
            raise ValueError(f"{path}: label order {labels} does not match {LABELS}")
        (n_names,) = struct.unpack("<I", src.read(4))
        feature_names = tuple(_read_str(src) for _ in range(n_names))
        standardizer = None
        if flags & 1:
            mean = np.frombuffer(src.read(d * 8), dtype="<f8").copy()
            scale = np.frombuffer(src.read(d * 8), dtype="<f8").copy()
            standardizer = Standardizer(mean=mean, scale=scale)
        weights = np.frombuffer(src.read(d * k * 8), dtype="<f8").reshape(d, k).copy()
        biases = np.frombuffer(src.read(k * 8), dtype="<f8").copy()
        (n_loss,) = struct.unpack("<Q", src.read(8))
        losses = tuple(np.frombuffer(src.read(n_loss * 8), dtype="<f8").tolist())
    model = LogisticModel(
        weights=weights,
        biases=biases,
        standardizer=standardizer,
        loss_history=losses,
    )
    return ClassifierBundle(model=model, feature_names=feature_names, meta=meta)


def save_classifier_text(
    model: LogisticModel,
    path: str,
    feature_names: tuple[str, ...] = (),
) -> None:
    """Readable weight dump, one feature per row."""
    d, _ = model.weights.shape
    names = feature_names if feature_names else tuple(f"x{i}" for i in range(d))
    if len(names) != d:
        raise ConfigurationError(f"{len(names)} feature names for {d} weight rows")
    with open(path, "w", encoding="utf-8") as out:
        out.write("feature\tmean\tscale\t" + "\t".join(f"w_{c}" for c in LABELS) + "\n")
        for i, name in enumerate(names):
            if model.standardizer is not None:
                mean = repr(float(model.standardizer.mean[i]))
                scale = repr(float(model.standardizer.scale[i]))
            else:
                mean, scale = "-", "-"
            row = "\t".join(repr(float(w)) for w in model.weights[i])
            out.write(f"{name}\t{mean}\t{scale}\t{row}\n")
        bias_row = "\t".join(repr(float(b)) for b in model.biases)
        out.write(f"(bias)\t-\t-\t{bias_row}\n")
