"""Softmax regression numerics, training behavior, and persistence."""
import numpy as np
import pytest

from ripwire.classifier import (
    LogisticModel,
    Standardizer,
    TrainConfig,
    load_classifier,
    loss_and_gradient,
    save_classifier,
    save_classifier_text,
    softmax,
    train_classifier,
)
from ripwire.errors import ConfigurationError
from ripwire.labels import LABELS

from oracles import numeric_gradient

K = len(LABELS)


def random_problem(rng, n, d, weighted=False):
    x = rng.normal(size=(n, d))
    y = rng.integers(0, K, size=n)
    y_onehot = np.zeros((n, K))
    y_onehot[np.arange(n), y] = 1.0
    weights = rng.normal(scale=0.5, size=(d, K))
    biases = rng.normal(scale=0.5, size=K)
    sample_weights = None
    if weighted:
        sample_weights = rng.uniform(0.2, 3.0, size=n)
        sample_weights /= sample_weights.mean()
    return x, y_onehot, weights, biases, sample_weights


def test_softmax_rows_sum_to_one():
    rng = np.random.default_rng(0)
    logits = rng.normal(scale=5.0, size=(64, K))
    probs = softmax(logits)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, rtol=0, atol=1e-12)
    assert (probs > 0).all()


def test_softmax_is_stable_for_large_logits():
    probs = softmax(np.array([[1e4, 0.0, -1e4]]))
    assert np.isfinite(probs).all()
    assert probs[0, 0] == pytest.approx(1.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    worst = 0.0
    for trial in range(100):
        n = int(rng.integers(2, 12))
        d = int(rng.integers(1, 6))
        l2 = float(rng.choice([0.0, 0.01, 0.5]))
        weighted = bool(rng.integers(0, 2))
        x, y_onehot, weights, biases, sw = random_problem(rng, n, d, weighted)

        def loss_fn(w, b):
            return loss_and_gradient(w, b, x, y_onehot, l2, sw)[0]

        _, grad_w, grad_b = loss_and_gradient(weights, biases, x, y_onehot, l2, sw)
        num_w, num_b = numeric_gradient(loss_fn, weights, biases)
        scale = max(np.abs(num_w).max(), np.abs(num_b).max(), 1e-8)
        err = max(np.abs(grad_w - num_w).max(), np.abs(grad_b - num_b).max()) / scale
        worst = max(worst, err)
    assert worst < 1e-5


def test_l2_penalizes_weights_not_biases():
    x = np.array([[1.0, 0.0], [0.0, 1.0]])
    y_onehot = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    weights = np.ones((2, K))
    biases = np.ones(K)
    loss0, _, _ = loss_and_gradient(weights, biases, x, y_onehot, 0.0)
    loss1, _, _ = loss_and_gradient(weights, biases, x, y_onehot, 2.0)
    assert loss1 == pytest.approx(loss0 + 0.5 * 2.0 * float((weights ** 2).sum()))


def test_standardizer_fits_and_floors_constant_columns():
    x = np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])
    std = Standardizer.fit(x)
    transformed = std.transform(x)
    np.testing.assert_allclose(transformed.mean(axis=0), 0.0, atol=1e-12)
    # A constant column keeps scale 1 so it maps to exactly zero.
    np.testing.assert_array_equal(transformed[:, 1], np.zeros(3))
    assert std.scale[1] == 1.0


def blobs(rng, n_per_class=60, spread=0.25):
    centers = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
    xs, ys = [], []
    for cls, center in enumerate(centers):
        xs.append(center + rng.normal(scale=spread, size=(n_per_class, 2)))
        ys.append(np.full(n_per_class, cls))
    return np.concatenate(xs), np.concatenate(ys)


def test_separable_blobs_reach_high_accuracy():
    rng = np.random.default_rng(1)
    x, y = blobs(rng)
    model = train_classifier(x, y)
    accuracy = (model.predict(x) == y).mean()
    assert accuracy >= 0.99


def test_loss_history_strictly_improves():
    rng = np.random.default_rng(2)
    x, y = blobs(rng)
    model = train_classifier(x, y, TrainConfig(max_epochs=50))
    history = model.loss_history
    assert len(history) >= 2
    assert all(b < a for a, b in zip(history, history[1:]))


def test_training_is_deterministic():
    rng = np.random.default_rng(3)
    x, y = blobs(rng)
    first = train_classifier(x, y)
    second = train_classifier(x, y)
    np.testing.assert_array_equal(first.weights, second.weights)
    np.testing.assert_array_equal(first.biases, second.biases)


def test_prediction_tie_breaks_on_first_class():
    model = LogisticModel(
        weights=np.zeros((2, K)),
        biases=np.zeros(K),
        standardizer=None,
        loss_history=(0.0,),
    )
    # All-zero scores tie every class; argmax must take the first.
    assert model.predict(np.zeros((3, 2))).tolist() == [0, 0, 0]
    assert model.predict_labels(np.zeros((1, 2))) == [LABELS[0]]


def test_class_weights_shift_the_boundary_toward_minority():
    rng = np.random.default_rng(4)
    # 5:1 imbalance between class 0 and class 1 with overlap; class 2 far away.
    x0 = rng.normal(loc=0.0, scale=1.0, size=(250, 1))
    x1 = rng.normal(loc=1.5, scale=1.0, size=(50, 1))
    x2 = rng.normal(loc=8.0, scale=0.5, size=(150, 1))
    x = np.concatenate([x0, x1, x2])
    y = np.concatenate([np.zeros(250), np.ones(50), np.full(150, 2)]).astype(int)
    plain = train_classifier(x, y)
    weighted = train_classifier(x, y, TrainConfig(class_weights=True))
    minority = (y == 1)
    plain_recall = (plain.predict(x)[minority] == 1).mean()
    weighted_recall = (weighted.predict(x)[minority] == 1).mean()
    assert weighted_recall > plain_recall


def test_train_classifier_validates_inputs():
    with pytest.raises(ConfigurationError):
        train_classifier(np.zeros((0, 2)), np.zeros(0, dtype=int))
    with pytest.raises(ConfigurationError):
        train_classifier(np.zeros((4, 2)), np.array([0, 1, 2, 9]))
    with pytest.raises(ConfigurationError):
        train_classifier(np.zeros((4, 2)), np.zeros(3, dtype=int))
    with pytest.raises(ConfigurationError):
        TrainConfig(l2=-1.0)


def test_bundle_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    x, y = blobs(rng)
    model = train_classifier(x, y)
    path = tmp_path / "classifier.bin"
    names = ("f0", "f1")
    save_classifier(model, path, feature_names=names, meta={"bucket_min": "15"})
    bundle = load_classifier(path)
    np.testing.assert_array_equal(bundle.model.weights, model.weights)
    np.testing.assert_array_equal(bundle.model.biases, model.biases)
    np.testing.assert_array_equal(
        bundle.model.standardizer.mean, model.standardizer.mean
    )
    np.testing.assert_array_equal(
        bundle.model.standardizer.scale, model.standardizer.scale
    )
    assert bundle.model.loss_history == model.loss_history
    assert bundle.feature_names == names
    assert bundle.meta == {"bucket_min": "15"}
    np.testing.assert_array_equal(bundle.model.predict(x), model.predict(x))


def test_bundle_without_standardizer(tmp_path):
    rng = np.random.default_rng(6)
    x, y = blobs(rng)
    model = train_classifier(x, y, TrainConfig(standardize=False))
    path = tmp_path / "raw.bin"
    save_classifier(model, path)
    bundle = load_classifier(path)
    assert bundle.model.standardizer is None
    np.testing.assert_array_equal(bundle.model.predict(x), model.predict(x))


def test_save_classifier_validates_feature_names(tmp_path):
    rng = np.random.default_rng(7)
    x, y = blobs(rng)
    model = train_classifier(x, y)
    with pytest.raises(ConfigurationError, match="feature name"):
        save_classifier(model, tmp_path / "x.bin", feature_names=("only_one",))


def test_load_classifier_rejects_foreign_files(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"JUNK" + b"\x00" * 32)
    with pytest.raises(ValueError):
        load_classifier(path)


def test_text_export_lists_every_feature(tmp_path):
    rng = np.random.default_rng(8)
    x, y = blobs(rng)
    model = train_classifier(x, y)
    path = tmp_path / "classifier.txt"
    save_classifier_text(model, path, feature_names=("f0", "f1"))
    lines = path.read_text().splitlines()
    assert lines[0].split("\t")[0] == "feature"
    body = [line.split("\t")[0] for line in lines[1:]]
    assert body == ["f0", "f1", "(bias)"]
