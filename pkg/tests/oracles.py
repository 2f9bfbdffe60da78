"""Independent reference implementations used to check the package.

Everything here is deliberately written with different algorithms and
data structures than the code under test: dictionary scans instead of
tries, finite differences instead of analytic gradients, counting
instead of vectorized confusion matrices.
"""

from __future__ import annotations

import math
import unicodedata

import numpy as np


def _letterlike(ch: str) -> bool:
    # Mirrors the regex word-minus-digit-minus-underscore class: any
    # alphanumeric codepoint that is not a decimal digit.
    return ch.isalnum() and not ch.isdecimal()


def rip_spans_by_scan(text: str) -> list[tuple[int, int]]:
    """Every standalone uppercase RIP occurrence, by character scanning."""
    spans = []
    start = 0
    while True:
        i = text.find("RIP", start)
        if i < 0:
            return spans
        before_ok = i == 0 or not _letterlike(text[i - 1])
        after_ok = i + 3 >= len(text) or not _letterlike(text[i + 3])
        if before_ok and after_ok:
            spans.append((i, i + 3))
        start = i + 1


def has_rip_by_scan(text: str) -> bool:
    return bool(rip_spans_by_scan(text))


def normalize_by_hand(text: str, strip_diacritics: bool = True) -> str:
    if strip_diacritics:
        decomposed = unicodedata.normalize("NFKD", text)
        text = "".join(c for c in decomposed if not unicodedata.combining(c))
    return " ".join(text.casefold().split())


def match_by_prefix_dict(
    text: str,
    patterns: dict[str, frozenset[str]],
    strip_diacritics: bool = True,
) -> frozenset[str]:
    """Anchored longest-match lookup without a trie.

    For each RIP token, the normalized remainder is probed against the
    pattern dictionary from the longest candidate length down; the first
    hit that ends on a word boundary wins.
    """
    if not patterns:
        return frozenset()
    lengths = sorted({len(p) for p in patterns}, reverse=True)
    ids: set[str] = set()
    for _, end in rip_spans_by_scan(text):
        norm = normalize_by_hand(text[end:], strip_diacritics)
        i = 0
        while i < len(norm) and not norm[i].isalnum():
            i += 1
        suffix = norm[i:]
        for length in lengths:
            if length > len(suffix):
                continue
            if length < len(suffix) and suffix[length].isalnum():
                continue
            candidate = suffix[:length]
            if candidate in patterns:
                ids.update(patterns[candidate])
                break
    return frozenset(ids)


def numeric_gradient(loss_fn, weights: np.ndarray, biases: np.ndarray, eps: float = 1e-6):
    """Central finite differences of a scalar loss in every coordinate."""
    grad_w = np.zeros_like(weights)
    grad_b = np.zeros_like(biases)
    for idx in np.ndindex(weights.shape):
        bumped = weights.copy()
        bumped[idx] += eps
        hi = loss_fn(bumped, biases)
        bumped[idx] -= 2 * eps
        lo = loss_fn(bumped, biases)
        grad_w[idx] = (hi - lo) / (2 * eps)
    for idx in np.ndindex(biases.shape):
        bumped = biases.copy()
        bumped[idx] += eps
        hi = loss_fn(weights, bumped)
        bumped[idx] -= 2 * eps
        lo = loss_fn(weights, bumped)
        grad_b[idx] = (hi - lo) / (2 * eps)
    return grad_w, grad_b


def f1_from_confusion(confusion: dict[tuple[str, str], int], labels: tuple[str, ...]):
    """Per-class F1 from a {(gold, predicted): count} table, by counting."""
    scores = []
    for label in labels:
        tp = confusion.get((label, label), 0)
        fp = sum(
            n for (g, p), n in confusion.items() if p == label and g != label
        )
        fn = sum(
            n for (g, p), n in confusion.items() if g == label and p != label
        )
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall:
            scores.append(2 * precision * recall / (precision + recall))
        else:
            scores.append(0.0)
    return scores


def macro_f1_from_confusion(confusion, labels):
    scores = f1_from_confusion(confusion, labels)
    return sum(scores) / len(scores)


class NaiveBayesText:
    """Multinomial naive Bayes over token counts with Laplace smoothing.

    A deliberately simple learner: if it can classify a corpus well, the
    corpus carries honest lexical signal.
    """

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha
        self.class_log_prior: dict[str, float] = {}
        self.token_log_prob: dict[str, dict[str, float]] = {}
        self.vocabulary: set[str] = set()

    def fit(self, documents: list[list[str]], labels: list[str]) -> "NaiveBayesText":
        for doc in documents:
            self.vocabulary.update(doc)
        classes = sorted(set(labels))
        total = len(labels)
        v = len(self.vocabulary)
        for cls in classes:
            docs = [d for d, l in zip(documents, labels) if l == cls]
            self.class_log_prior[cls] = math.log(len(docs) / total)
            counts: dict[str, int] = {}
            size = 0
            for doc in docs:
                for token in doc:
                    counts[token] = counts.get(token, 0) + 1
                    size += 1
            denom = size + self.alpha * v
            self.token_log_prob[cls] = {
                token: math.log((counts.get(token, 0) + self.alpha) / denom)
                for token in self.vocabulary
            }
        return self

    def predict_one(self, doc: list[str]) -> str:
        best, best_score = None, -math.inf
        for cls, prior in sorted(self.class_log_prior.items()):
            score = prior
            table = self.token_log_prob[cls]
            for token in doc:
                if token in table:
                    score += table[token]
            if score > best_score:
                best, best_score = cls, score
        return best

    def predict(self, documents: list[list[str]]) -> list[str]:
        return [self.predict_one(d) for d in documents]
