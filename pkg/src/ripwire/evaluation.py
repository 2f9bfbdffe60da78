"""Experimental protocol: year-based train/test split, ten-fold test
partitioning, macro-averaged F1, and the evaluation grid over feature
sets, time buckets, and window fractions.

Every grid cell trains one classifier on the full training split and
scores it on each test fold separately; reported numbers are fold
means. A leakage guard refuses to train when any training timeline
reaches into the test period.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from ripwire.classifier import TrainConfig, train_classifier
from ripwire.errors import ConfigurationError, LeakageError
from ripwire.features import (
    FEATURE_SETS,
    TIME_BUCKETS_MIN,
    WINDOW_FRACTIONS,
    ReportFeaturizer,
)
from ripwire.labels import LABELS, label_index
from ripwire.reports import DeathReport

__all__ = [
    "ExperimentGrid",
    "YearSplit",
    "Instance",
    "GridResult",
    "split_by_year",
    "tenfold_split",
    "per_class_f1",
    "macro_f1",
    "test_period_start",
    "assert_no_leakage",
    "make_instances",
    "run_grid",
    "write_results_tsv",
    "read_results_tsv",
    "format_feature_table",
    "format_category_table",
    "format_window_table",
    "emit_report",
]

# Published result tables omit the 30 and 180 minute columns even
# though both buckets are computed; the text tables follow suit.
_REPORTED_BUCKETS = (0, 5, 10, 15, 60, 120, 300)

# Category blocks appear hoax-first in the per-category table.
_CATEGORY_ORDER = ("fake", "real", "commemoration")


@dataclass(frozen=True, slots=True)
class ExperimentGrid:
    feature_sets: tuple[str, ...] = FEATURE_SETS
    time_buckets: tuple[int, ...] = TIME_BUCKETS_MIN
    window_fractions: tuple[float, ...] = WINDOW_FRACTIONS
    folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.feature_sets or not self.time_buckets or not self.window_fractions:
            raise ConfigurationError("grid selections must be non-empty")
        for fs in self.feature_sets:
            if fs not in FEATURE_SETS:
                raise ConfigurationError(f"unknown feature set {fs!r}")
        for b in self.time_buckets:
            if b < 0:
                raise ConfigurationError(f"time bucket must be >= 0, got {b}")
        for p in self.window_fractions:
            if not (0.0 < p <= 1.0):
                raise ConfigurationError(f"window fraction must be in (0, 1], got {p}")
        if self.folds < 2:
            raise ConfigurationError("folds must be >= 2")
        # Feature sets keep caller order (it is the table row order);
        # numeric axes sort so cells always run coarse-to-fine.
        object.__setattr__(self, "feature_sets", tuple(dict.fromkeys(self.feature_sets)))
        object.__setattr__(self, "time_buckets", tuple(sorted(set(self.time_buckets))))
        object.__setattr__(
            self, "window_fractions", tuple(sorted(set(self.window_fractions)))
        )


@dataclass(frozen=True, slots=True)
class YearSplit:
    train: tuple[DeathReport, ...]
    test: tuple[DeathReport, ...]
    test_year: int


def split_by_year(
    reports: Sequence[DeathReport], test_year: int | None = None
) -> YearSplit:
    """Reports from years before test_year train, reports from test_year
    test. Defaults to the most recent year present. Reports after a
    configured test_year are dropped."""
    if not reports:
        raise ConfigurationError("no reports to split")
    years = sorted({r.first_day.year for r in reports})
    if test_year is None:
        test_year = years[-1]
    train = tuple(r for r in reports if r.first_day.year < test_year)
    test = tuple(r for r in reports if r.first_day.year == test_year)
    if not train:
        raise ConfigurationError(f"no training reports before year {test_year}")
    if not test:
        raise ConfigurationError(f"no test reports in year {test_year}")
    return YearSplit(train=train, test=test, test_year=test_year)


def tenfold_split(n: int, seed: int, folds: int = 10) -> list[np.ndarray]:
    """Index partition into `folds` disjoint, exhaustive subsets whose
    sizes differ by at most one. Deterministic per seed."""
    if n < folds:
        raise ConfigurationError(f"need at least {folds} instances, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(order, folds)]


def _as_indices(labels: Sequence) -> np.ndarray:
    out = np.empty(len(labels), dtype=np.int64)
    for i, value in enumerate(labels):
        out[i] = value if isinstance(value, (int, np.integer)) else label_index(value)
    if len(out) and (out.min() < 0 or out.max() >= len(LABELS)):
        raise ValueError("class index out of range")
    return out


def per_class_f1(gold: Sequence, pred: Sequence) -> tuple[float, float, float]:
    """F1 per class in canonical label order. A zero denominator in
    precision, recall, or their sum yields 0 for that quantity."""
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predicted")
    g = _as_indices(gold)
    p = _as_indices(pred)
    scores = []
    for k in range(len(LABELS)):
        tp = int(np.sum((g == k) & (p == k)))
        fp = int(np.sum((g != k) & (p == k)))
        fn = int(np.sum((g == k) & (p != k)))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall:
            scores.append(2 * precision * recall / (precision + recall))
        else:
            scores.append(0.0)
    return tuple(scores)


def macro_f1(gold: Sequence, pred: Sequence) -> float:
    """Unweighted mean of the three per-class F1 scores."""
    scores = per_class_f1(gold, pred)
    return sum(scores) / len(scores)


def test_period_start(test_year: int) -> int:
    """Unix timestamp of the first instant of the test year, UTC."""
    return int(datetime(test_year, 1, 1, tzinfo=timezone.utc).timestamp())


def assert_no_leakage(
    training_max_timestamp: int, test_year: int, what: str = "training data"
) -> None:
    start = test_period_start(test_year)
    if training_max_timestamp >= start:
        raise LeakageError(
            f"{what} contains a tweet at timestamp {training_max_timestamp}, "
            f"inside the test period starting {start} (year {test_year})"
        )


@dataclass(frozen=True, slots=True)
class Instance:
    report_id: str
    label: str
    featurizer: ReportFeaturizer


def make_instances(
    reports: Iterable[DeathReport],
    model=None,
    class_models=None,
) -> list[Instance]:
    """Wrap labeled reports for grid evaluation. Unlabeled reports are a
    configuration error: the grid needs gold labels on both splits."""
    instances = []
    for report in reports:
        if report.label is None:
            raise ConfigurationError(f"report {report.report_id} has no label")
        instances.append(
            Instance(
                report_id=report.report_id,
                label=report.label,
                featurizer=ReportFeaturizer(report.timeline, model, class_models),
            )
        )
    return instances


@dataclass(frozen=True, slots=True)
class GridResult:
    """One grid cell: per-fold scores plus their means."""

    feature_set: str
    bucket_min: int
    fraction: float
    fold_macro_f1: tuple[float, ...]
    fold_class_f1: tuple[tuple[float, float, float], ...]

    @property
    def macro_f1(self) -> float:
        return sum(self.fold_macro_f1) / len(self.fold_macro_f1)

    @property
    def class_f1(self) -> tuple[float, float, float]:
        folds = len(self.fold_class_f1)
        return tuple(
            sum(fold[k] for fold in self.fold_class_f1) / folds
            for k in range(len(LABELS))
        )


def run_grid(
    grid: ExperimentGrid,
    train_instances: Sequence[Instance],
    test_instances: Sequence[Instance],
    train_config: TrainConfig = TrainConfig(),
    test_year: int | None = None,
) -> list[GridResult]:
    """Evaluate every (feature set, bucket, fraction) cell.

    Each cell trains on the full training split and reports per-fold
    scores over the ten-fold partition of the test split. When a test
    year is given, training timelines are checked against its start
    before anything is fitted.
    """
    if not train_instances or not test_instances:
        raise ConfigurationError("both splits must be non-empty")
    first = train_instances[0].featurizer
    for fs in grid.feature_sets:
        if not first.supports(fs):
            raise ConfigurationError(
                f"feature set {fs!r} requested but no embedding model was provided"
            )
    if test_year is not None:
        for inst in train_instances:
            assert_no_leakage(inst.featurizer.ts[-1], test_year)
        models_ts = max(
            (i.featurizer.models_max_ts for i in (*train_instances, *test_instances)),
            default=0,
        )
        if models_ts:
            assert_no_leakage(models_ts, test_year, "an embedding training corpus")

    test_sorted = sorted(test_instances, key=lambda i: i.report_id)
    folds = tenfold_split(len(test_sorted), grid.seed, grid.folds)
    y_train = _as_indices([i.label for i in train_instances])
    y_test = _as_indices([i.label for i in test_sorted])

    results = []
    for fs in grid.feature_sets:
        for fraction in grid.window_fractions:
            for bucket in grid.time_buckets:
                t = bucket * 60.0
                x_train = np.stack(
                    [i.featurizer.features(fs, t, fraction) for i in train_instances]
                )
                model = train_classifier(x_train, y_train, train_config)
                x_test = np.stack(
                    [i.featurizer.features(fs, t, fraction) for i in test_sorted]
                )
                pred = model.predict(x_test)
                fold_macro = []
                fold_class = []
                for idx in folds:
                    scores = per_class_f1(y_test[idx], pred[idx])
                    fold_class.append(scores)
                    fold_macro.append(sum(scores) / len(scores))
                results.append(
                    GridResult(
                        feature_set=fs,
                        bucket_min=bucket,
                        fraction=fraction,
                        fold_macro_f1=tuple(fold_macro),
                        fold_class_f1=tuple(fold_class),
                    )
                )
    return results


def write_results_tsv(destination: IO[str] | str, results: Sequence[GridResult]) -> None:
    """One row per (cell, fold) with per-class and macro F1. Floats use
    repr so reading the file back reproduces the results exactly."""
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as handle:
            write_results_tsv(handle, results)
        return
    header = ["feature_set", "bucket_min", "fraction", "fold"]
    header += [f"f1_{label}" for label in LABELS]
    header.append("macro_f1")
    destination.write("\t".join(header) + "\n")
    for cell in results:
        for fold, (scores, macro) in enumerate(
            zip(cell.fold_class_f1, cell.fold_macro_f1)
        ):
            row = [cell.feature_set, str(cell.bucket_min), repr(cell.fraction), str(fold)]
            row += [repr(s) for s in scores]
            row.append(repr(macro))
            destination.write("\t".join(row) + "\n")


def read_results_tsv(source: IO[str] | str) -> list[GridResult]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as handle:
            return read_results_tsv(handle)
    source.readline()
    cells: dict[tuple[str, int, float], tuple[list, list]] = {}
    for line in source:
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 8:
            continue
        key = (parts[0], int(parts[1]), float(parts[2]))
        macro_list, class_list = cells.setdefault(key, ([], []))
        class_list.append(tuple(float(x) for x in parts[4:7]))
        macro_list.append(float(parts[7]))
    return [
        GridResult(
            feature_set=fs,
            bucket_min=bucket,
            fraction=fraction,
            fold_macro_f1=tuple(macro_list),
            fold_class_f1=tuple(class_list),
        )
        for (fs, bucket, fraction), (macro_list, class_list) in cells.items()
    ]


def _format_value(value: float) -> str:
    text = f"{value:.3f}"
    return text[1:] if text.startswith("0.") else text


def _table_buckets(results: Sequence[GridResult]) -> list[int]:
    present = sorted({r.bucket_min for r in results})
    reported = [b for b in present if b in _REPORTED_BUCKETS]
    return reported if reported else present


def _render_table(
    row_labels: Sequence[str],
    columns: Sequence[int],
    values: Mapping[tuple[str, int], float],
) -> str:
    """Aligned text table; every cell matching its column's maximum at
    three decimals is marked with asterisks."""
    maxima = {}
    for col in columns:
        col_values = [
            round(values[label, col], 3)
            for label in row_labels
            if (label, col) in values
        ]
        if col_values:
            maxima[col] = max(col_values)
    grid_rows = []
    for label in row_labels:
        row = [label]
        for col in columns:
            if (label, col) not in values:
                row.append("-")
                continue
            value = values[label, col]
            text = _format_value(value)
            if round(value, 3) == maxima[col]:
                text = f"*{text}*"
            row.append(text)
        grid_rows.append(row)
    header = [""] + [f"{col}'" for col in columns]
    widths = [
        max(len(row[i]) for row in [header] + grid_rows)
        for i in range(len(header))
    ]
    lines = []
    for row in [header] + grid_rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(widths[i + 1]) for i, cell in enumerate(row[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def format_feature_table(results: Sequence[GridResult]) -> str:
    """Macro-F1 by feature set and bucket at fraction 1.0."""
    full = [r for r in results if r.fraction == 1.0]
    columns = _table_buckets(full)
    present_sets = [fs for fs in FEATURE_SETS if any(r.feature_set == fs for r in full)]
    values = {(r.feature_set, r.bucket_min): r.macro_f1 for r in full}
    return _render_table(present_sets, columns, values)


def format_category_table(results: Sequence[GridResult]) -> str:
    """Per-class F1 by feature set and bucket at fraction 1.0, one block
    per category, hoaxes first."""
    full = [r for r in results if r.fraction == 1.0]
    columns = _table_buckets(full)
    present_sets = [fs for fs in FEATURE_SETS if any(r.feature_set == fs for r in full)]
    blocks = []
    for category in _CATEGORY_ORDER:
        k = label_index(category)
        values = {(r.feature_set, r.bucket_min): r.class_f1[k] for r in full}
        blocks.append(
            f"[{category}]\n" + _render_table(present_sets, columns, values)
        )
    return "\n".join(blocks)


def format_window_table(
    results: Sequence[GridResult], feature_set: str = "social+multiw2v"
) -> str:
    """Macro-F1 by window fraction and bucket for one feature set."""
    if feature_set not in FEATURE_SETS:
        raise ConfigurationError(
            f"unknown feature set {feature_set!r}; choose from {', '.join(FEATURE_SETS)}"
        )
    rows = [r for r in results if r.feature_set == feature_set]
    columns = _table_buckets(rows)
    fractions = sorted({r.fraction for r in rows})
    labels = [repr(p) for p in fractions]
    values = {
        (repr(r.fraction), r.bucket_min): r.macro_f1
        for r in rows
    }
    return _render_table(labels, columns, values)


def emit_report(
    results: Sequence[GridResult],
    tsv_path: str,
    tables_path: str,
    window_feature_set: str = "social+multiw2v",
) -> None:
    """Write the machine-readable TSV and the three aligned text tables."""
    write_results_tsv(tsv_path, results)
    sections = [
        "Macro-F1 by feature set (full window)",
        format_feature_table(results),
        "Per-class F1 by feature set (full window)",
        format_category_table(results),
        f"Macro-F1 by window fraction ({window_feature_set})",
        format_window_table(results, window_feature_set),
    ]
    with open(tables_path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(sections))
