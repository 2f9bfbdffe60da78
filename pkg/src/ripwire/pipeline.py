"""Stage runner gluing the toolkit into one reproducible workflow.

Stages and the artifacts they produce, all under a working directory:

    synth            tweets.jsonl, kb.jsonl, labels.tsv
    ingest           filtered.jsonl        (keyword-filtered stream)
    link             matches.tsv           (tweet_id -> person_id pairs)
    build-reports    store/                (report store + gold labels)
    train-embeddings models/               (one shared + three per-class)
    featurize        features.tsv
    train            classifier.bin, classifier.txt
    evaluate         results/              (results.tsv + tables.txt)
    annotate-serve   none (serves the store over HTTP)

Every artifact is written through a temp path and renamed, and carries a
`.prov` sidecar with the stage name, seed, config hash, and input
hashes, so a rerun with the same config reproduces identical bytes.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
import os
import shutil
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from ripwire.annotation.store import AnnotationRecord, ReportStore
from ripwire.classifier import TrainConfig, save_classifier, save_classifier_text, train_classifier
from ripwire.corpus.records import Timeline, keep_uppercase_rip, read_tweets, write_tweets
from ripwire.corpus.synth import SynthSpec, generate_synthetic_corpus, read_labels, write_corpus_files
from ripwire.embeddings import (
    ClassModels,
    SGNSParams,
    load_model,
    save_model,
    tokenize,
    train_class_models,
    train_sgns,
)
from ripwire.errors import ConfigurationError
from ripwire.evaluation import (
    ExperimentGrid,
    emit_report,
    make_instances,
    run_grid,
    split_by_year,
    test_period_start,
)
from ripwire.features import FEATURE_SETS, TIME_BUCKETS_MIN, WINDOW_FRACTIONS, ReportFeaturizer
from ripwire.features import read_feature_matrix, write_feature_matrix
from ripwire.kb import build_name_index, match_stream, read_person_entries
from ripwire.labels import LABELS, label_index
from ripwire.reports import DeathReport, build_reports

__all__ = [
    "STAGES",
    "MissingArtifactError",
    "PipelineConfig",
    "parse_config_file",
    "parse_config_text",
    "run_stage",
]


class MissingArtifactError(RuntimeError):
    """An upstream artifact is absent; the message names the stage."""


_DEFAULTS: dict[str, str] = {
    "workdir": ".",
    "seed": "20120401",
    "paths.corpus": "tweets.jsonl",
    "paths.kb": "kb.jsonl",
    "paths.labels": "labels.tsv",
    "paths.filtered": "filtered.jsonl",
    "paths.matches": "matches.tsv",
    "paths.store": "store",
    "paths.models": "models",
    "paths.features": "features.tsv",
    "paths.classifier": "classifier.bin",
    "paths.results": "results",
    "threshold.mentions": "50",
    "threshold.min_count": "5",
    "embedding.dimension": "100",
    "embedding.window": "5",
    "embedding.negatives": "5",
    "embedding.epochs": "5",
    "embedding.learning_rate": "0.025",
    "classifier.l2": "",
    "classifier.max_epochs": "1000",
    "classifier.tolerance": "1e-6",
    "classifier.standardize": "true",
    "classifier.class_weights": "false",
    "grid.feature_sets": ",".join(FEATURE_SETS),
    "grid.buckets": ",".join(str(b) for b in TIME_BUCKETS_MIN),
    "grid.fractions": ",".join(repr(p) for p in WINDOW_FRACTIONS),
    "grid.folds": "10",
    "grid.test_year": "",
    "featurize.feature_set": "social+multiw2v",
    "featurize.buckets": "",
    "featurize.fractions": "1.0",
    "train.feature_set": "",
    "train.bucket": "",
    "train.fraction": "",
    "serve.host": "127.0.0.1",
    "serve.port": "8000",
    "serve.static": "",
}

# Stage that produces each artifact, for actionable missing-input errors.
_PRODUCERS = {
    "paths.corpus": "synth",
    "paths.kb": "synth",
    "paths.labels": "synth",
    "paths.filtered": "ingest",
    "paths.matches": "link",
    "paths.store": "build-reports",
    "paths.models": "train-embeddings",
    "paths.features": "featurize",
    "paths.classifier": "train",
    "paths.results": "evaluate",
}

_SYNTH_FIELDS = {f.name: f for f in dataclasses.fields(SynthSpec)}


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, str]:
    """Plain `key = value` lines; # starts a comment line."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{origin}:{line_no}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigurationError(f"{origin}:{line_no}: empty key")
        values[key] = value.strip()
    return values


def parse_config_file(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), origin=str(path))


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigurationError(f"{key}: expected a boolean, got {value!r}")


class PipelineConfig:
    """Validated key-value configuration with typed accessors.

    Unknown keys are rejected so a typo in an override cannot silently
    fall back to a default. Relative paths resolve under the workdir.
    """

    def __init__(self, values: Mapping[str, str] | None = None):
        values = dict(values or {})
        unknown = [
            k for k in values if k not in _DEFAULTS and not k.startswith("synth.")
        ]
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key in values:
            if key.startswith("synth."):
                field = key.split(".", 1)[1]
                if field not in _SYNTH_FIELDS:
                    raise ConfigurationError(f"unknown synthesis knob: {key}")
        self.values: dict[str, str] = {**_DEFAULTS, **values}

    def get(self, key: str) -> str:
        return self.values[key]

    def get_int(self, key: str) -> int:
        try:
            return int(self.values[key])
        except ValueError:
            raise ConfigurationError(
                f"{key}: expected an integer, got {self.values[key]!r}"
            ) from None

    def get_float(self, key: str) -> float:
        try:
            return float(self.values[key])
        except ValueError:
            raise ConfigurationError(
                f"{key}: expected a number, got {self.values[key]!r}"
            ) from None

    def get_bool(self, key: str) -> bool:
        return _parse_bool(self.values[key], key)

    def get_list(self, key: str) -> list[str]:
        value = self.values[key]
        return [part.strip() for part in value.split(",") if part.strip()]

    @property
    def seed(self) -> int:
        return self.get_int("seed")

    @property
    def workdir(self) -> Path:
        return Path(self.values["workdir"])

    def path(self, key: str) -> Path:
        p = Path(self.values[key])
        return p if p.is_absolute() else self.workdir / p

    def config_hash(self) -> str:
        canonical = "\n".join(f"{k}={self.values[k]}" for k in sorted(self.values))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def sgns_params(self) -> SGNSParams:
        return SGNSParams(
            dimension=self.get_int("embedding.dimension"),
            window=self.get_int("embedding.window"),
            negatives=self.get_int("embedding.negatives"),
            epochs=self.get_int("embedding.epochs"),
            learning_rate=self.get_float("embedding.learning_rate"),
            min_count=self.get_int("threshold.min_count"),
        )

    def train_config(self) -> TrainConfig:
        l2 = self.values["classifier.l2"]
        return TrainConfig(
            l2=float(l2) if l2 else None,
            max_epochs=self.get_int("classifier.max_epochs"),
            tolerance=self.get_float("classifier.tolerance"),
            standardize=self.get_bool("classifier.standardize"),
            class_weights=self.get_bool("classifier.class_weights"),
        )

    def grid(self) -> ExperimentGrid:
        return ExperimentGrid(
            feature_sets=tuple(self.get_list("grid.feature_sets")),
            time_buckets=tuple(int(b) for b in self.get_list("grid.buckets")),
            window_fractions=tuple(float(p) for p in self.get_list("grid.fractions")),
            folds=self.get_int("grid.folds"),
            seed=self.seed,
        )

    def test_year(self) -> int | None:
        value = self.values["grid.test_year"]
        return int(value) if value else None

    def synth_spec(self) -> SynthSpec:
        overrides = {}
        for key, value in self.values.items():
            if not key.startswith("synth."):
                continue
            name = key.split(".", 1)[1]
            field = _SYNTH_FIELDS[name]
            default = (
                field.default
                if field.default is not dataclasses.MISSING
                else field.default_factory()
            )
            if isinstance(default, tuple):
                element = type(default[0])
                parts = [p.strip() for p in value.split(",") if p.strip()]
                overrides[name] = tuple(element(p) for p in parts)
            elif isinstance(default, bool):
                overrides[name] = _parse_bool(value, key)
            elif isinstance(default, int):
                overrides[name] = int(value)
            elif isinstance(default, float):
                overrides[name] = float(value)
            else:
                overrides[name] = value
        return SynthSpec(**overrides)


def _require(config: PipelineConfig, key: str) -> Path:
    path = config.path(key)
    if not path.exists():
        stage = _PRODUCERS[key]
        hint = f"run the {stage} stage first"
        if stage == "synth":
            hint += f" or point {key} at existing data"
        raise MissingArtifactError(f"missing {path} ({hint})")
    return path


def _hash_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as src:
        for chunk in iter(lambda: src.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _hash_tree(path: Path) -> str:
    """Content hash of a file, or of a directory's sorted file table."""
    if path.is_file():
        return _hash_file(path)
    digest = hashlib.sha256()
    for sub in sorted(p for p in path.rglob("*") if p.is_file()):
        rel = sub.relative_to(path).as_posix()
        digest.update(f"{rel}\t{_hash_file(sub)}\n".encode("utf-8"))
    return digest.hexdigest()


def _write_provenance(
    artifact: Path,
    stage: str,
    config: PipelineConfig,
    inputs: Mapping[str, Path],
) -> None:
    prov = {
        "artifact": artifact.name,
        "stage": stage,
        "seed": config.seed,
        "config_hash": config.config_hash(),
        "inputs": {name: _hash_tree(path) for name, path in sorted(inputs.items())},
    }
    sidecar = artifact.with_name(artifact.name + ".prov")
    _atomic_write_text(sidecar, json.dumps(prov, indent=2, sort_keys=True) + "\n")


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _replace_dir(tmp: Path, final: Path) -> None:
    # Not a single atomic step: the old tree is removed before the
    # rename, so a crash in between leaves only the .tmp directory.
    if final.exists():
        shutil.rmtree(final)
    os.replace(tmp, final)


def _fresh_tmp_dir(final: Path) -> Path:
    tmp = final.with_name(final.name + ".tmp")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    return tmp


def stage_synth(config: PipelineConfig) -> dict:
    spec = config.synth_spec()
    result = generate_synthetic_corpus(spec, config.seed)
    corpus = config.path("paths.corpus")
    kb = config.path("paths.kb")
    labels = config.path("paths.labels")
    for target in (corpus, kb, labels):
        target.parent.mkdir(parents=True, exist_ok=True)
    stats = write_corpus_files(
        result,
        str(corpus) + ".tmp",
        str(kb) + ".tmp",
        str(labels) + ".tmp",
    )
    for target in (corpus, kb, labels):
        os.replace(str(target) + ".tmp", target)
        _write_provenance(target, "synth", config, {})
    return stats


def stage_ingest(config: PipelineConfig) -> dict:
    corpus = _require(config, "paths.corpus")
    filtered = config.path("paths.filtered")
    filtered.parent.mkdir(parents=True, exist_ok=True)
    total = 0

    def kept():
        nonlocal total
        for tweet in read_tweets(str(corpus)):
            total += 1
            if keep_uppercase_rip(tweet):
                yield tweet

    tmp = str(filtered) + ".tmp"
    n = write_tweets(tmp, kept())
    os.replace(tmp, filtered)
    _write_provenance(filtered, "ingest", config, {"corpus": corpus})
    return {"tweets": total, "kept": n}


def stage_link(config: PipelineConfig) -> dict:
    filtered = _require(config, "paths.filtered")
    kb = _require(config, "paths.kb")
    index = build_name_index(read_person_entries(str(kb)))
    matches = config.path("paths.matches")
    matches.parent.mkdir(parents=True, exist_ok=True)
    tmp = str(matches) + ".tmp"
    pairs = 0
    matched_tweets = set()
    with open(tmp, "w", encoding="utf-8") as out:
        out.write("tweet_id\tperson_id\n")
        for tweet, person_id in match_stream(read_tweets(str(filtered)), index):
            out.write(f"{tweet.id}\t{person_id}\n")
            pairs += 1
            matched_tweets.add(tweet.id)
    os.replace(tmp, matches)
    _write_provenance(matches, "link", config, {"filtered": filtered, "kb": kb})
    return {"pairs": pairs, "matched_tweets": len(matched_tweets)}


def _read_matches(path: Path) -> dict[str, list[str]]:
    by_tweet: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as src:
        header = src.readline()
        if header.strip() != "tweet_id\tperson_id":
            raise ConfigurationError(f"{path}: not a matches file")
        for line in src:
            line = line.rstrip("\n")
            if not line:
                continue
            tweet_id, _, person_id = line.partition("\t")
            by_tweet.setdefault(tweet_id, []).append(person_id)
    return by_tweet


def stage_build_reports(config: PipelineConfig) -> dict:
    filtered = _require(config, "paths.filtered")
    matches_path = _require(config, "paths.matches")
    kb = _require(config, "paths.kb")
    people = {entry.id: entry for entry in read_person_entries(str(kb))}
    by_tweet = _read_matches(matches_path)

    def pairs():
        for tweet in read_tweets(str(filtered)):
            for person_id in by_tweet.get(tweet.id, ()):
                yield tweet, person_id

    reports, stats = build_reports(
        pairs(), people=people, threshold=config.get_int("threshold.mentions")
    )

    store_dir = config.path("paths.store")
    tmp = _fresh_tmp_dir(store_dir)
    store = ReportStore.initialize(tmp, reports, people)

    applied = 0
    unmatched = 0
    labels_path = config.path("paths.labels")
    inputs = {"filtered": filtered, "matches": matches_path, "kb": kb}
    if labels_path.exists():
        inputs["labels"] = labels_path
        gold = read_labels(str(labels_path))
        known = set(store.report_ids())
        unmatched = sum(1 for rid in gold if rid not in known)
        for rid in store.report_ids():
            label = gold.get(rid)
            if label is None:
                continue
            candidates = sorted(
                c["person_id"] for c in store.summary(rid)["candidates"]
            )
            store.submit(
                AnnotationRecord(
                    report_id=rid,
                    resolved_person_id=candidates[0],
                    label=label,
                    annotator="synthetic-gold",
                    annotated_at=0,
                )
            )
            applied += 1
    _replace_dir(tmp, store_dir)
    _write_provenance(store_dir, "build-reports", config, inputs)
    stats = dict(stats)
    stats.update({"gold_labels": applied, "unmatched_labels": unmatched})
    return stats


def _store_test_year(config: PipelineConfig, store: ReportStore) -> int:
    configured = config.test_year()
    if configured is not None:
        return configured
    years = {int(store.summary(rid)["first_day"][:4]) for rid in store.report_ids()}
    if not years:
        raise ConfigurationError("the report store is empty")
    return max(years)


_MODEL_FILES = ("w2v.bin", "w2v_real.bin", "w2v_commemoration.bin", "w2v_fake.bin")


def stage_train_embeddings(config: PipelineConfig) -> dict:
    store_dir = _require(config, "paths.store")
    filtered = _require(config, "paths.filtered")
    store = ReportStore(store_dir)
    test_year = _store_test_year(config, store)
    start = test_period_start(test_year)
    params = config.sgns_params()

    # Shared model: every training-period tweet that passed the keyword
    # filter, not just tweets that became reports.
    sentences = []
    corpus_max_ts = 0
    for tweet in read_tweets(str(filtered)):
        if tweet.timestamp >= start:
            continue
        sentences.append(tokenize(tweet.text))
        corpus_max_ts = max(corpus_max_ts, tweet.timestamp)
    if not sentences:
        raise ConfigurationError(
            f"no tweets before the test period (year {test_year}) to train on"
        )
    shared = train_sgns(sentences, params, config.seed, corpus_max_ts)

    labeled = []
    for rid in store.report_ids():
        summary = store.summary(rid)
        if summary["label"] is None:
            continue
        if int(summary["first_day"][:4]) >= test_year:
            continue
        timeline = store.load_timeline(rid)
        kept = [t for t in timeline.tweets if t.timestamp < start]
        if kept:
            labeled.append((Timeline(tuple(kept)), summary["label"]))
    class_models = train_class_models(labeled, params, config.seed + 100)

    models_dir = config.path("paths.models")
    tmp = _fresh_tmp_dir(models_dir)
    save_model(shared, str(tmp / "w2v.bin"))
    for label in LABELS:
        save_model(class_models.models[label], str(tmp / f"w2v_{label}.bin"))
    _replace_dir(tmp, models_dir)
    _write_provenance(
        models_dir,
        "train-embeddings",
        config,
        {"filtered": filtered, "store": store_dir},
    )
    return {
        "test_year": test_year,
        "shared_vocabulary": len(shared.vocabulary),
        "class_timelines": len(labeled),
    }


def _load_models(config: PipelineConfig) -> tuple:
    models_dir = _require(config, "paths.models")
    for name in _MODEL_FILES:
        if not (models_dir / name).exists():
            raise MissingArtifactError(
                f"missing {models_dir / name} (run the train-embeddings stage first)"
            )
    shared = load_model(str(models_dir / "w2v.bin"))
    class_models = ClassModels(
        {label: load_model(str(models_dir / f"w2v_{label}.bin")) for label in LABELS}
    )
    return models_dir, shared, class_models


def stage_featurize(config: PipelineConfig) -> dict:
    store_dir = _require(config, "paths.store")
    models_dir, shared, class_models = _load_models(config)
    store = ReportStore(store_dir)
    feature_set = config.get("featurize.feature_set")
    if feature_set not in FEATURE_SETS:
        raise ConfigurationError(f"featurize.feature_set: unknown set {feature_set!r}")
    buckets = [int(b) for b in (config.get_list("featurize.buckets") or config.get_list("grid.buckets"))]
    fractions = [float(p) for p in config.get_list("featurize.fractions")]
    needs_shared = feature_set in ("w2v", "social+w2v")
    needs_class = feature_set in ("multiw2v", "social+multiw2v")

    def rows():
        for rid in store.report_ids():
            summary = store.summary(rid)
            timeline = store.load_timeline(rid)
            featurizer = ReportFeaturizer(
                timeline,
                shared if needs_shared else None,
                class_models if needs_class else None,
            )
            label = summary["label"] or "-"
            for fraction in sorted(set(fractions)):
                for bucket in sorted(set(buckets)):
                    values = featurizer.features(feature_set, bucket * 60.0, fraction)
                    yield rid, label, bucket, fraction, values

    features = config.path("paths.features")
    features.parent.mkdir(parents=True, exist_ok=True)
    tmp = str(features) + ".tmp"
    count = write_feature_matrix(tmp, feature_set, shared.dimension, rows())
    os.replace(tmp, features)
    _write_provenance(
        features, "featurize", config, {"store": store_dir, "models": models_dir}
    )
    return {"feature_set": feature_set, "rows": count, "reports": len(store)}


def _report_year(report_id: str) -> int:
    tail = report_id.rsplit("_", 1)
    try:
        return dt.date.fromisoformat(tail[1]).year
    except (IndexError, ValueError):
        raise ConfigurationError(
            f"report id {report_id!r} does not end in _YYYY-MM-DD; "
            "set grid.test_year explicitly"
        ) from None


def stage_train(config: PipelineConfig) -> dict:
    features_path = _require(config, "paths.features")
    names, rows = read_feature_matrix(str(features_path))
    present = [row for row in rows if row[1] in LABELS]
    if not present:
        raise ConfigurationError(f"no labeled rows in {features_path}")
    # Blank bucket/fraction mean the most complete view available.
    bucket_value = config.get("train.bucket")
    bucket = int(bucket_value) if bucket_value else max(row[2] for row in present)
    fraction_value = config.get("train.fraction")
    fraction = (
        float(fraction_value) if fraction_value else max(row[3] for row in present)
    )
    feature_set = config.get("train.feature_set") or config.get("featurize.feature_set")

    labeled = [row for row in present if row[2] == bucket and row[3] == fraction]
    if not labeled:
        raise ConfigurationError(
            f"no labeled rows at bucket {bucket} and fraction {fraction} in "
            f"{features_path}"
        )
    years = sorted({_report_year(row[0]) for row in labeled})
    test_year = config.test_year()
    if test_year is None:
        test_year = years[-1]
    train_rows = [row for row in labeled if _report_year(row[0]) < test_year]
    if not train_rows:
        raise ConfigurationError(f"no training rows before year {test_year}")

    x = np.stack([row[4] for row in train_rows])
    y = np.array([label_index(row[1]) for row in train_rows], dtype=np.int64)
    model = train_classifier(x, y, config.train_config())

    classifier_path = config.path("paths.classifier")
    classifier_path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "feature_set": feature_set,
        "bucket_min": str(bucket),
        "fraction": repr(fraction),
        "test_year": str(test_year),
        "seed": str(config.seed),
    }
    tmp = str(classifier_path) + ".tmp"
    save_classifier(model, tmp, tuple(names), meta)
    os.replace(tmp, classifier_path)
    text_path = classifier_path.with_suffix(".txt")
    tmp_text = str(text_path) + ".tmp"
    save_classifier_text(model, tmp_text, tuple(names))
    os.replace(tmp_text, text_path)
    _write_provenance(
        classifier_path, "train", config, {"features": features_path}
    )
    return {
        "instances": len(train_rows),
        "test_year": test_year,
        "final_loss": model.loss_history[-1],
    }


def _store_reports(store: ReportStore) -> list[DeathReport]:
    reports = []
    for rid in store.report_ids():
        summary = store.summary(rid)
        reports.append(
            DeathReport(
                report_id=rid,
                candidate_person_ids=frozenset(
                    c["person_id"] for c in summary["candidates"]
                ),
                first_day=dt.date.fromisoformat(summary["day_span"][0]),
                last_day=dt.date.fromisoformat(summary["day_span"][1]),
                timeline=store.load_timeline(rid),
                suggested_label=summary["suggested_label"],
                label=summary["label"],
                resolved_person_id=summary["resolved_person_id"],
            )
        )
    return reports


def stage_evaluate(config: PipelineConfig) -> dict:
    store_dir = _require(config, "paths.store")
    models_dir, shared, class_models = _load_models(config)
    store = ReportStore(store_dir)
    reports = _store_reports(store)
    unlabeled = sum(1 for r in reports if r.label is None)
    if unlabeled:
        raise ConfigurationError(
            f"{unlabeled} reports are still pending; annotate or supply gold "
            "labels before evaluating"
        )
    split = split_by_year(reports, config.test_year())
    grid = config.grid()
    train_instances = make_instances(split.train, shared, class_models)
    test_instances = make_instances(split.test, shared, class_models)
    results = run_grid(
        grid,
        train_instances,
        test_instances,
        config.train_config(),
        split.test_year,
    )

    results_dir = config.path("paths.results")
    tmp = _fresh_tmp_dir(results_dir)
    emit_report(results, str(tmp / "results.tsv"), str(tmp / "tables.txt"))
    _replace_dir(tmp, results_dir)
    _write_provenance(
        results_dir, "evaluate", config, {"store": store_dir, "models": models_dir}
    )
    return {
        "cells": len(results),
        "test_year": split.test_year,
        "train_reports": len(split.train),
        "test_reports": len(split.test),
    }


def stage_annotate_serve(config: PipelineConfig) -> dict:
    store_dir = _require(config, "paths.store")
    from ripwire.annotation.service import serve

    static = config.get("serve.static") or None
    serve(
        str(store_dir),
        config.get("serve.host"),
        config.get_int("serve.port"),
        static_dir=static,
    )
    return {}


STAGES: dict[str, Callable[[PipelineConfig], dict]] = {
    "synth": stage_synth,
    "ingest": stage_ingest,
    "link": stage_link,
    "build-reports": stage_build_reports,
    "train-embeddings": stage_train_embeddings,
    "featurize": stage_featurize,
    "train": stage_train,
    "evaluate": stage_evaluate,
    "annotate-serve": stage_annotate_serve,
}


def run_stage(name: str, config: PipelineConfig) -> dict:
    """Run one stage; returns its summary statistics.

    Raises:
        ConfigurationError: unknown stage name or bad configuration.
        MissingArtifactError: an upstream artifact is absent.
    """
    if name not in STAGES:
        raise ConfigurationError(
            f"unknown stage {name!r}; expected one of {', '.join(STAGES)}"
        )
    return STAGES[name](config)
