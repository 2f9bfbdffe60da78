"""Filesystem report store backing the annotation workflow.

Layout under the store root:

    reports/<report_id>/meta        one JSON object: span, candidates, counts
    reports/<report_id>/timeline    tweet records, corpus NDJSON format
    annotations.log                 append-only JSON lines

The log is the single source of truth for labels. The current label of a
report is the last non-skip entry for it, so re-submissions overwrite
while every prior version stays in the file for audit.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ripwire.corpus.records import Timeline, read_tweets, write_tweets
from ripwire.errors import ConfigurationError
from ripwire.kb import PersonEntry
from ripwire.labels import LABELS
from ripwire.reports import DeathReport

__all__ = [
    "PAGE_SIZE",
    "TWEET_PAGE_SIZE",
    "AnnotationRecord",
    "UnknownReportError",
    "ReportStore",
]

PAGE_SIZE = 50
TWEET_PAGE_SIZE = 50

_STATUSES = ("pending", "annotated", "all")


class UnknownReportError(KeyError):
    """Raised for report ids the store does not contain."""


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    report_id: str
    resolved_person_id: str
    label: str
    annotator: str
    annotated_at: int

    def __post_init__(self):
        if self.label not in LABELS:
            raise ConfigurationError(
                f"label must be one of {LABELS}, got {self.label!r}"
            )
        if not self.report_id:
            raise ConfigurationError("report_id must be non-empty")
        if not self.resolved_person_id:
            raise ConfigurationError("resolved_person_id must be non-empty")


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _candidate_view(entry: PersonEntry) -> dict:
    death = entry.death.iso if entry.death is not None else None
    return {
        "person_id": entry.id,
        "name": entry.name,
        "description": entry.description,
        "birth": entry.birth.iso,
        "death": death,
        "death_display": death if death is not None else "alive",
    }


def _replay(lines: Iterable[str], path: str) -> tuple[dict[str, dict], list[dict]]:
    """Current state and full audit trail from raw log lines.

    A torn final line (crash mid-append) is ignored; damage anywhere else
    is an error.
    """
    current: dict[str, dict] = {}
    audit: list[dict] = []
    buffered = list(lines)
    for i, line in enumerate(buffered):
        line = line.strip()
        if not line:
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError:
            if i == len(buffered) - 1:
                break
            raise ValueError(f"{path}: corrupt annotation log at line {i + 1}")
        audit.append(entry)
        if not entry.get("skip"):
            current[entry["report_id"]] = entry
    return current, audit


class ReportStore:
    """Reports on disk plus an in-memory index of spans and labels."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        reports_dir = self.root / "reports"
        if not reports_dir.is_dir():
            raise ConfigurationError(
                f"{self.root} is not an initialized report store (no reports/)"
            )
        self._log_path = self.root / "annotations.log"
        self._meta: dict[str, dict] = {}
        for meta_path in reports_dir.glob("*/meta"):
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            self._meta[meta["report_id"]] = meta
        self._order = sorted(
            self._meta, key=lambda rid: (self._meta[rid]["first_day"], rid)
        )
        self._labels, _ = _replay(self._read_log_lines(), str(self._log_path))
        self._lock = threading.Lock()

    @classmethod
    def initialize(
        cls,
        root: str | Path,
        reports: Sequence[DeathReport],
        people: Mapping[str, PersonEntry],
    ) -> "ReportStore":
        """Lay out one directory per report and an empty annotation log.

        Raises:
            ConfigurationError: a candidate id is missing from `people`,
                or the store already holds reports.
        """
        root = Path(root)
        reports_dir = root / "reports"
        if reports_dir.exists() and any(reports_dir.iterdir()):
            raise ConfigurationError(f"{root} already contains reports")
        reports_dir.mkdir(parents=True, exist_ok=True)
        for report in reports:
            candidates = []
            for pid in sorted(report.candidate_person_ids):
                if pid not in people:
                    raise ConfigurationError(
                        f"report {report.report_id}: candidate {pid} not in the "
                        "knowledge base"
                    )
                candidates.append(_candidate_view(people[pid]))
            meta = {
                "report_id": report.report_id,
                "first_day": report.first_day.isoformat(),
                "last_day": report.last_day.isoformat(),
                "tweet_count": len(report.timeline.tweets),
                "suggested_label": report.suggested_label,
                "candidates": candidates,
            }
            report_dir = reports_dir / report.report_id
            report_dir.mkdir(parents=True, exist_ok=True)
            tmp = report_dir / "timeline.tmp"
            write_tweets(str(tmp), report.timeline.tweets)
            os.replace(tmp, report_dir / "timeline")
            _atomic_write_text(
                report_dir / "meta",
                json.dumps(meta, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
            )
        log = root / "annotations.log"
        if not log.exists():
            log.touch()
        return cls(root)

    def _read_log_lines(self) -> list[str]:
        if not self._log_path.exists():
            return []
        return self._log_path.read_text(encoding="utf-8").splitlines()

    def __len__(self) -> int:
        return len(self._meta)

    def __contains__(self, report_id: str) -> bool:
        return report_id in self._meta

    def report_ids(self) -> tuple[str, ...]:
        """All ids ordered by first_day then report_id."""
        return tuple(self._order)

    def counts(self) -> dict[str, int]:
        annotated = sum(1 for rid in self._meta if rid in self._labels)
        return {
            "total": len(self._meta),
            "annotated": annotated,
            "pending": len(self._meta) - annotated,
        }

    def _status(self, report_id: str) -> str:
        return "annotated" if report_id in self._labels else "pending"

    def summary(self, report_id: str) -> dict:
        if report_id not in self._meta:
            raise UnknownReportError(report_id)
        meta = self._meta[report_id]
        entry = self._labels.get(report_id)
        return {
            "report_id": report_id,
            "candidates": meta["candidates"],
            "day_span": [meta["first_day"], meta["last_day"]],
            "first_day": meta["first_day"],
            "tweet_count": meta["tweet_count"],
            "suggested_label": meta["suggested_label"],
            "status": self._status(report_id),
            "label": entry["label"] if entry else None,
            "resolved_person_id": entry["resolved_person_id"] if entry else None,
        }

    def load_timeline(self, report_id: str) -> Timeline:
        if report_id not in self._meta:
            raise UnknownReportError(report_id)
        path = self.root / "reports" / report_id / "timeline"
        return Timeline.from_tweets(read_tweets(str(path)))

    def _filtered_ids(self, status: str) -> list[str]:
        if status not in _STATUSES:
            raise ConfigurationError(
                f"status must be one of {_STATUSES}, got {status!r}"
            )
        if status == "all":
            return list(self._order)
        return [rid for rid in self._order if self._status(rid) == status]

    def page_count(self, status: str = "all") -> int:
        return math.ceil(len(self._filtered_ids(status)) / PAGE_SIZE)

    def list_reports(self, status: str = "all", page: int | None = None) -> list[dict]:
        """Summaries ordered by first_day then report_id.

        `page` is 1-based with a fixed size of 50; None returns everything.

        Raises:
            ConfigurationError: unknown status or page < 1.
        """
        ids = self._filtered_ids(status)
        if page is not None:
            if page < 1:
                raise ConfigurationError(f"page must be >= 1, got {page}")
            ids = ids[(page - 1) * PAGE_SIZE : page * PAGE_SIZE]
        return [self.summary(rid) for rid in ids]

    def get_report(self, report_id: str, tweet_page: int = 1) -> dict:
        """Full view: summary plus one page of timeline records.

        Pages past the end return an empty tweet list so a scrolling
        client can probe without errors.

        Raises:
            UnknownReportError: id not in the store.
            ConfigurationError: tweet_page < 1.
        """
        if tweet_page < 1:
            raise ConfigurationError(f"tweet_page must be >= 1, got {tweet_page}")
        view = self.summary(report_id)
        timeline_path = self.root / "reports" / report_id / "timeline"
        lines = timeline_path.read_text(encoding="utf-8").splitlines()
        start = (tweet_page - 1) * TWEET_PAGE_SIZE
        page_lines = lines[start : start + TWEET_PAGE_SIZE]
        view["tweets"] = [json.loads(line) for line in page_lines if line.strip()]
        view["tweet_page"] = tweet_page
        view["tweet_page_count"] = math.ceil(len(lines) / TWEET_PAGE_SIZE)
        return view

    def _append(self, entry: dict) -> None:
        line = json.dumps(entry, sort_keys=True, ensure_ascii=False)
        with open(self._log_path, "a", encoding="utf-8") as log:
            log.write(line + "\n")
            log.flush()
            os.fsync(log.fileno())

    def submit(self, record: AnnotationRecord) -> dict:
        """Persist one annotation; returns the updated counts.

        Raises:
            UnknownReportError: no such report.
            ConfigurationError: resolved_person_id is not a candidate.
        """
        if record.report_id not in self._meta:
            raise UnknownReportError(record.report_id)
        candidates = {
            c["person_id"] for c in self._meta[record.report_id]["candidates"]
        }
        if record.resolved_person_id not in candidates:
            raise ConfigurationError(
                f"{record.resolved_person_id} is not a candidate of "
                f"{record.report_id}"
            )
        entry = asdict(record)
        with self._lock:
            self._append(entry)
            self._labels[record.report_id] = entry
        return self.counts()

    def skip(self, report_id: str, annotator: str, annotated_at: int) -> dict:
        """Log a skip; the report stays in its current state."""
        if report_id not in self._meta:
            raise UnknownReportError(report_id)
        entry = {
            "report_id": report_id,
            "skip": True,
            "annotator": annotator,
            "annotated_at": annotated_at,
        }
        with self._lock:
            self._append(entry)
        return self.counts()

    def audit_trail(self, report_id: str | None = None) -> list[dict]:
        """Every log entry in append order, optionally for one report."""
        _, audit = _replay(self._read_log_lines(), str(self._log_path))
        if report_id is None:
            return audit
        return [e for e in audit if e["report_id"] == report_id]

    def export_labels(self) -> str:
        """Labeled dataset as TSV, derived from the log alone.

        One row per annotated report in listing order, a blank line, then
        per-class instance and tweet totals.
        """
        current, _ = _replay(self._read_log_lines(), str(self._log_path))
        lines = ["report_id\tperson_id\tlabel\tfirst_day\ttweet_count"]
        instances = {label: 0 for label in LABELS}
        tweets = {label: 0 for label in LABELS}
        for rid in self._order:
            entry = current.get(rid)
            if entry is None:
                continue
            meta = self._meta[rid]
            label = entry["label"]
            instances[label] += 1
            tweets[label] += meta["tweet_count"]
            lines.append(
                f"{rid}\t{entry['resolved_person_id']}\t{label}"
                f"\t{meta['first_day']}\t{meta['tweet_count']}"
            )
        lines.append("")
        lines.append("veracity\tinstances\ttweets")
        for label in LABELS:
            lines.append(f"{label}\t{instances[label]}\t{tweets[label]}")
        lines.append(
            f"total\t{sum(instances.values())}\t{sum(tweets.values())}"
        )
        return "\n".join(lines) + "\n"
