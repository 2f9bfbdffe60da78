"""Aggregate matched mentions into death-report instances.

A report is one contiguous run of days on which a person was mentioned
at least `threshold` times per day; a missing day starts a new report.
Reports whose day span and tweet set coincide exactly are merged into a
single report with several candidate people (ambiguous names).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from ripwire.corpus.records import Timeline, Tweet
from ripwire.kb import ALIVE_OR_UNKNOWN, DEAD_BEFORE, DIES_ON, PersonEntry, vital_status
from ripwire.labels import COMMEMORATION, FAKE, REAL

__all__ = [
    "DeathReport",
    "DailyCells",
    "utc_day",
    "make_report_id",
    "aggregate_daily_mentions",
    "threshold_filter",
    "merge_consecutive_days",
    "merge_ambiguous_candidates",
    "suggest_label",
    "build_reports",
    "DEFAULT_THRESHOLD",
]

DEFAULT_THRESHOLD = 50

# (person_id, day) -> {tweet_id: Tweet}
DailyCells = dict[tuple[str, dt.date], dict[str, Tweet]]


def utc_day(timestamp: int) -> dt.date:
    """UTC calendar date of an epoch timestamp."""
    return dt.datetime.fromtimestamp(timestamp, tz=dt.timezone.utc).date()


def make_report_id(candidate_ids: Iterable[str], first_day: dt.date) -> str:
    """Deterministic, filesystem-safe report identifier."""
    return "+".join(sorted(candidate_ids)) + "_" + first_day.isoformat()


@dataclass(frozen=True, slots=True)
class DeathReport:
    """One person (or set of ambiguous candidates), one contiguous day
    span, and the tweet timeline that produced it."""

    report_id: str
    candidate_person_ids: frozenset[str]
    first_day: dt.date
    last_day: dt.date
    timeline: Timeline
    suggested_label: str | None = None
    label: str | None = None
    resolved_person_id: str | None = None

    def __post_init__(self):
        if not self.candidate_person_ids:
            raise ValueError("report needs at least one candidate person")
        if self.first_day > self.last_day:
            raise ValueError("day span is inverted")
        for tweet in self.timeline:
            day = utc_day(tweet.timestamp)
            if not (self.first_day <= day <= self.last_day):
                raise ValueError(
                    f"tweet {tweet.id} at {day} outside span "
                    f"{self.first_day}..{self.last_day}"
                )

    @property
    def tweet_count(self) -> int:
        return len(self.timeline)


def aggregate_daily_mentions(matches: Iterable[tuple[Tweet, str]]) -> DailyCells:
    """Group matched tweets by (person, UTC day).

    A tweet matching several people appears under each of them; within
    one cell tweets are unique by id.
    """
    cells: DailyCells = {}
    for tweet, person_id in matches:
        key = (person_id, utc_day(tweet.timestamp))
        cells.setdefault(key, {})[tweet.id] = tweet
    return cells


def threshold_filter(daily: DailyCells, threshold: int = DEFAULT_THRESHOLD) -> DailyCells:
    """Keep (person, day) cells with at least `threshold` distinct tweets."""
    return {key: tweets for key, tweets in daily.items() if len(tweets) >= threshold}


def merge_consecutive_days(daily: DailyCells) -> list[DeathReport]:
    """Turn surviving cells into reports: per person, each maximal run of
    consecutive days becomes one report; any gap of a day or more splits."""
    by_person: dict[str, list[dt.date]] = {}
    for person_id, day in daily:
        by_person.setdefault(person_id, []).append(day)

    reports: list[DeathReport] = []
    one_day = dt.timedelta(days=1)
    for person_id in sorted(by_person):
        days = sorted(by_person[person_id])
        run_start = 0
        for i in range(1, len(days) + 1):
            if i < len(days) and days[i] - days[i - 1] == one_day:
                continue
            run = days[run_start:i]
            run_start = i
            merged: dict[str, Tweet] = {}
            for day in run:
                merged.update(daily[(person_id, day)])
            timeline = Timeline.from_tweets(merged.values())
            reports.append(
                DeathReport(
                    report_id=make_report_id([person_id], run[0]),
                    candidate_person_ids=frozenset([person_id]),
                    first_day=run[0],
                    last_day=run[-1],
                    timeline=timeline,
                )
            )
    reports.sort(key=lambda r: (r.first_day, r.report_id))
    return reports


def merge_ambiguous_candidates(reports: Iterable[DeathReport]) -> list[DeathReport]:
    """Merge reports that are the same event under different candidate
    people: identical day span and identical tweet-id set. The merged
    report carries the union of candidates for the annotator to resolve."""
    groups: dict[tuple, list[DeathReport]] = {}
    for report in reports:
        key = (
            report.first_day,
            report.last_day,
            frozenset(t.id for t in report.timeline),
        )
        groups.setdefault(key, []).append(report)

    merged: list[DeathReport] = []
    for group in groups.values():
        if len(group) == 1:
            merged.append(group[0])
            continue
        candidates = frozenset().union(*(r.candidate_person_ids for r in group))
        first = group[0]
        merged.append(
            DeathReport(
                report_id=make_report_id(candidates, first.first_day),
                candidate_person_ids=candidates,
                first_day=first.first_day,
                last_day=first.last_day,
                timeline=first.timeline,
            )
        )
    merged.sort(key=lambda r: (r.first_day, r.report_id))
    return merged


def suggest_label(report: DeathReport, people: Mapping[str, PersonEntry]) -> str | None:
    """Auto-suggestion from candidate vital statuses on the report's
    first day: any candidate dying that day -> real; all long dead ->
    commemoration; all alive or unknown -> fake; mixed -> None (manual
    review). Candidates missing from the knowledge base count as unknown.
    """
    statuses = set()
    for pid in report.candidate_person_ids:
        person = people.get(pid)
        if person is None:
            statuses.add(ALIVE_OR_UNKNOWN)
        else:
            statuses.add(vital_status(person, report.first_day))
    if DIES_ON in statuses:
        return REAL
    if statuses == {DEAD_BEFORE}:
        return COMMEMORATION
    if statuses == {ALIVE_OR_UNKNOWN}:
        return FAKE
    return None


def build_reports(
    matches: Iterable[tuple[Tweet, str]],
    people: Mapping[str, PersonEntry] | None = None,
    threshold: int = DEFAULT_THRESHOLD,
) -> tuple[list[DeathReport], dict[str, int]]:
    """Full aggregation chain; returns (reports, stats).

    Stats report both the matched and the retained tweet universe so
    threshold losses stay visible: matched_tweets (distinct tweets with
    any mention), retained_tweets (distinct tweets inside reports),
    reports, people (distinct candidates across reports).
    """
    daily = aggregate_daily_mentions(matches)
    matched_tweet_ids = {tid for cell in daily.values() for tid in cell}
    surviving = threshold_filter(daily, threshold)
    reports = merge_ambiguous_candidates(merge_consecutive_days(surviving))
    if people is not None:
        reports = [replace(r, suggested_label=suggest_label(r, people)) for r in reports]
    retained = {t.id for r in reports for t in r.timeline}
    stats = {
        "matched_tweets": len(matched_tweet_ids),
        "retained_tweets": len(retained),
        "reports": len(reports),
        "people": len({pid for r in reports for pid in r.candidate_person_ids}),
    }
    return reports, stats
