"""Report store semantics and the HTTP annotation service."""
import datetime as dt
import math

import pytest
from fastapi.testclient import TestClient

from ripwire.annotation.service import create_app
from ripwire.annotation.store import (
    PAGE_SIZE,
    TWEET_PAGE_SIZE,
    AnnotationRecord,
    ReportStore,
    UnknownReportError,
)
from ripwire.corpus.records import Timeline, Tweet
from ripwire.errors import ConfigurationError
from ripwire.kb import KBDate, PersonEntry
from ripwire.labels import LABELS
from ripwire.reports import DeathReport, make_report_id, utc_day


def make_person(i, dead_on=None):
    death = KBDate(dead_on.isoformat(), 11) if dead_on is not None else None
    return PersonEntry(
        id=f"p{i:03d}",
        name=f"Person {i:03d}",
        birth=KBDate("1950-01-01", 11),
        death=death,
        description="singer",
    )


def make_report(person, day, n_tweets=5, suggested=None):
    base = int(
        dt.datetime(day.year, day.month, day.day, 9, tzinfo=dt.timezone.utc).timestamp()
    )
    tweets = [
        Tweet(
            id=f"{person.id}-{i:04d}",
            timestamp=base + i * 30,
            text=f"RIP {person.name} token{i}",
            user_id=f"u{i}",
            hashtags=frozenset(),
            mentions=frozenset(),
        )
        for i in range(n_tweets)
    ]
    return DeathReport(
        report_id=make_report_id([person.id], day),
        candidate_person_ids=frozenset({person.id}),
        first_day=day,
        last_day=day,
        timeline=Timeline.from_tweets(tweets),
        suggested_label=suggested,
    )


def build_store(root, n_reports=6, big_first=False):
    """Store with one report per person on consecutive days. Even people
    are long dead, odd people alive, so suggestions alternate."""
    people = {}
    reports = []
    for i in range(n_reports):
        day = dt.date(2013, 1, 1) + dt.timedelta(days=i)
        dead_on = dt.date(2001, 5, 5) if i % 2 == 0 else None
        person = make_person(i, dead_on=dead_on)
        people[person.id] = person
        suggested = LABELS[1] if i % 2 == 0 else LABELS[2]
        n_tweets = 120 if (big_first and i == 0) else 5
        reports.append(make_report(person, day, n_tweets=n_tweets, suggested=suggested))
    return ReportStore.initialize(root, reports, people), reports


def record_for(report, label, when=1_360_000_000):
    return AnnotationRecord(
        report_id=report.report_id,
        resolved_person_id=min(report.candidate_person_ids),
        label=label,
        annotator="tester",
        annotated_at=when,
    )


def test_initialize_and_reopen(tmp_path):
    store, reports = build_store(tmp_path / "store")
    reopened = ReportStore(tmp_path / "store")
    for st in (store, reopened):
        assert len(st) == len(reports)
        assert st.counts() == {"total": 6, "annotated": 0, "pending": 6}
        assert st.report_ids() == tuple(
            r.report_id for r in sorted(reports, key=lambda r: (r.first_day, r.report_id))
        )
        assert reports[0].report_id in st


def test_initialize_rejects_bad_input(tmp_path):
    person = make_person(0)
    report = make_report(person, dt.date(2013, 1, 1))
    with pytest.raises(ConfigurationError, match="knowledge base"):
        ReportStore.initialize(tmp_path / "a", [report], {})
    ReportStore.initialize(tmp_path / "b", [report], {person.id: person})
    with pytest.raises(ConfigurationError, match="already contains"):
        ReportStore.initialize(tmp_path / "b", [report], {person.id: person})
    with pytest.raises(ConfigurationError, match="not an initialized"):
        ReportStore(tmp_path / "missing")


def test_summary_exposes_candidates_and_suggestion(tmp_path):
    store, reports = build_store(tmp_path / "store")
    dead = store.summary(reports[0].report_id)
    alive = store.summary(reports[1].report_id)
    assert dead["suggested_label"] == LABELS[1]
    assert dead["candidates"][0]["death_display"] == "2001-05-05"
    assert alive["suggested_label"] == LABELS[2]
    assert alive["candidates"][0]["death_display"] == "alive"
    assert dead["status"] == "pending" and dead["label"] is None
    assert dead["day_span"] == ["2013-01-01", "2013-01-01"]
    assert dead["tweet_count"] == 5
    with pytest.raises(UnknownReportError):
        store.summary("nope_2013-01-01")


def test_listing_pagination_matches_sort_then_slice(tmp_path):
    store, reports = build_store(tmp_path / "store", n_reports=PAGE_SIZE * 2 + 20)
    ordered = [
        r.report_id for r in sorted(reports, key=lambda r: (r.first_day, r.report_id))
    ]
    assert store.page_count("all") == 3
    seen = []
    for page in (1, 2, 3):
        chunk = [s["report_id"] for s in store.list_reports(page=page)]
        assert chunk == ordered[(page - 1) * PAGE_SIZE : page * PAGE_SIZE]
        seen.extend(chunk)
    assert seen == ordered
    assert store.list_reports(page=4) == []
    assert [s["report_id"] for s in store.list_reports()] == ordered
    with pytest.raises(ConfigurationError, match="page"):
        store.list_reports(page=0)
    with pytest.raises(ConfigurationError, match="status"):
        store.list_reports(status="done")


def test_status_filter_tracks_annotations(tmp_path):
    store, reports = build_store(tmp_path / "store")
    store.submit(record_for(reports[2], LABELS[0]))
    pending = [s["report_id"] for s in store.list_reports(status="pending")]
    annotated = [s["report_id"] for s in store.list_reports(status="annotated")]
    assert reports[2].report_id in annotated and len(annotated) == 1
    assert reports[2].report_id not in pending and len(pending) == 5
    counts = store.counts()
    assert counts["pending"] + counts["annotated"] == counts["total"]


def test_tweet_paging(tmp_path):
    store, reports = build_store(tmp_path / "store", big_first=True)
    rid = reports[0].report_id
    pages = [store.get_report(rid, tweet_page=p) for p in (1, 2, 3, 4)]
    assert [len(p["tweets"]) for p in pages] == [TWEET_PAGE_SIZE, TWEET_PAGE_SIZE, 20, 0]
    assert all(p["tweet_page_count"] == math.ceil(120 / TWEET_PAGE_SIZE) for p in pages)
    ids = [t["id"] for page in pages for t in page["tweets"]]
    assert ids == [t.id for t in reports[0].timeline]
    assert pages[1]["tweet_page"] == 2
    with pytest.raises(ConfigurationError, match="tweet_page"):
        store.get_report(rid, tweet_page=0)
    with pytest.raises(UnknownReportError):
        store.get_report("nope_2013-01-01")


def test_load_timeline_round_trips(tmp_path):
    store, reports = build_store(tmp_path / "store")
    timeline = store.load_timeline(reports[0].report_id)
    assert [t.id for t in timeline] == [t.id for t in reports[0].timeline]
    assert utc_day(timeline.tweets[0].timestamp) == reports[0].first_day


def test_submit_then_resubmit_overwrites_but_keeps_audit(tmp_path):
    store, reports = build_store(tmp_path / "store")
    rid = reports[0].report_id
    counts = store.submit(record_for(reports[0], LABELS[0], when=100))
    assert counts == {"total": 6, "annotated": 1, "pending": 5}
    counts = store.submit(record_for(reports[0], LABELS[2], when=200))
    assert counts == {"total": 6, "annotated": 1, "pending": 5}
    assert store.summary(rid)["label"] == LABELS[2]
    trail = store.audit_trail(rid)
    assert [e["annotated_at"] for e in trail] == [100, 200]
    assert [e["label"] for e in trail] == [LABELS[0], LABELS[2]]


def test_skip_preserves_state(tmp_path):
    store, reports = build_store(tmp_path / "store")
    rid = reports[0].report_id
    counts = store.skip(rid, "tester", 100)
    assert counts["pending"] == 6
    assert store.summary(rid)["status"] == "pending"
    store.submit(record_for(reports[0], LABELS[1], when=200))
    counts = store.skip(rid, "tester", 300)
    assert counts["annotated"] == 1
    assert store.summary(rid)["label"] == LABELS[1]
    assert [e.get("skip", False) for e in store.audit_trail(rid)] == [True, False, True]
    with pytest.raises(UnknownReportError):
        store.skip("nope_2013-01-01", "tester", 1)


def test_submit_validation(tmp_path):
    store, reports = build_store(tmp_path / "store")
    good = record_for(reports[0], LABELS[0])
    with pytest.raises(UnknownReportError):
        store.submit(
            AnnotationRecord("nope_2013-01-01", "p000", LABELS[0], "tester", 1)
        )
    with pytest.raises(ConfigurationError, match="not a candidate"):
        store.submit(
            AnnotationRecord(good.report_id, "p999", LABELS[0], "tester", 1)
        )
    with pytest.raises(ConfigurationError, match="label"):
        AnnotationRecord(good.report_id, "p000", "maybe", "tester", 1)
    with pytest.raises(ConfigurationError, match="report_id"):
        AnnotationRecord("", "p000", LABELS[0], "tester", 1)
    with pytest.raises(ConfigurationError, match="resolved_person_id"):
        AnnotationRecord(good.report_id, "", LABELS[0], "tester", 1)


def test_export_is_derived_from_the_log(tmp_path):
    store, reports = build_store(tmp_path / "store")
    empty = store.export_labels()
    header, blank, *summary = empty.splitlines()
    assert header == "report_id\tperson_id\tlabel\tfirst_day\ttweet_count"
    assert blank == ""
    assert summary[0] == "veracity\tinstances\ttweets"
    assert summary[-1] == "total\t0\t0"

    store.submit(record_for(reports[1], LABELS[0], when=100))
    store.submit(record_for(reports[0], LABELS[1], when=200))
    store.skip(reports[2].report_id, "tester", 300)
    text = store.export_labels()
    rows = [l for l in text.splitlines() if l.startswith("p00")]
    # Listing order (by first_day), not submission order.
    assert rows[0].startswith(reports[0].report_id)
    assert rows[1].startswith(reports[1].report_id)
    assert f"{LABELS[0]}\t1\t5" in text
    assert f"{LABELS[1]}\t1\t5" in text
    assert f"{LABELS[2]}\t0\t0" in text
    assert "total\t2\t10" in text
    # A fresh instance over the same directory replays to the same export.
    assert ReportStore(tmp_path / "store").export_labels() == text


def test_torn_final_log_line_is_ignored(tmp_path):
    store, reports = build_store(tmp_path / "store")
    store.submit(record_for(reports[0], LABELS[0]))
    log = tmp_path / "store" / "annotations.log"
    with open(log, "a", encoding="utf-8") as handle:
        handle.write('{"report_id": "p001_2013-01-0')
    reopened = ReportStore(tmp_path / "store")
    assert reopened.counts()["annotated"] == 1


def test_corrupt_log_interior_is_an_error(tmp_path):
    store, reports = build_store(tmp_path / "store")
    store.submit(record_for(reports[0], LABELS[0]))
    log = tmp_path / "store" / "annotations.log"
    text = log.read_text(encoding="utf-8")
    log.write_text("not json\n" + text, encoding="utf-8")
    with pytest.raises(ValueError, match="line 1"):
        ReportStore(tmp_path / "store")


@pytest.fixture()
def client(tmp_path):
    store, reports = build_store(tmp_path / "store")
    return TestClient(create_app(store)), reports


def test_http_listing_and_counts(client):
    http, reports = client
    body = http.get("/api/reports", params={"status": "pending"}).json()
    assert body["total"] == 6 and body["pending"] == 6 and body["annotated"] == 0
    assert body["page"] == 1 and body["page_count"] == 1
    assert [r["report_id"] for r in body["reports"]] == [
        r.report_id for r in reports
    ]
    assert http.get("/api/reports", params={"status": "done"}).status_code == 400


def test_http_report_view_and_paging(client):
    http, reports = client
    rid = reports[0].report_id
    body = http.get(f"/api/reports/{rid}").json()
    assert body["report_id"] == rid
    assert len(body["tweets"]) == 5
    assert body["tweets"][0]["text"].startswith("RIP ")
    past_end = http.get(f"/api/reports/{rid}", params={"tweet_page": 9}).json()
    assert past_end["tweets"] == []
    missing = http.get("/api/reports/nope_2013-01-01")
    assert missing.status_code == 404
    assert "unknown report" in missing.json()["detail"]


def test_http_submit_flow(client):
    http, reports = client
    rid = reports[0].report_id
    payload = {
        "resolved_person_id": "p000",
        "label": LABELS[1],
        "annotator": "web",
        "annotated_at": 1_360_000_000,
    }
    body = http.post(f"/api/reports/{rid}/annotation", json=payload).json()
    assert body["ok"] is True
    assert body["pending"] == 5 and body["annotated"] == 1
    assert body["pending"] + body["annotated"] == body["total"]
    view = http.get(f"/api/reports/{rid}").json()
    assert view["status"] == "annotated" and view["label"] == LABELS[1]

    export = http.get("/api/export")
    assert export.status_code == 200
    assert export.headers["content-type"].startswith("text/plain")
    assert f"{rid}\tp000\t{LABELS[1]}" in export.text


def test_http_submit_rejections(client):
    http, reports = client
    rid = reports[0].report_id
    conflicting = {"report_id": "other", "resolved_person_id": "p000", "label": LABELS[0]}
    assert (
        http.post(f"/api/reports/{rid}/annotation", json=conflicting).status_code == 400
    )
    missing = http.post(f"/api/reports/{rid}/annotation", json={"label": LABELS[0]})
    assert missing.status_code == 400
    assert "missing fields" in missing.json()["detail"]
    bad_label = {"resolved_person_id": "p000", "label": "maybe"}
    assert (
        http.post(f"/api/reports/{rid}/annotation", json=bad_label).status_code == 400
    )
    not_candidate = {"resolved_person_id": "p999", "label": LABELS[0]}
    assert (
        http.post(f"/api/reports/{rid}/annotation", json=not_candidate).status_code
        == 400
    )
    unknown = http.post(
        "/api/reports/nope_2013-01-01/annotation",
        json={"resolved_person_id": "p000", "label": LABELS[0]},
    )
    assert unknown.status_code == 404


def test_http_skip(client):
    http, reports = client
    rid = reports[3].report_id
    body = http.post(f"/api/reports/{rid}/annotation", json={"skip": True}).json()
    assert body["ok"] is True and body["skipped"] is True
    assert body["pending"] == 6
