"""Tweet records, the uppercase keyword filter, and timeline ordering."""
import dataclasses
import json

import pytest
from hypothesis import given, settings, strategies as st

from ripwire.corpus.records import (
    RecordError,
    Timeline,
    Tweet,
    keep_uppercase_rip,
    parse_tweet_record,
    read_tweets,
    rip_token_spans,
    serialize_tweet,
    text_has_rip,
    write_tweets,
)

from oracles import has_rip_by_scan, rip_spans_by_scan


def make_tweet(**overrides) -> Tweet:
    base = dict(
        id="t1",
        timestamp=1_340_000_000,
        text="RIP John Doe",
        user_id="u9",
        followers=120,
        following=35,
        is_retweet=False,
        retweet_count=0,
        is_reply=False,
        hashtags=frozenset(),
        mentions=frozenset(),
        link_count=0,
        picture_count=1,
        language="en",
    )
    base.update(overrides)
    return Tweet(**base)


@pytest.mark.parametrize(
    "text,spans",
    [
        ("RIP John", [(0, 3)]),
        ("rip john", []),
        ("Rip John", []),
        ("R.I.P. John", []),
        ("#RIP John", [(1, 4)]),
        ("GRIP strength", []),
        ("TRIPLE crown", []),
        ("so sad... RIP", [(10, 13)]),
        ("RIP", [(0, 3)]),
        ("RIP RIP RIP", [(0, 3), (4, 7), (8, 11)]),
        ("9RIP", [(1, 4)]),
        ("_RIP", [(1, 4)]),
        ("RIP9", [(0, 3)]),
        ("éRIP", []),
        ("RIPР", []),
        ("", []),
    ],
)
def test_rip_spans_hand_cases(text, spans):
    assert rip_token_spans(text) == spans


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="RIPrip .#!9aéР_G", max_size=40))
def test_rip_spans_match_scan_oracle(text):
    assert rip_token_spans(text) == rip_spans_by_scan(text)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=60))
def test_rip_spans_match_scan_oracle_unicode(text):
    assert rip_token_spans(text) == rip_spans_by_scan(text)
    assert text_has_rip(text) == has_rip_by_scan(text)


def test_text_has_rip_agrees_with_spans():
    for text in ("RIP x", "no keyword", "#RIP", "grip"):
        assert text_has_rip(text) == bool(rip_token_spans(text))


def test_keep_uppercase_rip_reads_tweet_text():
    assert keep_uppercase_rip(make_tweet(text="RIP Someone"))
    assert not keep_uppercase_rip(make_tweet(text="rip someone"))
    assert not keep_uppercase_rip(make_tweet(text="gripping story"))


def test_serialize_round_trip():
    tweet = make_tweet(
        hashtags=frozenset({"b", "a"}),
        mentions=frozenset({"z"}),
        is_retweet=True,
        retweet_count=3,
        language="es",
    )
    line = serialize_tweet(tweet)
    assert "\n" not in line
    assert parse_tweet_record(line) == tweet


def test_serialize_is_deterministic_json():
    tweet = make_tweet(hashtags=frozenset({"b", "a", "c"}))
    first = serialize_tweet(tweet)
    second = serialize_tweet(dataclasses.replace(tweet))
    assert first == second
    payload = json.loads(first)
    assert payload["hashtags"] == sorted(payload["hashtags"])


identifier = st.text(alphabet="abcdefghij0123456789_", min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(
    id=identifier,
    timestamp=st.integers(min_value=1, max_value=2_000_000_000),
    text=st.text(max_size=80),
    user_id=identifier,
    followers=st.integers(min_value=0, max_value=10**7),
    following=st.integers(min_value=0, max_value=10**7),
    is_retweet=st.booleans(),
    retweet_count=st.integers(min_value=0, max_value=10**5),
    is_reply=st.booleans(),
    hashtags=st.frozensets(identifier, max_size=4),
    mentions=st.frozensets(identifier, max_size=4),
    link_count=st.integers(min_value=0, max_value=5),
    picture_count=st.integers(min_value=0, max_value=5),
    language=st.sampled_from(["en", "es", "und", "fr"]),
)
def test_round_trip_property(**fields):
    tweet = Tweet(**fields)
    assert parse_tweet_record(serialize_tweet(tweet)) == tweet


@pytest.mark.parametrize(
    "line,fragment",
    [
        ("not json", "invalid JSON"),
        ('{"id": "a"}', "missing required field"),
        ('["a", "b"]', "object"),
    ],
)
def test_parse_rejects_bad_records(line, fragment):
    with pytest.raises(RecordError) as info:
        parse_tweet_record(line, line_no=7)
    assert fragment in str(info.value)
    assert "line 7" in str(info.value)


def test_parse_rejects_nonpositive_timestamp():
    tweet = make_tweet()
    payload = json.loads(serialize_tweet(tweet))
    payload["timestamp"] = -5
    with pytest.raises(RecordError, match="positive"):
        parse_tweet_record(json.dumps(payload))


def test_parse_rejects_wrong_container_types():
    payload = json.loads(serialize_tweet(make_tweet()))
    payload["hashtags"] = 1
    with pytest.raises(RecordError, match="array"):
        parse_tweet_record(json.dumps(payload))


def test_timeline_orders_by_timestamp_then_id():
    tweets = [
        make_tweet(id="b", timestamp=200),
        make_tweet(id="a", timestamp=200),
        make_tweet(id="z", timestamp=100),
    ]
    timeline = Timeline.from_tweets(tweets)
    assert [t.id for t in timeline.tweets] == ["z", "a", "b"]
    assert timeline.t0 == 100


def test_timeline_rejects_empty():
    with pytest.raises(ValueError):
        Timeline.from_tweets([])


def test_file_round_trip(tmp_path):
    tweets = [make_tweet(id=f"t{i}", timestamp=100 + i) for i in range(5)]
    path = tmp_path / "tweets.jsonl"
    count = write_tweets(path, tweets)
    assert count == 5
    assert list(read_tweets(path)) == tweets


def test_read_tweets_reports_line_numbers(tmp_path):
    path = tmp_path / "tweets.jsonl"
    path.write_text(serialize_tweet(make_tweet()) + "\n{broken\n")
    with pytest.raises(RecordError, match="line 2"):
        list(read_tweets(path))
