"""Tweet records: parsing, validation, serialization, and the keyword filter.

The ingestion format is newline-delimited JSON, one tweet per line, UTF-8,
with field names exactly matching the Tweet dataclass. Unknown optional
fields default (counts 0, flags false, language "und"); records missing
id, timestamp, or text are rejected.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

__all__ = [
    "RecordError",
    "Tweet",
    "Timeline",
    "parse_tweet_record",
    "serialize_tweet",
    "keep_uppercase_rip",
    "text_has_rip",
    "rip_token_spans",
    "read_tweets",
    "write_tweets",
]


class RecordError(ValueError):
    """A malformed input record. Recoverable: carries the line number."""

    def __init__(self, message: str, line_no: int = 0):
        super().__init__(f"line {line_no}: {message}" if line_no else message)
        self.line_no = line_no
        self.reason = message


# The keyword token uses letters-only boundaries: an occurrence counts iff
# the character before and after (when present) is not a Unicode letter.
# [^\W\d_] matches exactly the Unicode letters.
_RIP_RE = re.compile(r"(?<![^\W\d_])RIP(?![^\W\d_])")


@dataclass(frozen=True, slots=True)
class Tweet:
    """One social-media post.

    timestamp is seconds since the epoch, UTC. hashtags and mentions have
    set semantics (no duplicates). All counts are non-negative.
    """

    id: str
    timestamp: int
    text: str
    user_id: str = ""
    followers: int = 0
    following: int = 0
    is_retweet: bool = False
    retweet_count: int = 0
    is_reply: bool = False
    hashtags: frozenset[str] = field(default_factory=frozenset)
    mentions: frozenset[str] = field(default_factory=frozenset)
    link_count: int = 0
    picture_count: int = 0
    language: str = "und"


_REQUIRED = ("id", "timestamp", "text")
_COUNT_FIELDS = ("followers", "following", "retweet_count", "link_count", "picture_count")
_FLAG_FIELDS = ("is_retweet", "is_reply")
_SET_FIELDS = ("hashtags", "mentions")

# Serialization field order is fixed so that emitted files are byte-stable.
_FIELD_ORDER = (
    "id",
    "timestamp",
    "text",
    "user_id",
    "followers",
    "following",
    "is_retweet",
    "retweet_count",
    "is_reply",
    "hashtags",
    "mentions",
    "link_count",
    "picture_count",
    "language",
)


def parse_tweet_record(line: str, line_no: int = 0) -> Tweet:
    """Parse one NDJSON tweet record.

    Raises:
        RecordError: malformed JSON, missing id/timestamp/text, or invalid
            field values (non-positive timestamp, negative counts). The
            error carries ``line_no``.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc.msg}", line_no) from None
    if not isinstance(raw, dict):
        raise RecordError("record is not an object", line_no)

    for name in _REQUIRED:
        if raw.get(name) is None:
            raise RecordError(f"missing required field {name!r}", line_no)

    try:
        timestamp = int(raw["timestamp"])
    except (TypeError, ValueError):
        raise RecordError(f"invalid timestamp: {raw['timestamp']!r}", line_no) from None
    if timestamp <= 0:
        raise RecordError(f"timestamp must be positive, got {timestamp}", line_no)

    text = raw["text"]
    if not isinstance(text, str):
        raise RecordError("text must be a string", line_no)

    kwargs: dict = {
        "id": str(raw["id"]),
        "timestamp": timestamp,
        "text": text,
        "user_id": str(raw.get("user_id", "")),
        "language": str(raw.get("language") or "und"),
    }
    for name in _COUNT_FIELDS:
        value = raw.get(name, 0)
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise RecordError(f"invalid count for {name!r}: {value!r}", line_no) from None
        if value < 0:
            raise RecordError(f"negative count for {name!r}: {value}", line_no)
        kwargs[name] = value
    for name in _FLAG_FIELDS:
        kwargs[name] = bool(raw.get(name, False))
    for name in _SET_FIELDS:
        value = raw.get(name, ())
        if isinstance(value, str) or not isinstance(value, (list, tuple, set, frozenset)):
            raise RecordError(f"{name!r} must be an array", line_no)
        kwargs[name] = frozenset(str(v) for v in value)

    return Tweet(**kwargs)


def serialize_tweet(tweet: Tweet) -> str:
    """Serialize to one NDJSON line; inverse of parse_tweet_record.

    Field order is fixed and set fields are sorted, so equal tweets always
    produce identical bytes.
    """
    raw = {}
    for name in _FIELD_ORDER:
        value = getattr(tweet, name)
        if isinstance(value, frozenset):
            value = sorted(value)
        raw[name] = value
    return json.dumps(raw, ensure_ascii=False, separators=(",", ":"))


def text_has_rip(text: str) -> bool:
    """True iff the text contains the standalone fully-uppercase RIP token."""
    return _RIP_RE.search(text) is not None


def keep_uppercase_rip(tweet: Tweet) -> bool:
    """Keyword filter: keep tweets whose text contains the uppercase RIP token."""
    return text_has_rip(tweet.text)


def rip_token_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) spans of every standalone uppercase RIP token, in order."""
    return [m.span() for m in _RIP_RE.finditer(text)]


@dataclass(frozen=True, slots=True)
class Timeline:
    """A non-empty sequence of tweets sorted ascending by timestamp."""

    tweets: tuple[Tweet, ...]

    def __post_init__(self):
        if not self.tweets:
            raise ValueError("timeline must be non-empty")
        ts = [t.timestamp for t in self.tweets]
        if any(a > b for a, b in zip(ts, ts[1:])):
            raise ValueError("timeline tweets must be sorted by timestamp")

    @classmethod
    def from_tweets(cls, tweets: Iterable[Tweet]) -> "Timeline":
        """Build a timeline, ordering tweets by (timestamp, id)."""
        ordered = sorted(tweets, key=lambda t: (t.timestamp, t.id))
        return cls(tuple(ordered))

    @property
    def t0(self) -> int:
        return self.tweets[0].timestamp

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self) -> Iterator[Tweet]:
        return iter(self.tweets)


def read_tweets(source: IO[str] | str | os.PathLike) -> Iterator[Tweet]:
    """Yield tweets from an NDJSON file path or open text handle.

    Blank lines are skipped. Malformed records raise RecordError with the
    1-based line number.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as handle:
            yield from read_tweets(handle)
        return
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if line:
            yield parse_tweet_record(line, line_no)


def write_tweets(destination: IO[str] | str | os.PathLike, tweets: Iterable[Tweet]) -> int:
    """Write tweets as NDJSON; returns the number of records written."""
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as handle:
            return write_tweets(handle, tweets)
    count = 0
    for tweet in tweets:
        destination.write(serialize_tweet(tweet))
        destination.write("\n")
        count += 1
    return count
