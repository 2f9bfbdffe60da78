"""Tweet corpus handling: record parsing, keyword filtering, synthesis."""

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

__all__ = [
    "RecordError",
    "Timeline",
    "Tweet",
    "keep_uppercase_rip",
    "parse_tweet_record",
    "read_tweets",
    "rip_token_spans",
    "serialize_tweet",
    "text_has_rip",
    "write_tweets",
]
