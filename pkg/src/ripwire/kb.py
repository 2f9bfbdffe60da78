"""Knowledge-base person entries and name matching.

Entries come from a newline-delimited JSON dump (id, name, birth/death
dates with precision, description, aliases). Names and aliases feed a
multi-pattern index; tweets are matched by walking a trie from the
position right after each uppercase RIP token, longest match wins.
"""

from __future__ import annotations

import calendar
import os
import datetime as dt
import json
import unicodedata
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from ripwire._kernels import BACKEND
from ripwire.corpus.records import RecordError, Tweet, rip_token_spans

__all__ = [
    "ALIVE_OR_UNKNOWN",
    "DIES_ON",
    "DEAD_BEFORE",
    "KBDate",
    "PersonEntry",
    "NameIndex",
    "parse_person_entry",
    "read_person_entries",
    "write_person_entries",
    "normalize_name",
    "build_name_index",
    "match_mentions",
    "match_texts",
    "match_stream",
    "vital_status",
]

ALIVE_OR_UNKNOWN = "alive_or_unknown"
DIES_ON = "dies_on"
DEAD_BEFORE = "dead_before"

_DAY = dt.timedelta(days=1)


@dataclass(frozen=True, slots=True)
class KBDate:
    """A calendar date with a granularity code (11 = exact day, 10 =
    month, 9 = year, 8 = decade, 7 = century, 6 = millennium)."""

    iso: str
    precision: int

    def interval(self) -> tuple[dt.date, dt.date]:
        """Inclusive (first, last) day covered at this precision."""
        parts = self.iso.split("-")
        year = int(parts[0])
        month = int(parts[1]) if len(parts) > 1 and parts[1] else 1
        day = int(parts[2]) if len(parts) > 2 and parts[2] else 1
        p = self.precision
        if p >= 11:
            exact = dt.date(year, month, day)
            return exact, exact
        if p == 10:
            last = calendar.monthrange(year, month)[1]
            return dt.date(year, month, 1), dt.date(year, month, last)
        if p == 9:
            return dt.date(year, 1, 1), dt.date(year, 12, 31)
        if p == 8:
            lo = year - year % 10
            return dt.date(lo, 1, 1), dt.date(lo + 9, 12, 31)
        if p == 7:
            lo = (year - 1) // 100 * 100 + 1
            return dt.date(lo, 1, 1), dt.date(min(lo + 99, 9999), 12, 31)
        # millennium and coarser
        lo = max((year - 1) // 1000 * 1000 + 1, 1)
        return dt.date(lo, 1, 1), dt.date(min(lo + 999, 9999), 12, 31)


@dataclass(frozen=True, slots=True)
class PersonEntry:
    """One knowledge-base person record. death is None for people the
    knowledge base considers alive (or whose death is unknown)."""

    id: str
    name: str
    birth: KBDate
    death: KBDate | None = None
    description: str = ""
    aliases: tuple[str, ...] = ()


def _parse_kb_date(value, line_no: int, what: str) -> KBDate | None:
    """None when the value encodes a living person (absent / null / "0")."""
    if value is None or value == 0 or value == "0" or value == {}:
        return None
    if not isinstance(value, dict):
        raise RecordError(f"{what} must be an object", line_no)
    date = value.get("date")
    if date is None or date == "" or date == "0" or str(date).startswith("0000"):
        return None
    precision = value.get("precision", 11)
    try:
        precision = int(precision)
    except (TypeError, ValueError):
        raise RecordError(f"invalid {what} precision: {precision!r}", line_no) from None
    kd = KBDate(iso=str(date), precision=precision)
    try:
        kd.interval()
    except (ValueError, IndexError):
        raise RecordError(f"invalid {what} date: {date!r}", line_no) from None
    return kd


def parse_person_entry(record: str, line_no: int = 0) -> PersonEntry | None:
    """Parse one dump record; returns None when it lacks a birth date
    (only person entries carry one).

    Raises:
        RecordError: malformed JSON or field values, or a day-precision
            death earlier than a day-precision birth.
    """
    try:
        raw = json.loads(record)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc.msg}", line_no) from None
    if not isinstance(raw, dict):
        raise RecordError("entry is not an object", line_no)
    birth = _parse_kb_date(raw.get("birth"), line_no, "birth")
    if birth is None:
        return None
    if raw.get("id") is None or raw.get("name") is None:
        raise RecordError("entry missing id or name", line_no)
    death = _parse_kb_date(raw.get("death"), line_no, "death")
    if death is not None and death.precision >= 11 and birth.precision >= 11:
        if death.interval()[0] < birth.interval()[0]:
            raise RecordError("death date precedes birth date", line_no)
    aliases = raw.get("aliases", ())
    if isinstance(aliases, str) or not isinstance(aliases, (list, tuple)):
        raise RecordError("aliases must be an array", line_no)
    return PersonEntry(
        id=str(raw["id"]),
        name=str(raw["name"]),
        birth=birth,
        death=death,
        description=str(raw.get("description") or ""),
        aliases=tuple(str(a) for a in aliases),
    )


def read_person_entries(source: IO[str] | str) -> Iterator[PersonEntry]:
    """Yield person entries from an NDJSON dump, skipping non-person records."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as handle:
            yield from read_person_entries(handle)
        return
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        entry = parse_person_entry(line, line_no)
        if entry is not None:
            yield entry


def write_person_entries(destination: IO[str] | str, entries: Iterable[PersonEntry]) -> int:
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as handle:
            return write_person_entries(handle, entries)
    count = 0
    for e in entries:
        raw: dict = {"id": e.id, "name": e.name}
        raw["birth"] = {"date": e.birth.iso, "precision": e.birth.precision}
        if e.death is not None:
            raw["death"] = {"date": e.death.iso, "precision": e.death.precision}
        else:
            raw["death"] = "0"
        raw["description"] = e.description
        raw["aliases"] = list(e.aliases)
        destination.write(json.dumps(raw, ensure_ascii=False, separators=(",", ":")))
        destination.write("\n")
        count += 1
    return count


def normalize_name(text: str, strip_diacritics: bool = True) -> str:
    """Canonical form used for both index patterns and tweet text:
    compatibility-decompose, optionally drop combining marks, casefold,
    collapse runs of whitespace to single spaces."""
    if strip_diacritics and not text.isascii():
        decomposed = unicodedata.normalize("NFKD", text)
        text = "".join(c for c in decomposed if not unicodedata.combining(c))
    return " ".join(text.casefold().split())


def vital_status(person: PersonEntry, day: dt.date) -> str:
    """Compare a calendar day against the person's death date.

    The death interval (at its precision) is widened by one day on each
    side to absorb timezone skew between tweet timestamps and the
    knowledge base. Inside the widened interval -> DIES_ON; past it ->
    DEAD_BEFORE; before it (or no death) -> ALIVE_OR_UNKNOWN.
    """
    if person.death is None:
        return ALIVE_OR_UNKNOWN
    lo, hi = person.death.interval()
    if lo > dt.date.min:
        lo = lo - _DAY
    if hi < dt.date.max:
        hi = hi + _DAY
    if day < lo:
        return ALIVE_OR_UNKNOWN
    if day <= hi:
        return DIES_ON
    return DEAD_BEFORE


class _Automaton:
    """CSR trie over normalized patterns for the batch matcher kernel."""

    __slots__ = ("node_ptr", "trans_char", "trans_child", "terminal", "pattern_ids")

    def __init__(self, patterns: dict[str, frozenset[str]]):
        ordered = sorted(patterns)
        self.pattern_ids: tuple[frozenset[str], ...] = tuple(
            patterns[p] for p in ordered
        )
        children: list[dict[int, int]] = [{}]
        terminal: list[int] = [-1]
        for pattern_id, pattern in enumerate(ordered):
            node = 0
            for ch in pattern:
                c = ord(ch)
                nxt = children[node].get(c)
                if nxt is None:
                    nxt = len(children)
                    children[node][c] = nxt
                    children.append({})
                    terminal.append(-1)
                node = nxt
            terminal[node] = pattern_id
        n_nodes = len(children)
        counts = [len(d) for d in children]
        node_ptr = np.zeros(n_nodes + 1, dtype=np.int32)
        node_ptr[1:] = np.cumsum(counts, dtype=np.int64)
        n_trans = int(node_ptr[-1])
        trans_char = np.empty(n_trans, dtype=np.int32)
        trans_child = np.empty(n_trans, dtype=np.int32)
        pos = 0
        for d in children:
            for c in sorted(d):
                trans_char[pos] = c
                trans_child[pos] = d[c]
                pos += 1
        self.node_ptr = node_ptr
        self.trans_char = trans_char
        self.trans_child = trans_child
        self.terminal = np.array(terminal, dtype=np.int32)


# isalnum per codepoint, cached for the non-ASCII plane.
_WORD_CACHE: dict[int, bool] = {}


def _encode_buffer(buf: str) -> tuple[np.ndarray, np.ndarray]:
    """Codepoint array + word-character (alphanumeric) mask for a string."""
    cp = np.frombuffer(buf.encode("utf-32-le"), dtype=np.uint32).astype(np.int32)
    mask = (
        ((cp >= 48) & (cp <= 57))
        | ((cp >= 97) & (cp <= 122))
        | ((cp >= 65) & (cp <= 90))
    ).astype(np.uint8)
    high = np.nonzero(cp >= 128)[0]
    for idx in high:
        c = int(cp[idx])
        flag = _WORD_CACHE.get(c)
        if flag is None:
            flag = chr(c).isalnum()
            _WORD_CACHE[c] = flag
        mask[idx] = flag
    return cp, mask


@dataclass
class NameIndex:
    """Exact-lookup mapping from normalized name/alias to person ids,
    plus the compiled trie used by the anchored matcher.

    Immutable after construction; safe to share across workers.
    """

    patterns: dict[str, frozenset[str]]
    strip_diacritics: bool = True
    _automaton: _Automaton | None = field(default=None, repr=False, compare=False)

    def lookup(self, text: str) -> frozenset[str]:
        """Person ids whose name/alias equals the text after normalization."""
        return self.patterns.get(
            normalize_name(text, self.strip_diacritics), frozenset()
        )

    def __len__(self) -> int:
        return len(self.patterns)

    def automaton(self) -> _Automaton:
        if self._automaton is None:
            object.__setattr__(self, "_automaton", _Automaton(self.patterns))
        return self._automaton


def build_name_index(
    entries: Iterable[PersonEntry], strip_diacritics: bool = True
) -> NameIndex:
    """Index every entry under its name and each alias (normalized).
    Distinct people sharing a normalized pattern map to an id set."""
    acc: dict[str, set[str]] = {}
    for entry in entries:
        for name in (entry.name, *entry.aliases):
            pattern = normalize_name(name, strip_diacritics)
            if pattern:
                acc.setdefault(pattern, set()).add(entry.id)
    return NameIndex(
        patterns={p: frozenset(ids) for p, ids in acc.items()},
        strip_diacritics=strip_diacritics,
    )


def _anchor_suffixes(text: str, strip_diacritics: bool) -> list[str]:
    """Normalized text after each RIP token, skipping separator characters;
    the candidate name must start at the first alphanumeric character."""
    suffixes = []
    for _, end in rip_token_spans(text):
        norm = normalize_name(text[end:], strip_diacritics)
        i = 0
        n = len(norm)
        while i < n and not norm[i].isalnum():
            i += 1
        if i < n:
            suffixes.append(norm[i:])
    return suffixes


def match_texts(texts: Iterable[str], index: NameIndex) -> list[frozenset[str]]:
    """Match a batch of tweet texts; one id set per input text.

    A person matches when their normalized name or alias follows a RIP
    token and ends at a word boundary. At each anchor the longest
    matching pattern wins; people sharing that pattern are all returned.
    """
    auto = index.automaton()
    texts = list(texts)
    results: list[frozenset[str]] = [frozenset()] * len(texts)
    owners: list[int] = []
    suffixes: list[str] = []
    for i, text in enumerate(texts):
        if "RIP" not in text:
            continue
        for suffix in _anchor_suffixes(text, index.strip_diacritics):
            owners.append(i)
            suffixes.append(suffix)
    if not owners:
        return results
    lengths = np.fromiter((len(s) for s in suffixes), dtype=np.int64, count=len(suffixes))
    ends = np.cumsum(lengths)
    starts = ends - lengths
    buf = "".join(suffixes)
    cp, mask = _encode_buffer(buf)
    out = np.empty(len(owners), dtype=np.int32)
    BACKEND.match_batch(
        cp,
        mask,
        starts,
        ends,
        auto.node_ptr,
        auto.trans_char,
        auto.trans_child,
        auto.terminal,
        out,
    )
    merged: dict[int, frozenset[str]] = {}
    for owner, pattern_id in zip(owners, out.tolist()):
        if pattern_id >= 0:
            ids = auto.pattern_ids[pattern_id]
            prev = merged.get(owner)
            merged[owner] = ids if prev is None else prev | ids
    for owner, ids in merged.items():
        results[owner] = ids
    return results


def match_mentions(tweet: Tweet, index: NameIndex) -> frozenset[str]:
    """Person ids mentioned right after a RIP token in one tweet."""
    return match_texts([tweet.text], index)[0]


def match_stream(
    tweets: Iterable[Tweet], index: NameIndex, batch_size: int = 4096
) -> Iterator[tuple[Tweet, str]]:
    """Yield (tweet, person_id) pairs over a tweet stream, batched through
    the matcher kernel."""
    batch: list[Tweet] = []

    def flush():
        for tweet, ids in zip(batch, match_texts([t.text for t in batch], index)):
            for pid in sorted(ids):
                yield tweet, pid

    for tweet in tweets:
        batch.append(tweet)
        if len(batch) >= batch_size:
            yield from flush()
            batch = []
    if batch:
        yield from flush()
