"""Deterministic synthetic corpus generator.

Produces a death-report corpus with ground-truth labels at desk scale:
tweets mentioning invented people after an uppercase RIP keyword, a
knowledge base whose vital status agrees with each report's label, and
sidecar label files. Class signal is planted through three channels
that mirror how the real task behaves:

* text: each class owns an exclusive token inventory emitted mostly in
  the early minutes of a report, on top of a large shared vocabulary of
  neutral words, names, and pivots. A trickle of cross-class
  contamination keeps foreign tokens below any reasonable vocabulary
  cutoff in the other classes' corpora.
* per-class co-occurrence: shared pivot words are used with mildly
  class-dependent preferences, so models trained per class see the same
  surface token in different company.
* social metadata: per-tweet distributions overlap heavily, so a single
  tweet says little, but report-level aggregates separate the classes.

Everything is a pure function of (spec, seed).
"""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from ripwire.corpus.records import Timeline, Tweet, write_tweets
from ripwire.errors import ConfigurationError
from ripwire.kb import KBDate, PersonEntry, write_person_entries
from ripwire.labels import LABELS
from ripwire.reports import make_report_id, utc_day

__all__ = [
    "SynthSpec",
    "SynthReport",
    "SynthResult",
    "generate_synthetic_corpus",
    "write_corpus_files",
    "write_labels",
    "read_labels",
]

_SECONDS_PER_MINUTE = 60

_PIVOTS = (
    "dead",
    "death",
    "news",
    "sad",
    "loss",
    "peace",
    "rest",
    "legend",
    "icon",
    "gone",
    "miss",
    "tragic",
    "shock",
    "breaking",
    "confirmed",
    "report",
    "family",
    "fans",
    "tribute",
    "today",
)

# Mildly preferred pivot indices per class, in canonical label order.
_PIVOT_PREFS = (
    (13, 2, 14, 15, 0, 1, 19),
    (7, 8, 18, 6, 5, 9, 10),
    (12, 3, 11, 17, 4, 0, 2),
)

_LANGUAGES = ("es", "fr", "pt", "de", "it", "ja", "tr")

_OCCUPATIONS = (
    "singer",
    "actor",
    "politician",
    "writer",
    "athlete",
    "scientist",
    "comedian",
    "musician",
)


def _alph(i: int) -> str:
    """Lowercase letter string for index i: a..z, aa, ab, ..."""
    out = []
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        out.append(chr(97 + r))
    return "".join(reversed(out))


@dataclass(frozen=True, slots=True)
class SynthSpec:
    """Generator knobs. Per-class tuples follow canonical label order
    (real, commemoration, fake). Defaults define the benchmark corpus:
    4,007 reports over three years in the published class proportions.
    """

    n_reports: int = 4007
    class_ratio: tuple[int, int, int] = (2301, 1092, 614)
    years: tuple[int, ...] = (2012, 2013, 2014)
    day_one_mentions: tuple[int, int] = (55, 95)
    timeline_minutes: float = 400.0

    neutral_vocab: int = 2000
    class_vocab: int = 600
    first_names: int = 220
    last_names: int = 340

    neutral_tokens: tuple[int, int] = (4, 9)
    neutral_extra: tuple[int, int, int] = (0, 2, 0)
    class_token_peak: float = 0.9
    class_token_floor: float = 0.06
    class_token_decay_minutes: float = 9.0
    first_tweet_class_tokens: int = 3
    hard_text_fraction: float = 0.25
    hard_text_scale: float = 0.3
    pivot_bias: float = 0.12
    contamination_prob: float = 0.015
    contamination_cap: int = 3

    ambiguous_fraction: float = 0.02
    commemoration_reuse_fraction: float = 0.3
    distractors: int = 250
    distractor_mentions: tuple[int, int] = (5, 30)
    noise_tweets: int = 2000

    user_pool_fraction: tuple[float, float, float] = (0.85, 0.72, 0.5)
    retweet_prob: tuple[float, float, float] = (0.45, 0.41, 0.50)
    retweet_count_mean: tuple[float, float, float] = (1.8, 1.5, 1.3)
    reply_prob: tuple[float, float, float] = (0.16, 0.13, 0.21)
    link_prob: tuple[float, float, float] = (0.30, 0.26, 0.19)
    question_prob: tuple[float, float, float] = (0.10, 0.08, 0.26)
    exclaim_prob: tuple[float, float, float] = (0.29, 0.38, 0.33)
    picture_prob: tuple[float, float, float] = (0.17, 0.25, 0.11)
    hashtag_prob: tuple[float, float, float] = (0.15, 0.23, 0.18)
    mention_prob: tuple[float, float, float] = (0.11, 0.09, 0.18)
    nonenglish_prob: tuple[float, float, float] = (0.20, 0.10, 0.05)
    followers_log_mean: tuple[float, float, float] = (2.55, 2.5, 2.4)
    following_log_mean: tuple[float, float, float] = (2.25, 2.25, 2.38)
    log_sigma: float = 0.8

    def __post_init__(self):
        if self.n_reports < 1:
            raise ConfigurationError("n_reports must be >= 1")
        if len(self.class_ratio) != len(LABELS) or any(
            r < 0 for r in self.class_ratio
        ):
            raise ConfigurationError("class_ratio needs one non-negative weight per class")
        if sum(self.class_ratio) == 0:
            raise ConfigurationError("class_ratio must have positive mass")
        if self.class_vocab < 1 or self.neutral_vocab < 1:
            raise ConfigurationError("every class needs a non-empty vocabulary")
        if not self.years or list(self.years) != sorted(set(self.years)):
            raise ConfigurationError("years must be a sorted set of distinct years")
        lo, hi = self.day_one_mentions
        if lo < 1 or hi < lo:
            raise ConfigurationError("day_one_mentions bounds are inverted")
        if self.timeline_minutes <= 0:
            raise ConfigurationError("timeline_minutes must be positive")
        if not (0 <= self.hard_text_fraction <= 1):
            raise ConfigurationError("hard_text_fraction must be in [0, 1]")


@dataclass(frozen=True, slots=True)
class SynthReport:
    """Ground truth for one generated report."""

    report_id: str
    label: str
    person_ids: tuple[str, ...]
    first_day: dt.date
    timeline: Timeline


@dataclass(frozen=True, slots=True)
class SynthResult:
    reports: tuple[SynthReport, ...]
    people: tuple[PersonEntry, ...]
    tweets: tuple[Tweet, ...] = field(repr=False)
    stats: dict


@dataclass(slots=True)
class _Vocab:
    neutral: tuple[str, ...]
    class_tokens: tuple[tuple[str, ...], ...]
    first_names: tuple[str, ...]
    last_names: tuple[str, ...]
    hashtags: tuple[str, ...]


def _build_vocab(spec: SynthSpec) -> _Vocab:
    prefixes = ("rl", "cm", "fk")
    return _Vocab(
        neutral=tuple("wd" + _alph(i) for i in range(spec.neutral_vocab)),
        class_tokens=tuple(
            tuple(prefix + _alph(i) for i in range(spec.class_vocab))
            for prefix in prefixes
        ),
        first_names=tuple("An" + _alph(i) for i in range(spec.first_names)),
        last_names=tuple("Sur" + _alph(i) for i in range(spec.last_names)),
        hashtags=tuple("tg" + _alph(i) for i in range(60)),
    )


def _apportion(total: int, weights: tuple[int, ...]) -> list[int]:
    """Largest-remainder apportionment; exact when total == sum(weights)."""
    mass = sum(weights)
    shares = [total * w / mass for w in weights]
    counts = [int(s) for s in shares]
    order = sorted(
        range(len(weights)), key=lambda i: (counts[i] - shares[i], i)
    )
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


@dataclass(slots=True)
class _Plan:
    label_idx: int
    year: int
    t0: int
    first_day: dt.date
    hard: bool
    ambiguous: bool
    person_ids: tuple[str, ...] = ()
    mention: str = ""


def _plan_reports(spec: SynthSpec, rng: np.random.Generator) -> list[_Plan]:
    per_class = _apportion(spec.n_reports, tuple(spec.class_ratio))
    plans: list[_Plan] = []
    year_weights = tuple(1 for _ in spec.years)
    for label_idx, count in enumerate(per_class):
        per_year = _apportion(count, year_weights)
        for year, year_count in zip(spec.years, per_year):
            start = dt.datetime(year, 1, 1, tzinfo=dt.timezone.utc)
            for _ in range(year_count):
                day = int(rng.integers(0, 365))
                hour = int(rng.integers(0, 17))
                minute = int(rng.integers(0, 60))
                second = int(rng.integers(0, 60))
                t0 = int(start.timestamp()) + day * 86400 + hour * 3600
                t0 += minute * 60 + second
                plans.append(
                    _Plan(
                        label_idx=label_idx,
                        year=year,
                        t0=t0,
                        first_day=utc_day(t0),
                        hard=bool(rng.random() < spec.hard_text_fraction),
                        ambiguous=bool(rng.random() < spec.ambiguous_fraction),
                    )
                )
    return plans


class _People:
    """Person factory handing out unique ids and unique name pairs."""

    def __init__(self, vocab: _Vocab, rng: np.random.Generator):
        self._vocab = vocab
        self._rng = rng
        self._used: set[int] = set()
        self._serial = 0
        self._alias_serial = 0
        self.entries: list[PersonEntry] = []

    def _display_name(self) -> str:
        total = len(self._vocab.first_names) * len(self._vocab.last_names)
        while True:
            combo = int(self._rng.integers(0, total))
            if combo not in self._used:
                self._used.add(combo)
                break
        first = self._vocab.first_names[combo % len(self._vocab.first_names)]
        last = self._vocab.last_names[combo // len(self._vocab.first_names)]
        return f"{first} {last}"

    def next_alias(self) -> str:
        alias = "Zamb" + _alph(self._alias_serial)
        self._alias_serial += 1
        return alias

    def create(
        self,
        birth: KBDate,
        death: KBDate | None,
        description: str,
        aliases: tuple[str, ...] = (),
    ) -> PersonEntry:
        person = PersonEntry(
            id=f"p{self._serial:05d}",
            name=self._display_name(),
            birth=birth,
            death=death,
            description=description,
            aliases=aliases,
        )
        self._serial += 1
        self.entries.append(person)
        return person


def _birth_for(rng: np.random.Generator, anchor_year: int) -> KBDate:
    age = int(rng.integers(42, 96))
    month = int(rng.integers(1, 13))
    day = int(rng.integers(1, 29))
    return KBDate(f"{anchor_year - age:04d}-{month:02d}-{day:02d}", 11)


def _historical_death(
    rng: np.random.Generator, report_day: dt.date
) -> KBDate:
    """A death safely before the report day at a random precision."""
    roll = float(rng.random())
    if roll < 0.55:
        delta = int(rng.integers(90, 14600))
        day = report_day - dt.timedelta(days=delta)
        return KBDate(day.isoformat(), 11)
    if roll < 0.75:
        delta = int(rng.integers(150, 14600))
        day = report_day - dt.timedelta(days=delta)
        return KBDate(f"{day.year:04d}-{day.month:02d}-01", 10)
    years_back = int(rng.integers(2, 46))
    return KBDate(f"{report_day.year - years_back:04d}-01-01", 9)


def _assign_persons(
    spec: SynthSpec, rng: np.random.Generator, plans: list[_Plan], people: _People
) -> None:
    """Fill person ids and the mention string for every plan. Some
    commemorations reuse a person from an earlier real report."""
    real_plans: list[tuple[dt.date, str]] = []
    for plan in plans:
        if plan.label_idx != 0:
            continue
        occupation = _OCCUPATIONS[int(rng.integers(0, len(_OCCUPATIONS)))]
        death = KBDate(plan.first_day.isoformat(), 11)
        birth = _birth_for(rng, plan.first_day.year)
        if plan.ambiguous:
            alias = people.next_alias()
            a = people.create(birth, death, occupation, (alias,))
            b = people.create(
                _birth_for(rng, plan.first_day.year), death, occupation, (alias,)
            )
            plan.person_ids = (a.id, b.id)
            plan.mention = alias
        else:
            person = people.create(birth, death, occupation)
            plan.person_ids = (person.id,)
            plan.mention = person.name
            real_plans.append((plan.first_day, person.id))
    real_plans.sort()
    reused: set[str] = set()
    person_by_id = {p.id: p for p in people.entries}

    for plan in plans:
        if plan.label_idx != 1:
            continue
        occupation = _OCCUPATIONS[int(rng.integers(0, len(_OCCUPATIONS)))]
        if plan.ambiguous:
            alias = people.next_alias()
            death_a = _historical_death(rng, plan.first_day)
            death_b = _historical_death(rng, plan.first_day)
            a = people.create(_birth_for(rng, 2000), death_a, occupation, (alias,))
            b = people.create(_birth_for(rng, 2000), death_b, occupation, (alias,))
            plan.person_ids = (a.id, b.id)
            plan.mention = alias
            continue
        cutoff_day = plan.first_day - dt.timedelta(days=30)
        eligible = [
            pid
            for day, pid in real_plans
            if day <= cutoff_day and pid not in reused
        ]
        if eligible and rng.random() < spec.commemoration_reuse_fraction:
            pid = eligible[int(rng.integers(0, len(eligible)))]
            reused.add(pid)
            plan.person_ids = (pid,)
            plan.mention = person_by_id[pid].name
        else:
            death = _historical_death(rng, plan.first_day)
            person = people.create(_birth_for(rng, 2000), death, occupation)
            plan.person_ids = (person.id,)
            plan.mention = person.name

    for plan in plans:
        if plan.label_idx != 2:
            continue
        occupation = _OCCUPATIONS[int(rng.integers(0, len(_OCCUPATIONS)))]
        birth_year = int(rng.integers(1935, 1997))
        birth = KBDate(
            f"{birth_year:04d}-{int(rng.integers(1, 13)):02d}-"
            f"{int(rng.integers(1, 29)):02d}",
            11,
        )
        if plan.ambiguous:
            alias = people.next_alias()
            a = people.create(birth, None, occupation, (alias,))
            b = people.create(_birth_for(rng, 2005), None, occupation, (alias,))
            plan.person_ids = (a.id, b.id)
            plan.mention = alias
        else:
            person = people.create(birth, None, occupation)
            plan.person_ids = (person.id,)
            plan.mention = person.name


def _contamination_budgets(
    spec: SynthSpec, rng: np.random.Generator
) -> dict[tuple[int, int, int], int]:
    """Remaining foreign-token insertions per (destination class, source
    class, token). Capped so foreign tokens stay rare in every class."""
    budgets = {}
    for dst in range(len(LABELS)):
        for src in range(len(LABELS)):
            if src == dst:
                continue
            caps = rng.integers(0, spec.contamination_cap + 1, spec.class_vocab)
            for tok in range(spec.class_vocab):
                budgets[dst, src, tok] = int(caps[tok])
    return budgets


def _arrival_offsets(
    spec: SynthSpec, rng: np.random.Generator, n: int
) -> np.ndarray:
    """Seconds after t0 for each tweet; front-loaded, first tweet at 0."""
    offsets = np.zeros(n)
    if n > 1:
        horizon = spec.timeline_minutes * _SECONDS_PER_MINUTE
        kind = rng.random(n - 1)
        early = rng.exponential(8 * _SECONDS_PER_MINUTE, n - 1)
        mid = rng.random(n - 1) * min(90 * _SECONDS_PER_MINUTE, horizon)
        late_lo = min(90 * _SECONDS_PER_MINUTE, horizon)
        late = late_lo + rng.random(n - 1) * (horizon - late_lo)
        rest = np.where(
            kind < 0.55,
            np.minimum(early, horizon),
            np.where(kind < 0.85, mid, late),
        )
        rest = np.maximum(rest, 5.0)
        rest.sort()
        offsets[1:] = rest
    return offsets


class _Serials:
    """Monotonic counters for tweet ids, user ids, and link slugs."""

    def __init__(self):
        self.tweet = 0
        self.user = 0
        self.link = 0

    def tweet_id(self) -> str:
        self.tweet += 1
        return f"s{self.tweet:08d}"


def _emit_report_tweets(
    spec: SynthSpec,
    rng: np.random.Generator,
    vocab: _Vocab,
    plan: _Plan,
    serials: _Serials,
    budgets: dict[tuple[int, int, int], int],
) -> list[Tweet]:
    li = plan.label_idx
    lo, hi = spec.day_one_mentions
    n = int(rng.integers(lo, hi + 1))
    offsets = _arrival_offsets(spec, rng, n)
    timestamps = plan.t0 + offsets.astype(np.int64)

    pool = max(2, int(round(n * spec.user_pool_fraction[li])))
    followers = np.maximum(
        0, (10 ** rng.normal(spec.followers_log_mean[li], spec.log_sigma, pool))
    ).astype(np.int64)
    following = np.maximum(
        0, (10 ** rng.normal(spec.following_log_mean[li], spec.log_sigma, pool))
    ).astype(np.int64)
    user_idx = rng.integers(0, pool, n)
    user_base = serials.user
    serials.user += pool

    decay = spec.class_token_decay_minutes * _SECONDS_PER_MINUTE
    emission = spec.class_token_floor + (
        spec.class_token_peak - spec.class_token_floor
    ) * np.exp(-offsets / decay)
    if plan.hard:
        emission = emission * spec.hard_text_scale
    has_class = rng.random(n) < emission
    class_pick = rng.integers(0, spec.class_vocab, n)

    extra = spec.neutral_extra[li]
    n_neutral = rng.integers(
        spec.neutral_tokens[0] + extra, spec.neutral_tokens[1] + extra + 1, n
    )
    neutral_pick = rng.integers(0, spec.neutral_vocab, int(n_neutral.sum()))
    neutral_edges = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(n_neutral, out=neutral_edges[1:])

    n_pivot = rng.integers(1, 3, n)
    pivot_pick = rng.integers(0, len(_PIVOTS), (n, 2))
    biased_pick = rng.integers(0, len(_PIVOT_PREFS[li]), (n, 2))
    pivot_biased = rng.random((n, 2)) < spec.pivot_bias

    contam = rng.random(n) < spec.contamination_prob
    contam_src = rng.integers(0, len(LABELS) - 1, n)
    contam_pick = rng.integers(0, spec.class_vocab, n)

    is_retweet = rng.random(n) < spec.retweet_prob[li]
    retweet_count = rng.poisson(spec.retweet_count_mean[li], n)
    is_reply = rng.random(n) < spec.reply_prob[li]
    has_link = rng.random(n) < spec.link_prob[li]
    has_question = rng.random(n) < spec.question_prob[li]
    has_exclaim = rng.random(n) < spec.exclaim_prob[li]
    has_picture = rng.random(n) < spec.picture_prob[li]
    has_hashtag = rng.random(n) < spec.hashtag_prob[li]
    hashtag_pick = rng.integers(0, len(vocab.hashtags), n)
    has_mention = rng.random(n) < spec.mention_prob[li]
    non_english = rng.random(n) < spec.nonenglish_prob[li]
    language_pick = rng.integers(0, len(_LANGUAGES), n)

    first_k = spec.first_tweet_class_tokens if not plan.hard else 1
    first_class = rng.integers(0, spec.class_vocab, max(first_k, 1))

    class_tokens = vocab.class_tokens[li]
    tweets = []
    for i in range(n):
        parts = ["RIP", plan.mention]
        for j in range(int(n_pivot[i])):
            if pivot_biased[i, j]:
                parts.append(_PIVOTS[_PIVOT_PREFS[li][biased_pick[i, j]]])
            else:
                parts.append(_PIVOTS[pivot_pick[i, j]])
        if i == 0:
            for j in range(first_k):
                parts.append(class_tokens[int(first_class[j])])
        elif has_class[i]:
            parts.append(class_tokens[int(class_pick[i])])
        if contam[i]:
            src = int(contam_src[i])
            if src >= li:
                src += 1
            key = (li, src, int(contam_pick[i]))
            if budgets[key] > 0:
                budgets[key] -= 1
                parts.append(vocab.class_tokens[src][int(contam_pick[i])])
        start, end = int(neutral_edges[i]), int(neutral_edges[i + 1])
        parts.extend(vocab.neutral[k] for k in neutral_pick[start:end])
        if has_link[i]:
            serials.link += 1
            parts.append(f"http://ln.example/{_alph(serials.link)}")
        if has_question[i]:
            parts.append("??")
        if has_exclaim[i]:
            parts.append("!!")
        u = int(user_idx[i])
        tweets.append(
            Tweet(
                id=serials.tweet_id(),
                timestamp=int(timestamps[i]),
                text=" ".join(parts),
                user_id=f"u{user_base + u}",
                followers=int(followers[u]),
                following=int(following[u]),
                is_retweet=bool(is_retweet[i]),
                retweet_count=int(retweet_count[i]),
                is_reply=bool(is_reply[i]),
                hashtags=frozenset(
                    (vocab.hashtags[int(hashtag_pick[i])],) if has_hashtag[i] else ()
                ),
                mentions=frozenset(
                    (f"m{int(user_idx[i])}",) if has_mention[i] else ()
                ),
                link_count=int(has_link[i]),
                picture_count=int(has_picture[i]),
                language=_LANGUAGES[int(language_pick[i])]
                if non_english[i]
                else "en",
            )
        )
    return tweets


def _emit_distractors(
    spec: SynthSpec,
    rng: np.random.Generator,
    vocab: _Vocab,
    people: _People,
    serials: _Serials,
) -> list[Tweet]:
    """Sub-threshold mentions: real people, too few tweets to report."""
    tweets = []
    year_starts = [
        int(dt.datetime(y, 1, 1, tzinfo=dt.timezone.utc).timestamp())
        for y in spec.years
    ]
    for _ in range(spec.distractors):
        if rng.random() < 0.5:
            death = None
        else:
            death = _historical_death(rng, dt.date(spec.years[0], 1, 1))
        person = people.create(
            _birth_for(rng, 2000),
            death,
            _OCCUPATIONS[int(rng.integers(0, len(_OCCUPATIONS)))],
        )
        t0 = year_starts[int(rng.integers(0, len(year_starts)))]
        t0 += int(rng.integers(0, 365)) * 86400 + int(rng.integers(0, 17)) * 3600
        k = int(rng.integers(spec.distractor_mentions[0], spec.distractor_mentions[1] + 1))
        offs = np.sort(rng.random(k)) * spec.timeline_minutes * _SECONDS_PER_MINUTE
        pivots = rng.integers(0, len(_PIVOTS), k)
        n_neutral = rng.integers(3, 8, k)
        for i in range(k):
            words = [
                "RIP",
                person.name,
                _PIVOTS[int(pivots[i])],
            ]
            words.extend(
                vocab.neutral[int(w)]
                for w in rng.integers(0, spec.neutral_vocab, int(n_neutral[i]))
            )
            tweets.append(
                Tweet(
                    id=serials.tweet_id(),
                    timestamp=t0 + int(offs[i]),
                    text=" ".join(words),
                    user_id=f"u{serials.user + i}",
                    followers=int(10 ** rng.normal(2.3, spec.log_sigma)),
                    following=int(10 ** rng.normal(2.3, spec.log_sigma)),
                    is_retweet=bool(rng.random() < 0.4),
                    retweet_count=int(rng.poisson(1.0)),
                    is_reply=bool(rng.random() < 0.2),
                    hashtags=frozenset(),
                    mentions=frozenset(),
                    link_count=int(rng.random() < 0.3),
                    picture_count=0,
                    language="en",
                )
            )
        serials.user += k
    return tweets


def _emit_noise(
    spec: SynthSpec,
    rng: np.random.Generator,
    vocab: _Vocab,
    serials: _Serials,
) -> list[Tweet]:
    """Tweets the keyword filter must reject: lowercase rip or no
    keyword at all."""
    tweets = []
    year_starts = [
        int(dt.datetime(y, 1, 1, tzinfo=dt.timezone.utc).timestamp())
        for y in spec.years
    ]
    for i in range(spec.noise_tweets):
        words = []
        if i % 2 == 0:
            words.append("rip" if i % 4 == 0 else "Rip")
        words.extend(
            vocab.neutral[int(w)]
            for w in rng.integers(0, spec.neutral_vocab, int(rng.integers(4, 10)))
        )
        ts = year_starts[int(rng.integers(0, len(year_starts)))]
        ts += int(rng.integers(0, 365 * 86400))
        tweets.append(
            Tweet(
                id=serials.tweet_id(),
                timestamp=ts,
                text=" ".join(words),
                user_id=f"u{serials.user}",
                followers=int(10 ** rng.normal(2.3, spec.log_sigma)),
                following=int(10 ** rng.normal(2.3, spec.log_sigma)),
                is_retweet=False,
                retweet_count=0,
                is_reply=False,
                hashtags=frozenset(),
                mentions=frozenset(),
                link_count=0,
                picture_count=0,
                language="en",
            )
        )
        serials.user += 1
    return tweets


def generate_synthetic_corpus(spec: SynthSpec, seed: int) -> SynthResult:
    """Build the full corpus: labeled reports, knowledge base, and the
    raw tweet stream (reports plus sub-threshold distractors plus
    keyword noise). Deterministic for fixed (spec, seed)."""
    rng = np.random.default_rng(seed)
    vocab = _build_vocab(spec)
    plans = _plan_reports(spec, rng)
    people = _People(vocab, rng)
    _assign_persons(spec, rng, plans, people)
    budgets = _contamination_budgets(spec, rng)
    serials = _Serials()

    reports = []
    all_tweets: list[Tweet] = []
    for plan in plans:
        tweets = _emit_report_tweets(spec, rng, vocab, plan, serials, budgets)
        all_tweets.extend(tweets)
        timeline = Timeline.from_tweets(tweets)
        reports.append(
            SynthReport(
                report_id=make_report_id(plan.person_ids, plan.first_day),
                label=LABELS[plan.label_idx],
                person_ids=tuple(sorted(plan.person_ids)),
                first_day=plan.first_day,
                timeline=timeline,
            )
        )
    all_tweets.extend(_emit_distractors(spec, rng, vocab, people, serials))
    all_tweets.extend(_emit_noise(spec, rng, vocab, serials))
    all_tweets.sort(key=lambda t: (t.timestamp, t.id))
    reports.sort(key=lambda r: (r.first_day, r.report_id))

    class_counts = {label: 0 for label in LABELS}
    for report in reports:
        class_counts[report.label] += 1
    stats = {
        "reports": len(reports),
        "class_counts": class_counts,
        "people": len(people.entries),
        "tweets": len(all_tweets),
        "report_tweets": sum(len(r.timeline) for r in reports),
    }
    return SynthResult(
        reports=tuple(reports),
        people=tuple(people.entries),
        tweets=tuple(all_tweets),
        stats=stats,
    )


def write_labels(destination: IO[str] | str, labels: Iterable[tuple[str, str]]) -> int:
    """Sidecar file: report_id<TAB>label, sorted by report id."""
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as handle:
            return write_labels(handle, labels)
    count = 0
    for report_id, label in sorted(labels):
        destination.write(f"{report_id}\t{label}\n")
        count += 1
    return count


def read_labels(source: IO[str] | str) -> dict[str, str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as handle:
            return read_labels(handle)
    labels = {}
    for line in source:
        line = line.rstrip("\n")
        if not line:
            continue
        report_id, _, label = line.partition("\t")
        labels[report_id] = label
    return labels


def write_corpus_files(
    result: SynthResult,
    tweets_path: str,
    kb_path: str,
    labels_path: str,
) -> dict:
    """Emit the stream, knowledge base, and label sidecar."""
    write_tweets(tweets_path, result.tweets)
    write_person_entries(kb_path, result.people)
    write_labels(labels_path, ((r.report_id, r.label) for r in result.reports))
    return dict(result.stats)
