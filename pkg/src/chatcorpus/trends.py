"""Keyword prevalence over time, period comparisons, hourly profiles, falsification trends."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from typing import Sequence

from chatcorpus.activity import DEFAULT_TZ, word_count
from chatcorpus.cascades import reply_counts, resolve_replies, virality_ours
from chatcorpus.model import Corpus, Message, local_time
from chatcorpus.stats import DegenerateDataError, OlsFit, ols, welch_t
from chatcorpus.text import tokenize

GRANULARITIES = ("message", "group", "user")
PERIOD_METRICS = ("text_words", "text_chars", "audio_seconds", "video_seconds",
                  "messages_per_user_day", "replies_per_message", "cascade_virality",
                  "keyword_share")
TREND_METRICS = ("text_words", "text_chars", "audio_seconds", "video_seconds")
NOCTURNAL_END_HOUR = 5


@dataclass(frozen=True)
class DailyPoint:
    day: date
    numerator: int
    denominator: int

    @property
    def value(self) -> float:
        return self.numerator / self.denominator


@dataclass
class DailySeries:
    granularity: str
    points: list[DailyPoint]

    def values(self) -> list[float]:
        return [p.value for p in self.points]

    def rows(self) -> list[dict]:
        return [{"date": p.day.isoformat(), "value": p.value, "numerator": p.numerator,
                 "denominator": p.denominator} for p in self.points]


def _matches(tokens: Sequence[str], stems: Sequence[str]) -> bool:
    return any(t.startswith(s) for t in tokens for s in stems)


def keyword_daily_share(corpus: Corpus, stems: Sequence[str], granularity: str = "message",
                        min_words: int = 5, tz_offset: float = DEFAULT_TZ) -> DailySeries:
    """Daily share of texts, active groups, or texting users that mention any stem.

    Only text messages with at least ``min_words`` words qualify. Stems match
    stemmed tokens by prefix. Days without a denominator are left out.
    """
    if not stems:
        raise ValueError("need at least one stem")
    if granularity not in GRANULARITIES:
        raise ValueError(f"granularity must be one of {GRANULARITIES}")
    stems = [s.lower() for s in stems]
    denom: dict[date, set] = defaultdict(set)
    hits: dict[date, set] = defaultdict(set)
    for m in corpus.messages:
        day = local_time(m.sent_time, tz_offset).date()
        qualifies = m.kind == "text" and word_count(m.text) >= min_words
        if granularity == "group":
            denom[day].add(m.group_uid)
        elif qualifies:
            denom[day].add(m.id if granularity == "message" else m.sender)
        if qualifies and _matches(tokenize(m.text), stems):
            key = {"message": m.id, "group": m.group_uid, "user": m.sender}[granularity]
            hits[day].add(key)
    points = [DailyPoint(d, len(hits[d]), len(denom[d])) for d in sorted(denom) if denom[d]]
    return DailySeries(granularity, points)


@dataclass(frozen=True)
class PeriodComparison:
    metric: str
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int
    t: float
    dof: float
    p: float

    def as_row(self) -> dict:
        return {"metric": self.metric, "mean_a": self.mean_a, "mean_b": self.mean_b,
                "n_a": self.n_a, "n_b": self.n_b, "t": self.t, "dof": self.dof, "p": self.p}


Period = tuple[date, date]


def _in(d: date, period: Period) -> bool:
    return period[0] <= d <= period[1]


def _observations(corpus: Corpus, metric: str, period: Period, tz_offset: float,
                  forwarded: bool | None, stems: Sequence[str] | None) -> list[float]:
    def day_of(m: Message) -> date:
        return local_time(m.sent_time, tz_offset).date()

    def keep(m: Message) -> bool:
        return _in(day_of(m), period) and (forwarded is None or m.forwarded == forwarded)

    if metric in ("text_words", "text_chars"):
        fn = word_count if metric == "text_words" else len
        return [float(fn(m.text)) for m in corpus.messages
                if m.kind == "text" and m.text and keep(m)]
    if metric in ("audio_seconds", "video_seconds"):
        kind = metric.split("_")[0]
        return [float(m.media_duration_s) for m in corpus.messages
                if m.kind == kind and m.media_duration_s is not None and keep(m)]
    if metric == "messages_per_user_day":
        c = Counter((m.sender, day_of(m)) for m in corpus.messages if keep(m))
        return [float(v) for _, v in sorted(c.items(), key=lambda kv: (kv[0][0].e164, kv[0][1]))]
    if metric == "replies_per_message":
        counts = reply_counts(corpus)
        return [float(counts.get(m.id, 0)) for m in corpus.messages if keep(m)]
    if metric == "cascade_virality":
        cascades, _ = resolve_replies(corpus)
        by_id = corpus.by_id
        return [virality_ours(g) for g in cascades if keep(by_id[g.root])]
    if metric == "keyword_share":
        if not stems:
            raise ValueError("keyword_share needs stems")
        series = keyword_daily_share(corpus, stems, "message", tz_offset=tz_offset)
        return [p.value for p in series.points if _in(p.day, period)]
    raise ValueError(f"unknown metric {metric!r}; expected one of {PERIOD_METRICS}")


def period_compare(corpus: Corpus, period_a: Period, period_b: Period, metric: str,
                   tz_offset: float = DEFAULT_TZ, forwarded: bool | None = None,
                   stems: Sequence[str] | None = None) -> PeriodComparison:
    """Welch comparison of a per-observation metric between two inclusive date ranges."""
    for p in (period_a, period_b):
        if p[0] > p[1]:
            raise ValueError(f"period {p[0]}..{p[1]} is reversed")
    if period_a[0] <= period_b[1] and period_b[0] <= period_a[1]:
        raise ValueError("periods overlap")
    a = _observations(corpus, metric, period_a, tz_offset, forwarded, stems)
    b = _observations(corpus, metric, period_b, tz_offset, forwarded, stems)
    for name, obs in (("A", a), ("B", b)):
        if not obs:
            raise DegenerateDataError(f"period {name} has no {metric} observations")
    t, dof, p = welch_t(a, b)
    return PeriodComparison(metric, sum(a) / len(a), sum(b) / len(b), len(a), len(b), t, dof, p)


@dataclass(frozen=True)
class HourlyProfile:
    bucket_minutes: int
    counts: list[int]
    nocturnal: int

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def proportions(self) -> list[float]:
        n = self.total
        return [c / n if n else 0.0 for c in self.counts]

    @property
    def nocturnal_share(self) -> float:
        return self.nocturnal / self.total if self.total else 0.0

    @property
    def daytime_share(self) -> float:
        return (self.total - self.nocturnal) / self.total if self.total else 0.0

    def rows(self) -> list[dict]:
        out = []
        for i, p in enumerate(self.proportions):
            start = i * self.bucket_minutes
            out.append({"bucket_start": f"{start // 60:02d}:{start % 60:02d}", "proportion": p})
        return out


def hourly_profile(corpus: Corpus, countries: Sequence[str] | None = None,
                   day_class: str | None = None, bucket_minutes: int = 60,
                   tz_offset: float = DEFAULT_TZ) -> HourlyProfile:
    """Distribution of local sending time over the day.

    ``countries`` filters by sender country tag; ``day_class`` is weekday,
    weekend (Saturday and Sunday) or None for both.
    """
    if bucket_minutes not in (30, 60):
        raise ValueError("bucket_minutes must be 30 or 60")
    if day_class not in (None, "weekday", "weekend"):
        raise ValueError("day_class must be weekday or weekend")
    counts = [0] * (24 * 60 // bucket_minutes)
    nocturnal = 0
    for m in corpus.messages:
        if countries is not None and m.sender.country.tag not in countries:
            continue
        t = local_time(m.sent_time, tz_offset)
        weekend = t.weekday() >= 5
        if day_class == "weekday" and weekend or day_class == "weekend" and not weekend:
            continue
        counts[(t.hour * 60 + t.minute) // bucket_minutes] += 1
        if t.hour < NOCTURNAL_END_HOUR:
            nocturnal += 1
    return HourlyProfile(bucket_minutes, counts, nocturnal)


def corpus_origin(corpus: Corpus, tz_offset: float = DEFAULT_TZ) -> datetime:
    """Local midnight of the first sending day, as a UTC instant."""
    first = min(m.sent_time for m in corpus.messages)
    day = local_time(first, tz_offset).date()
    return datetime.combine(day, time(0), timezone.utc) - timedelta(hours=tz_offset)


def falsification_trend(corpus: Corpus, metric: str = "text_words", tz_offset: float = DEFAULT_TZ,
                        forwarded: bool | None = None) -> OlsFit:
    """OLS of a per-message length metric on seconds elapsed since the corpus start."""
    if metric not in TREND_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {TREND_METRICS}")
    if not corpus.messages:
        raise DegenerateDataError("empty corpus")
    origin = corpus_origin(corpus, tz_offset)
    xs, ys = [], []
    for m in corpus.messages:
        if forwarded is not None and m.forwarded != forwarded:
            continue
        if metric in ("text_words", "text_chars"):
            if m.kind != "text" or not m.text:
                continue
            y = word_count(m.text) if metric == "text_words" else len(m.text)
        else:
            if m.kind != metric.split("_")[0] or m.media_duration_s is None:
                continue
            y = m.media_duration_s
        xs.append((m.sent_time - origin).total_seconds())
        ys.append(float(y))
    if len(xs) < 3:
        raise DegenerateDataError(f"need at least 3 observations, got {len(xs)}")
    if min(xs) == max(xs):
        raise DegenerateDataError("all observations share one timestamp")
    return ols({"elapsed_s": xs}, ys)


def user_day_activity(corpus: Corpus, tz_offset: float = DEFAULT_TZ) -> list[dict]:
    c = Counter((m.sender, local_time(m.sent_time, tz_offset).date()) for m in corpus.messages)
    return [{"user": str(u), "date": d.isoformat(), "messages": n}
            for (u, d), n in sorted(c.items(), key=lambda kv: (kv[0][0].e164, kv[0][1]))]
