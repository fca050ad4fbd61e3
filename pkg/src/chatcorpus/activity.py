"""Group activity, message concentration and inequality, message lengths, reshared media."""

from __future__ import annotations

import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime

from chatcorpus.graphs import build_group_graph, nearest_rank
from chatcorpus.membership import CountryDistribution, entropy
from chatcorpus.model import Corpus, Message, local_time

DEFAULT_TZ = -5.0


@dataclass(frozen=True)
class ShareDistribution:
    counts: dict
    total: int

    @classmethod
    def from_counts(cls, counts) -> "ShareDistribution":
        counts = {k: int(v) for k, v in dict(counts).items()}
        if not counts or any(v <= 0 for v in counts.values()):
            raise ValueError("share distribution needs positive counts")
        return cls(counts, sum(counts.values()))

    @classmethod
    def of_group(cls, corpus: Corpus, group_uid: str) -> "ShareDistribution":
        return cls.from_counts(Counter(m.sender for m in corpus.group_messages(group_uid)))

    def shares(self) -> list[float]:
        return [c / self.total for c in self.counts.values()]


def activity_rate(corpus: Corpus, group_uid: str, tz_offset: float = DEFAULT_TZ) -> float:
    """Messages per day over the inclusive local-calendar span of the group."""
    msgs = corpus.group_messages(group_uid)
    if not msgs:
        raise ValueError(f"group {group_uid} has no messages")
    days = [local_time(m.sent_time, tz_offset).date() for m in msgs]
    span = (max(days) - min(days)).days + 1
    return len(msgs) / span


def hh_concentration(d: ShareDistribution) -> float:
    return sum(s * s for s in d.shares())


def top5_concentration(d: ShareDistribution) -> float:
    return sum(sorted(d.counts.values(), reverse=True)[:5]) / d.total


def gini(d: ShareDistribution) -> float:
    xs = sorted(d.counts.values())
    n = len(xs)
    return sum((2 * i - n - 1) * x for i, x in enumerate(xs, 1)) / (n * d.total)


def lorenz_curve(d: ShareDistribution) -> list[tuple[float, float]]:
    """Points (population share, message share) from (0, 0) to (1, 1)."""
    xs = sorted(d.counts.values())
    n = len(xs)
    pts = [(0.0, 0.0)]
    acc = 0
    for i, x in enumerate(xs, 1):
        acc += x
        pts.append((i / n, acc / d.total))
    return pts


def group_concentration_table(corpus: Corpus, tz_offset: float = DEFAULT_TZ) -> list[dict]:
    rows = []
    for uid in sorted(corpus.groups):
        if not corpus.by_group[uid]:
            continue
        d = ShareDistribution.of_group(corpus, uid)
        rows.append({
            "group_uid": uid,
            "activity": activity_rate(corpus, uid, tz_offset),
            "hh": hh_concentration(d),
            "top5": top5_concentration(d),
            "gini": gini(d),
        })
    return rows


def word_count(text: str | None) -> int:
    return len(text.split()) if text else 0


def char_count(text: str | None) -> int:
    return len(text) if text else 0


PERCENTILES = (10, 25, 50, 75, 90)


def _summary(values: list[float]) -> dict:
    if not values:
        return {"n": 0}
    ordered = sorted(values)
    out = {"n": len(values), "mean": statistics.fmean(values)}
    for p in PERCENTILES:
        out[f"p{p}"] = nearest_rank(ordered, p)
    return out


def length_stats(corpus: Corpus, kind: str | None = None, forwarded: bool | None = None) -> list[dict]:
    """Length summaries per (kind, forwarded) cell.

    Words and characters for texts (captions included), seconds for audio and
    video. Empty texts are left out of the word and character summaries.
    """
    cells: dict[tuple, dict[str, list]] = defaultdict(lambda: defaultdict(list))
    for m in corpus.messages:
        if kind is not None and m.kind != kind:
            continue
        if forwarded is not None and m.forwarded != forwarded:
            continue
        cell = cells[(m.kind, m.forwarded)]
        if m.text:
            cell["words"].append(word_count(m.text))
            cell["chars"].append(char_count(m.text))
        if m.kind in ("audio", "video") and m.media_duration_s is not None:
            cell["seconds"].append(m.media_duration_s)
    rows = []
    for (k, fwd), metrics in sorted(cells.items()):
        for metric in ("words", "chars", "seconds"):
            if metrics.get(metric):
                rows.append({"kind": k, "forwarded": fwd, "metric": metric,
                             **_summary(metrics[metric])})
    return rows


@dataclass(frozen=True)
class ReshareRecord:
    media_hash: str
    kind: str
    n_shares: int
    first_group_uid: str
    first_time: datetime
    last_time: datetime
    span_hours: float
    duration_s: int | None = None


def _media_identity(m: Message):
    if m.kind == "video":
        return (m.media_hash, m.media_duration_s)
    return (m.media_hash, None)


def reshares(corpus: Corpus, kind: str) -> list[ReshareRecord]:
    """Group identical images (by hash) or videos (by thumbnail hash and length)."""
    if kind not in ("image", "video"):
        raise ValueError("reshare analysis covers images and videos")
    shares: dict[tuple, list[Message]] = defaultdict(list)
    for m in corpus.messages:
        if m.kind == kind and m.media_hash:
            shares[_media_identity(m)].append(m)
    out = []
    for (h, dur), ms in shares.items():
        ms = sorted(ms, key=lambda m: (m.sent_time, m.provenance.read_time))
        first, last = ms[0].sent_time, max(m.sent_time for m in ms)
        out.append(ReshareRecord(h, kind, len(ms), ms[0].group_uid, first, last,
                                 (last - first).total_seconds() / 3600.0, dur))
    out.sort(key=lambda r: (-r.n_shares, r.first_time, r.media_hash))
    return out


def reshare_analysis(corpus: Corpus, kind: str, tz_offset: float = DEFAULT_TZ) -> list[dict]:
    """Reshare records joined with characteristics of the group of first appearance."""
    graph = build_group_graph(corpus)
    cache: dict[str, dict] = {}

    def group_metrics(uid: str) -> dict:
        if uid not in cache:
            d = ShareDistribution.of_group(corpus, uid)
            cache[uid] = {
                "size": len(corpus.membership[uid]),
                "entropy": entropy(CountryDistribution.from_members(corpus.membership[uid])),
                "degree": graph.degree(uid),
                "activity": activity_rate(corpus, uid, tz_offset),
                "hh": hh_concentration(d),
                "gini": gini(d),
            }
        return cache[uid]

    rows = []
    for r in reshares(corpus, kind):
        rows.append({
            "media_hash": r.media_hash,
            "kind": r.kind,
            "duration_s": r.duration_s,
            "n_shares": r.n_shares,
            "span_hours": r.span_hours,
            "first_group": r.first_group_uid,
            **group_metrics(r.first_group_uid),
        })
    return rows


def repeated_text_shares(corpus: Corpus, min_chars: int = 20, min_shares: int = 3) -> list[dict]:
    """Texts of at least ``min_chars`` characters shared identically ``min_shares`` times or more."""
    c = Counter(m.text for m in corpus.messages if m.text and len(m.text) >= min_chars)
    return [{"text": t, "n_shares": n} for t, n in sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))
            if n >= min_shares]

