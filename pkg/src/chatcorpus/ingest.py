"""Reading raw message logs, removing scraper duplicates, merging renamed groups.

Every message in a raw log was captured by one reading: a (server, read_time)
pass over one group. The same message is captured again whenever a second
account reads the group or a later pass scrolls over it. A user can also send
the same message twice in the same minute; those copies show up together
inside a single reading, which is how they are told apart from re-reads.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from chatcorpus.model import (
    MEDIA_KINDS,
    MESSAGE_KINDS,
    Corpus,
    Group,
    MalformedNumberError,
    Message,
    Provenance,
    UnidentifiableGroupError,
    derive_uid,
    format_time,
    parse_phone,
    parse_time,
)
from chatcorpus.text import build_index, cosine, tokenize, vectorize

log = logging.getLogger(__name__)

FIELDS = ("id", "group_uid", "group_title", "group_icon_uid", "server", "read_time",
          "sent_time", "sender", "kind", "text", "media_hash", "media_duration_s",
          "has_emoji", "forwarded", "reply_to")
REQUIRED = ("id", "server", "read_time", "sent_time", "sender", "kind")


class RecordError(ValueError):
    pass


@dataclass(frozen=True)
class RawRecord:
    message: Message
    group_title: str | None
    group_icon_uid: str | None
    file: str
    line_no: int


@dataclass(frozen=True)
class Reject:
    line_no: int
    file: str
    reason: str


@dataclass
class DedupReport:
    total_read: int = 0
    removed: int = 0
    true_duplicates_kept: int = 0
    per_group: dict[str, tuple[int, int]] = field(default_factory=dict)


@dataclass(frozen=True)
class Merge:
    absorbed_uid: str
    surviving_uid: str
    cosine: float
    identical_fraction: float


@dataclass
class MergeReport:
    merges: list[Merge] = field(default_factory=list)


def _opt_str(obj: dict, key: str) -> str | None:
    v = obj.get(key)
    if v is None:
        return None
    if not isinstance(v, str):
        raise RecordError(f"field {key} must be a string")
    return v


def _opt_bool(obj: dict, key: str) -> bool:
    v = obj.get(key)
    if v is None:
        return False
    if not isinstance(v, bool):
        raise RecordError(f"field {key} must be a boolean")
    return v


def parse_record(obj: dict, file: str = "<memory>", line_no: int = 0) -> RawRecord:
    """Validate one decoded log object. Raises RecordError on bad input."""
    if not isinstance(obj, dict):
        raise RecordError("record is not an object")
    for key in REQUIRED:
        if obj.get(key) in (None, ""):
            raise RecordError(f"missing required field {key}")
    kind = obj["kind"]
    if kind not in MESSAGE_KINDS:
        raise RecordError(f"unknown kind {kind!r}")
    try:
        sent = parse_time(str(obj["sent_time"]))
        read = parse_time(str(obj["read_time"]))
    except ValueError as exc:
        raise RecordError(f"bad timestamp: {exc}") from None
    if sent.second or sent.microsecond:
        raise RecordError("sent_time must have minute precision")
    if sent > read:
        raise RecordError("sent_time is after read_time")
    try:
        sender = parse_phone(str(obj["sender"]))
    except MalformedNumberError as exc:
        raise RecordError(str(exc)) from None

    title = _opt_str(obj, "group_title")
    icon = _opt_str(obj, "group_icon_uid")
    uid = _opt_str(obj, "group_uid")
    if not uid:
        try:
            uid = derive_uid(icon, title)
        except UnidentifiableGroupError as exc:
            raise RecordError(str(exc)) from None

    text = _opt_str(obj, "text")
    if kind == "text" and text is None:
        raise RecordError("text message without text")
    duration = obj.get("media_duration_s")
    if duration is not None:
        if kind not in ("audio", "video"):
            raise RecordError("media_duration_s only allowed for audio/video")
        if not isinstance(duration, int) or isinstance(duration, bool) or duration < 0:
            raise RecordError("media_duration_s must be a non-negative integer")
    media_hash = _opt_str(obj, "media_hash")
    if media_hash is not None and kind not in MEDIA_KINDS:
        raise RecordError("media_hash only allowed for media kinds")

    msg = Message(
        id=str(obj["id"]),
        group_uid=uid,
        sender=sender,
        sent_time=sent,
        kind=kind,
        provenance=Provenance(str(obj["server"]), read),
        text=text,
        media_hash=media_hash,
        media_duration_s=duration,
        has_emoji=_opt_bool(obj, "has_emoji"),
        forwarded=_opt_bool(obj, "forwarded"),
        reply_to=_opt_str(obj, "reply_to"),
    )
    return RawRecord(msg, title, icon, file, line_no)


def read_logs(paths: Iterable[str | Path]) -> tuple[list[RawRecord], list[Reject]]:
    """Parse line-delimited JSON logs in order; bad lines go to the rejects list."""
    records: list[RawRecord] = []
    rejects: list[Reject] = []
    for path in paths:
        path = Path(path)
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    records.append(parse_record(obj, str(path), line_no))
                except (json.JSONDecodeError, RecordError) as exc:
                    rejects.append(Reject(line_no, str(path), str(exc)))
    return records, rejects


def write_rejects(rejects: Sequence[Reject], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["line_no", "file", "reason"])
        for r in rejects:
            w.writerow([r.line_no, r.file, r.reason])


def dedup_messages(messages: Sequence[Message]) -> tuple[list[Message], int]:
    """Remove re-read copies, keeping true duplicates.

    For each key the kept multiplicity is the largest count seen inside any
    single reading; the copies come from the earliest reading reaching that
    count. Returns the kept messages in chronological order (stable) and the
    number of extra true-duplicate instances kept.
    """
    per_reading: dict[tuple, Counter] = defaultdict(Counter)
    keys = []
    for m in messages:
        k = m.key()
        keys.append(k)
        per_reading[k][(m.provenance.read_time, m.provenance.server)] += 1

    chosen = {}
    extra = 0
    for k, counts in per_reading.items():
        mult = max(counts.values())
        chosen[k] = min(r for r, c in counts.items() if c == mult)
        extra += mult - 1

    kept = [m for m, k in zip(messages, keys)
            if (m.provenance.read_time, m.provenance.server) == chosen[k]]
    kept.sort(key=lambda m: m.sent_time)
    return kept, extra


def _group_metadata(records: Sequence[RawRecord]) -> dict[str, Group]:
    latest: dict[str, tuple] = {}
    for r in records:
        uid = r.message.group_uid
        stamp = (r.message.provenance.read_time, r.message.provenance.server)
        if uid not in latest or stamp >= latest[uid][0]:
            latest[uid] = (stamp, r.group_title, r.group_icon_uid)
    return {uid: Group(uid, title, icon) for uid, (_, title, icon) in sorted(latest.items())}


def dedup(records: Sequence[RawRecord], groups: dict[str, Group] | None = None) -> tuple[Corpus, DedupReport]:
    messages = [r.message for r in records]
    kept, extra = dedup_messages(messages)
    if groups is None:
        groups = _group_metadata(records)

    read_counts = Counter(m.group_uid for m in messages)
    kept_counts = Counter(m.group_uid for m in kept)
    report = DedupReport(
        total_read=len(messages),
        removed=len(messages) - len(kept),
        true_duplicates_kept=extra,
        per_group={g: (n, n - kept_counts[g]) for g, n in sorted(read_counts.items())},
    )
    return Corpus(groups, kept), report


def group_vectors(corpus: Corpus) -> dict[str, object]:
    """TF-IDF vector of each group's concatenated text tokens, IDF over groups."""
    uids = sorted(corpus.groups)
    docs = []
    for uid in uids:
        toks: list[str] = []
        for m in corpus.by_group[uid]:
            if m.text:
                toks.extend(tokenize(m.text))
        docs.append(toks)
    index = build_index(docs)
    return {uid: vectorize(index, d) for uid, d in zip(uids, docs)}


def _best_merge(corpus: Corpus, cos_threshold: float, overlap: float):
    vecs = group_vectors(corpus)
    uids = sorted(corpus.groups)
    keysets = {}
    best = None
    for i, a in enumerate(uids):
        for b in uids[i + 1:]:
            c = cosine(vecs[a], vecs[b])
            if c <= cos_threshold:
                continue
            for uid in (a, b):
                if uid not in keysets:
                    keysets[uid] = Counter(m.identity_key() for m in corpus.by_group[uid])
            shared = sum((keysets[a] & keysets[b]).values())
            smaller = min(len(corpus.by_group[a]), len(corpus.by_group[b]))
            if smaller == 0 or shared == 0 or shared < overlap * smaller:
                continue
            frac = min(1.0, shared / smaller)
            cand = (frac, c, a, b)
            if best is None or (cand[0], cand[1]) > (best[0], best[1]):
                best = cand
    return best


def resolve_group_variants(corpus: Corpus, cos_threshold: float = 0.5,
                           overlap: float = 0.6) -> tuple[Corpus, MergeReport]:
    """Merge groups that are the same chat recorded under two uids.

    A pair merges when its group token vectors have cosine above
    ``cos_threshold`` and at least ``overlap`` of the smaller group's messages
    appear identically (sender, minute, content) in the other. The group read
    later is folded into the one read first; duplicates are then removed
    again. Repeats until no pair qualifies.
    """
    report = MergeReport()
    while True:
        best = _best_merge(corpus, cos_threshold, overlap)
        if best is None:
            return corpus, report
        frac, c, a, b = best
        first = corpus.first_read
        survivor, absorbed = sorted((a, b), key=lambda u: (first.get(u), u))
        log.info("merging group %s into %s (cos=%.3f, identical=%.3f)", absorbed, survivor, c, frac)
        report.merges.append(Merge(absorbed, survivor, c, frac))

        keep, gone = corpus.groups[survivor], corpus.groups[absorbed]
        history = []
        for uid in keep.merged_from + gone.merged_from + (absorbed,):
            if uid != survivor and uid not in history:
                history.append(uid)
        groups = dict(corpus.groups)
        del groups[absorbed]
        groups[survivor] = replace(keep, merged_from=tuple(history))
        moved = [replace(m, group_uid=survivor) if m.group_uid == absorbed else m
                 for m in corpus.messages]
        kept, _ = dedup_messages(moved)
        corpus = Corpus(groups, kept)


def message_to_record(m: Message, group: Group | None = None) -> dict:
    return {
        "id": m.id,
        "group_uid": m.group_uid,
        "group_title": group.title if group else None,
        "group_icon_uid": group.icon_uid if group else None,
        "server": m.provenance.server,
        "read_time": format_time(m.provenance.read_time),
        "sent_time": format_time(m.sent_time, minute=True),
        "sender": str(m.sender),
        "kind": m.kind,
        "text": m.text,
        "media_hash": m.media_hash,
        "media_duration_s": m.media_duration_s,
        "has_emoji": m.has_emoji,
        "forwarded": m.forwarded,
        "reply_to": m.reply_to,
    }


def write_corpus(corpus: Corpus, out_dir: str | Path) -> None:
    """Persist as ``messages.jsonl`` plus a ``groups.json`` sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "messages.jsonl").open("w", encoding="utf-8") as fh:
        for m in corpus.messages:
            fh.write(json.dumps(message_to_record(m, corpus.groups[m.group_uid]), ensure_ascii=False))
            fh.write("\n")
    meta = {uid: {"title": g.title, "icon_uid": g.icon_uid, "merged_from": list(g.merged_from)}
            for uid, g in sorted(corpus.groups.items())}
    with (out_dir / "groups.json").open("w", encoding="utf-8") as fh:
        json.dump(meta, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def read_corpus(in_dir: str | Path) -> Corpus:
    in_dir = Path(in_dir)
    with (in_dir / "groups.json").open(encoding="utf-8") as fh:
        meta = json.load(fh)
    groups = {uid: Group(uid, g.get("title"), g.get("icon_uid"), tuple(g.get("merged_from", ())))
              for uid, g in meta.items()}
    records, rejects = read_logs([in_dir / "messages.jsonl"])
    if rejects:
        r = rejects[0]
        raise RecordError(f"{r.file}:{r.line_no}: {r.reason}")
    return Corpus(groups, [r.message for r in records])
