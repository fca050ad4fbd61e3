"""Similarity-based labeling of fake news and scams, variant clustering, prevalence."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from chatcorpus.model import Corpus, Message
from chatcorpus.text import TfidfIndex, build_index, cosine, normalized, tokenize, vectorize

LABELS = ("fake_news", "scam")
SOURCES = ("factcheck", "manual")
DECISIONS = ("pending", "true_positive", "false_positive")


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledItem:
    corpus_id: str
    label: str
    text: str
    tokens: tuple[str, ...]
    source: str = "factcheck"


@dataclass
class LabeledCorpus:
    items: list[LabeledItem] = field(default_factory=list)

    def __post_init__(self):
        ids = [it.corpus_id for it in self.items]
        if len(set(ids)) != len(ids):
            raise LabelingError("duplicate corpus ids")
        for it in self.items:
            if it.label not in LABELS:
                raise LabelingError(f"{it.corpus_id}: unknown label {it.label!r}")
            if not it.tokens:
                raise LabelingError(f"{it.corpus_id}: text has no tokens")

    @classmethod
    def from_texts(cls, rows: Iterable[tuple[str, str, str, str]]) -> "LabeledCorpus":
        return cls([LabeledItem(cid, label, text, tuple(tokenize(text)), source)
                    for cid, label, text, source in rows])

    @classmethod
    def read(cls, path: str | Path) -> "LabeledCorpus":
        """Line-delimited objects with ``corpus_id, label, text, source``."""
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    rows.append((str(obj["corpus_id"]), obj["label"], obj["text"],
                                 obj.get("source") or "factcheck"))
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise LabelingError(f"{path}:{line_no}: bad labeled-corpus line ({exc})") from None
        return cls.from_texts(rows)

    def with_label(self, label: str) -> "LabeledCorpus":
        return LabeledCorpus([it for it in self.items if it.label == label])


@dataclass
class ReviewCandidate:
    message_id: str
    max_similarity: float
    best_match_corpus_id: str
    decision: str = "pending"


def meaningful_texts(corpus: Corpus, min_tokens: int = 5) -> list[tuple[Message, list[str]]]:
    """Text messages whose tokenization keeps at least ``min_tokens`` tokens."""
    out = []
    for m in corpus.messages:
        if m.kind != "text" or not m.text:
            continue
        toks = tokenize(m.text)
        if len(toks) >= min_tokens:
            out.append((m, toks))
    return out


def scoring_index(corpus: Corpus, labeled: LabeledCorpus, min_tokens: int = 5,
                  texts: list | None = None) -> TfidfIndex:
    """TF-IDF index over the meaningful texts plus the labeled items."""
    if texts is None:
        texts = meaningful_texts(corpus, min_tokens)
    return build_index([t for _, t in texts] + [list(it.tokens) for it in labeled.items])


def score_candidates(corpus: Corpus, labeled: LabeledCorpus, threshold: float = 0.3,
                     min_tokens: int = 5) -> list[ReviewCandidate]:
    """Meaningful texts whose best cosine to any labeled item reaches ``threshold``.

    IDF comes from the messages and labeled items together. Exact copies of
    a labeled item score 1.0 and rank first.
    """
    if not labeled.items:
        raise LabelingError("labeled corpus is empty")
    texts = meaningful_texts(corpus, min_tokens)
    index = scoring_index(corpus, labeled, min_tokens, texts)
    refs = [(it.corpus_id, normalized(vectorize(index, it.tokens))) for it in labeled.items]

    out = []
    for m, toks in texts:
        v = normalized(vectorize(index, toks))
        if not v.entries:
            continue
        best_sim, best_id = -1.0, None
        for cid, ref in refs:
            s = cosine(v, ref)
            if s > best_sim:
                best_sim, best_id = s, cid
        if best_sim >= threshold:
            out.append(ReviewCandidate(m.id, best_sim, best_id))
    out.sort(key=lambda c: -c.max_similarity)
    return out


def write_candidates(cands: Sequence[ReviewCandidate], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["message_id", "max_similarity", "best_match_corpus_id", "decision"])
        for c in cands:
            w.writerow([c.message_id, repr(c.max_similarity), c.best_match_corpus_id, c.decision])


def read_candidates(path: str | Path) -> list[ReviewCandidate]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [ReviewCandidate(r["message_id"], float(r["max_similarity"]),
                                r["best_match_corpus_id"], r.get("decision") or "pending")
                for r in csv.DictReader(fh)]


def read_decisions(path: str | Path) -> dict[str, str]:
    """CSV ``message_id,decision`` with decision true_positive or false_positive."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.DictReader(fh), 2):
            d = (row.get("decision") or "").strip()
            if d not in ("true_positive", "false_positive"):
                raise LabelingError(f"{path}:{line_no}: bad decision {d!r}")
            out[row["message_id"]] = d
    return out


def apply_decisions(candidates: Sequence[ReviewCandidate], decisions: dict[str, str]
                    ) -> tuple[set[str], list[ReviewCandidate]]:
    """Record manual review outcomes.

    Returns the true-positive message ids and the reviewed candidates (both
    outcomes), which feed the similarity-distribution report.
    """
    by_id = {c.message_id: c for c in candidates}
    unknown = sorted(set(decisions) - set(by_id))
    if unknown:
        raise LabelingError(f"decision for unknown candidate {unknown[0]}")
    reviewed = []
    for c in candidates:
        if c.message_id in decisions:
            c.decision = decisions[c.message_id]
            reviewed.append(c)
    tps = {c.message_id for c in reviewed if c.decision == "true_positive"}
    return tps, reviewed


@dataclass
class VariantCluster:
    cluster_id: int
    message_ids: list[str]
    texts: list[str]
    canonical_text: str
    n_shares: int
    n_users: int
    n_groups: int

    @property
    def shares_per_user(self) -> float:
        return self.n_shares / self.n_users

    @property
    def shares_per_group(self) -> float:
        return self.n_shares / self.n_groups


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def merge_variants(messages: Sequence[Message], threshold: float = 0.8,
                   index: TfidfIndex | None = None) -> list[VariantCluster]:
    """Cluster labeled messages whose texts are variants of each other.

    Identical texts always share a cluster; distinct texts join when a chain
    of pairwise cosines at or above ``threshold`` links them. Weights come
    from ``index`` when given (normally the scoring index), otherwise from
    the messages themselves.
    """
    distinct: list[str] = []
    pos: dict[str, int] = {}
    for m in messages:
        t = m.text or ""
        if t not in pos:
            pos[t] = len(distinct)
            distinct.append(t)
    toks = [tokenize(t) for t in distinct]
    if index is None:
        index = build_index(toks)
    vecs = [normalized(vectorize(index, t)) for t in toks]
    uf = _UnionFind(len(distinct))
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            if cosine(vecs[i], vecs[j]) >= threshold:
                uf.union(i, j)

    groups: dict[int, list[Message]] = defaultdict(list)
    for m in messages:
        groups[uf.find(pos[m.text or ""])].append(m)
    clusters = []
    for cid, root in enumerate(sorted(groups)):
        ms = groups[root]
        texts = []
        for m in ms:
            if m.text not in texts:
                texts.append(m.text or "")
        canonical = max(texts, key=len)  # max keeps the first of equal lengths
        clusters.append(VariantCluster(
            cid, [m.id for m in ms], texts, canonical, len(ms),
            len({m.sender for m in ms}), len({m.group_uid for m in ms}),
        ))
    return clusters


def prevalence(corpus: Corpus, labeled_ids: set[str], label: str = "fake_news",
               min_tokens: int = 5) -> tuple[list[dict], list[dict]]:
    """Per-group and per-user prevalence of labeled content among meaningful texts."""
    texts = meaningful_texts(corpus, min_tokens)
    g_total: dict[str, int] = defaultdict(int)
    g_hit: dict[str, int] = defaultdict(int)
    g_sharers: dict[str, set] = defaultdict(set)
    u_total: dict = defaultdict(int)
    u_hit: dict = defaultdict(int)
    for m, _ in texts:
        g_total[m.group_uid] += 1
        u_total[m.sender] += 1
        if m.id in labeled_ids:
            g_hit[m.group_uid] += 1
            u_hit[m.sender] += 1
            g_sharers[m.group_uid].add(m.sender)

    group_rows = []
    for uid in sorted(corpus.groups):
        n_mem = len(corpus.membership[uid])
        group_rows.append({
            "group_uid": uid,
            "label": label,
            "meaningful": g_total[uid],
            "labeled": g_hit[uid],
            "message_prevalence": g_hit[uid] / g_total[uid] if g_total[uid] else None,
            "members": n_mem,
            "sharers": len(g_sharers[uid]),
            "user_prevalence": len(g_sharers[uid]) / n_mem if n_mem else None,
        })
    user_rows = []
    for u in sorted(u_total, key=lambda p: p.e164):
        user_rows.append({
            "user": str(u),
            "label": label,
            "meaningful": u_total[u],
            "frequency": u_hit[u],
            "prevalence": u_hit[u] / u_total[u],
        })
    return group_rows, user_rows


def known_matches(corpus: Corpus, labeled: LabeledCorpus) -> dict[str, str]:
    """Message id -> label for messages whose text equals a labeled item exactly."""
    by_text = {}
    for it in labeled.items:
        by_text.setdefault(it.text, it.label)
    return {m.id: by_text[m.text] for m in corpus.messages if m.text in by_text}
