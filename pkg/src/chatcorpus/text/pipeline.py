"""Tokenization, TF-IDF weighting and cosine similarity."""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

from chatcorpus.text.stemmer import stem


def load_stopwords(path=None) -> frozenset[str]:
    if path is None:
        text = resources.files("chatcorpus.data").joinpath("stopwords_es.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


STOPWORDS = load_stopwords()


def _is_separator(ch: str) -> bool:
    if ch == "_":
        return False
    cat = unicodedata.category(ch)
    return cat[0] in "PS"


def split_words(text: str) -> list[str]:
    """Lowercase, turn punctuation and symbols into spaces, split on whitespace."""
    text = unicodedata.normalize("NFC", text).lower()
    cleaned = "".join(" " if _is_separator(ch) else ch for ch in text)
    return cleaned.split()


def tokenize(text: str | None, stopwords: frozenset[str] = STOPWORDS) -> list[str]:
    """Stemmed, stopword-free tokens of ``text``.

    >>> tokenize("chico chica chicago")
    ['chic', 'chic', 'chicag']
    """
    if not text:
        return []
    return [stem(w) for w in split_words(text) if w not in stopwords]


@dataclass(frozen=True)
class SparseVector:
    entries: Mapping[int, float] = field(default_factory=dict)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def dot(self, other: "SparseVector") -> float:
        a, b = self.entries, other.entries
        if len(a) > len(b):
            a, b = b, a
        return sum(w * b[k] for k, w in a.items() if k in b)

    def scaled(self, alpha: float) -> "SparseVector":
        return SparseVector({k: alpha * w for k, w in self.entries.items()})

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class TfidfIndex:
    vocabulary: dict[str, int]
    doc_count: int
    doc_freq: dict[str, int]

    def idf(self, term: str) -> float:
        return math.log(self.doc_count / self.doc_freq[term])

    def vectorize(self, doc: Iterable[str]) -> SparseVector:
        return vectorize(self, doc)


def build_index(docs: Iterable[Iterable[str]]) -> TfidfIndex:
    doc_freq: Counter[str] = Counter()
    n = 0
    for doc in docs:
        n += 1
        doc_freq.update(set(doc))
    vocabulary = {t: i for i, t in enumerate(sorted(doc_freq))}
    return TfidfIndex(vocabulary, n, dict(doc_freq))


def vectorize(index: TfidfIndex, doc: Iterable[str]) -> SparseVector:
    entries = {}
    for term, count in Counter(doc).items():
        dim = index.vocabulary.get(term)
        if dim is None:
            continue
        weight = count * index.idf(term)
        if weight != 0.0:
            entries[dim] = weight
    return SparseVector(entries)


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity; 0 when either vector is zero."""
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return min(1.0, max(0.0, u.dot(v) / (nu * nv)))


def normalized(v: SparseVector) -> SparseVector:
    n = v.norm()
    return v if n == 0.0 else v.scaled(1.0 / n)
