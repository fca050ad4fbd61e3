"""Group membership, country composition and diversity indices.

A user is a member of a group once they have sent a message there.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from chatcorpus.model import CountryCode, Corpus, PhoneNumber

CO = CountryCode("CO")
VE = CountryCode("VE")


@dataclass(frozen=True)
class CountryDistribution:
    proportions: dict[CountryCode, float]
    member_count: int

    @classmethod
    def from_members(cls, members) -> "CountryDistribution":
        counts = Counter(p.country for p in members)
        n = sum(counts.values())
        if n == 0:
            raise ValueError("empty membership has no country distribution")
        return cls({c: k / n for c, k in sorted(counts.items())}, n)

    def share(self, country: CountryCode) -> float:
        return self.proportions.get(country, 0.0)

    def third_country(self) -> float:
        return max(0.0, 1.0 - self.share(CO) - self.share(VE))


def members(corpus: Corpus, group_uid: str) -> frozenset[PhoneNumber]:
    if group_uid not in corpus.groups:
        raise KeyError(f"unknown group {group_uid}")
    return corpus.membership[group_uid]


def country_distribution(corpus: Corpus, group_uid: str) -> CountryDistribution:
    return CountryDistribution.from_members(members(corpus, group_uid))


def entropy(d: CountryDistribution) -> float:
    """Shannon entropy in bits."""
    return -sum(p * math.log2(p) for p in d.proportions.values() if p > 0) + 0.0


def simpson(d: CountryDistribution) -> float:
    return sum(p * p for p in d.proportions.values())


def co_membership_degrees(corpus: Corpus) -> dict[PhoneNumber, tuple[int, int, int]]:
    """Per user: (distinct co-members, of which CO, of which VE)."""
    neighbours: dict[PhoneNumber, set[PhoneNumber]] = defaultdict(set)
    for uid in sorted(corpus.groups):
        mem = corpus.membership[uid]
        for u in mem:
            neighbours[u].update(mem)
    out = {}
    for u in sorted(neighbours, key=lambda p: p.e164):
        others = neighbours[u] - {u}
        out[u] = (len(others),
                  sum(1 for v in others if v.country == CO),
                  sum(1 for v in others if v.country == VE))
    return out


def membership_table(corpus: Corpus) -> list[dict]:
    rows = []
    for uid in sorted(corpus.groups):
        mem = corpus.membership[uid]
        if not mem:
            continue
        d = CountryDistribution.from_members(mem)
        rows.append({
            "group_uid": uid,
            "size": d.member_count,
            "p_CO": d.share(CO),
            "p_VE": d.share(VE),
            "p_other": d.third_country(),
            "entropy": entropy(d),
            "simpson": simpson(d),
        })
    return rows

