"""Reply cascades and their structural virality.

A cascade is every message whose reply chain ends at the same root, joined
by undirected reply edges. Since each reply has exactly one parent the graph
is a tree, so all-pairs distance sums come from subtree sizes: an edge that
splits the tree into parts of size s and n - s lies on s(n - s) paths.
"""

from __future__ import annotations

import bisect
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from chatcorpus.model import Corpus, Message, local_time


class UndefinedViralityError(ValueError):
    pass


@dataclass
class CascadeGraph:
    root: str
    nodes: list[str]
    edges: list[tuple[str, str]]  # (reply, parent)
    group_uid: str | None = None
    times: dict[str, datetime] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, root, edges, **kw) -> "CascadeGraph":
        nodes = [root]
        seen = {root}
        for child, parent in edges:
            for v in (parent, child):
                if v not in seen:
                    seen.add(v)
                    nodes.append(v)
        return cls(root, nodes, list(edges), **kw)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def is_tree(self) -> bool:
        if len(self.edges) != self.n - 1:
            return False
        return len(_bfs(self.adjacency(), self.root)) == self.n


def _bfs(adj, source) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def distance_sum(g: CascadeGraph) -> int:
    """Sum of d(i, j) over all ordered node pairs."""
    adj = g.adjacency()
    if not g.is_tree():
        return sum(sum(_bfs(adj, v).values()) for v in g.nodes)
    order, parent = [], {g.root: None}
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    size = dict.fromkeys(order, 1)
    n = g.n
    total = 0
    for v in reversed(order):
        p = parent[v]
        if p is not None:
            size[p] += size[v]
            total += size[v] * (n - size[v])
    return 2 * total


def virality_ours(g: CascadeGraph) -> float:
    """Mean distance over all n*n ordered pairs, self-pairs included."""
    return distance_sum(g) / (g.n * g.n)


def virality_goel(g: CascadeGraph) -> float:
    """Mean distance over distinct ordered pairs."""
    if g.n < 2:
        raise UndefinedViralityError("virality over distinct pairs needs at least two nodes")
    return distance_sum(g) / (g.n * (g.n - 1))


def diameter(g: CascadeGraph) -> int:
    adj = g.adjacency()
    if g.is_tree():
        d1 = _bfs(adj, g.root)
        far = max(d1, key=d1.get)
        return max(_bfs(adj, far).values())
    return max(max(_bfs(adj, v).values()) for v in g.nodes)


def duration_minutes(g: CascadeGraph) -> float:
    if g.n < 2 or not g.times:
        return 0.0
    last = max(g.times[v] for v in g.nodes)
    return (last - g.times[g.root]).total_seconds() / 60.0


@dataclass(frozen=True)
class CascadeStats:
    root: str
    group_uid: str | None
    size: int
    virality_ours: float
    virality_goel: float | None
    diameter: int
    duration_minutes: float


def cascade_stats(g: CascadeGraph) -> CascadeStats:
    return CascadeStats(
        g.root, g.group_uid, g.n, virality_ours(g),
        virality_goel(g) if g.n >= 2 else None,
        diameter(g), duration_minutes(g),
    )


def resolve_replies(corpus: Corpus) -> tuple[list[CascadeGraph], int]:
    """Trace every reply to its root.

    Replies whose chain hits a missing message, or loops back on itself, are
    unresolved and left out. Returns cascades of two or more messages in
    root order, and the number of unresolved replies.
    """
    by_id = corpus.by_id
    root_of: dict[str, str | None] = {}

    for m in corpus.messages:
        if m.id in root_of:
            continue
        path = []
        on_path = set()
        cur = m
        result = None
        while True:
            if cur.id in root_of:
                result = root_of[cur.id]
                break
            if cur.id in on_path:
                result = None  # cycle: every message on it is unresolved
                break
            path.append(cur.id)
            on_path.add(cur.id)
            if cur.reply_to is None:
                result = cur.id
                break
            parent = by_id.get(cur.reply_to)
            if parent is None:
                result = None
                break
            cur = parent
        for mid in path:
            root_of[mid] = result

    members: dict[str, list[Message]] = defaultdict(list)
    unresolved = 0
    seen_ids = set()
    for m in corpus.messages:
        if m.id in seen_ids:
            continue
        seen_ids.add(m.id)
        r = root_of[m.id]
        if r is None:
            unresolved += 1
        elif m.reply_to is not None:
            members[r].append(m)

    cascades = []
    for m in corpus.messages:
        replies = members.get(m.id)
        if not replies or m.reply_to is not None:
            continue
        edges = [(x.id, x.reply_to) for x in replies]
        times = {m.id: m.sent_time}
        times.update({x.id: x.sent_time for x in replies})
        cascades.append(CascadeGraph.from_edges(m.id, edges, group_uid=m.group_uid, times=times))
        members.pop(m.id)
    return cascades, unresolved


def reply_counts(corpus: Corpus) -> Counter:
    """Direct replies received per message id."""
    ids = corpus.by_id
    return Counter(m.reply_to for m in corpus.messages if m.reply_to in ids)


def competing_count(corpus: Corpus, message: Message, window_minutes: int = 5) -> int:
    """Other messages in the same group sent within +/- the window, inclusive."""
    times = corpus.group_times[message.group_uid]
    lo = bisect.bisect_left(times, message.sent_time - timedelta(minutes=window_minutes))
    hi = bisect.bisect_right(times, message.sent_time + timedelta(minutes=window_minutes))
    return hi - lo - 1


def message_virality(cascades: list[CascadeGraph]) -> dict[str, tuple[str, float]]:
    """message id -> (cascade root, virality of that cascade)."""
    out = {}
    for g in cascades:
        v = virality_ours(g)
        for node in g.nodes:
            out[node] = (g.root, v)
    return out


def group_virality(corpus: Corpus, group_uid: str, cascades: list[CascadeGraph] | None = None) -> float:
    """Mean cascade virality over the group's messages that sit in cascades; 0 without any."""
    if cascades is None:
        cascades, _ = resolve_replies(corpus)
    total = count = 0.0
    for g in cascades:
        if g.group_uid == group_uid:
            total += g.n * virality_ours(g)
            count += g.n
    return total / count if count else 0.0


def cascade_table(cascades: list[CascadeGraph]) -> list[dict]:
    rows = []
    for g in cascades:
        s = cascade_stats(g)
        rows.append({
            "root_id": s.root, "group_uid": s.group_uid, "size": s.size,
            "virality_ours": s.virality_ours, "virality_goel": s.virality_goel,
            "diameter": s.diameter, "duration_min": s.duration_minutes,
        })
    return rows


def reply_hour_profile(corpus: Corpus, tz_offset: float = -5.0) -> list[dict]:
    """Per local hour of sending: messages, replies received and replies per message."""
    counts = reply_counts(corpus)
    sent = Counter()
    got = Counter()
    for m in corpus.messages:
        h = local_time(m.sent_time, tz_offset).hour
        sent[h] += 1
        got[h] += counts.get(m.id, 0)
    return [{"hour": h, "messages": sent[h], "replies": got[h],
             "replies_per_message": got[h] / sent[h] if sent[h] else None} for h in range(24)]
