"""Co-membership graphs of groups and users, and their node metrics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from chatcorpus.model import Corpus


class UndefinedMetricError(ValueError):
    pass


@dataclass
class SimpleGraph:
    """Undirected graph without self-loops or parallel edges."""

    nodes: list = field(default_factory=list)
    adjacency: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, nodes: Iterable[Hashable], edges: Iterable[tuple]) -> "SimpleGraph":
        g = cls()
        for v in nodes:
            g.add_node(v)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    def add_node(self, v) -> None:
        if v not in self.adjacency:
            self.nodes.append(v)
            self.adjacency[v] = set()

    def add_edge(self, a, b) -> None:
        if a == b:
            return
        self.add_node(a)
        self.add_node(b)
        self.adjacency[a].add(b)
        self.adjacency[b].add(a)

    def degree(self, v) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple]:
        order = {v: i for i, v in enumerate(self.nodes)}
        out = []
        for a in self.nodes:
            for b in self.adjacency[a]:
                if order[a] < order[b]:
                    out.append((a, b))
        out.sort(key=lambda e: (order[e[0]], order[e[1]]))
        return out

    def __len__(self) -> int:
        return len(self.nodes)


def build_group_graph(corpus: Corpus) -> SimpleGraph:
    """Groups are adjacent when they share at least one member."""
    g = SimpleGraph()
    uids = sorted(corpus.groups)
    for uid in uids:
        g.add_node(uid)
    groups_of: dict = {}
    for uid in uids:
        for user in corpus.membership[uid]:
            groups_of.setdefault(user, []).append(uid)
    for gs in groups_of.values():
        for i, a in enumerate(gs):
            for b in gs[i + 1:]:
                g.add_edge(a, b)
    return g


def build_user_graph(corpus: Corpus) -> SimpleGraph:
    """Users are adjacent when they sent messages in a common group."""
    g = SimpleGraph()
    for user in corpus.users():
        g.add_node(user)
    for uid in sorted(corpus.groups):
        mem = sorted(corpus.membership[uid])
        for i, a in enumerate(mem):
            for b in mem[i + 1:]:
                g.add_edge(a, b)
    return g


def bfs_distances(g: SimpleGraph, source) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def connected_components(g: SimpleGraph) -> list[set]:
    """Components, largest first; ties keep node insertion order."""
    seen: set = set()
    comps = []
    for v in g.nodes:
        if v in seen:
            continue
        comp = set(bfs_distances(g, v))
        seen |= comp
        comps.append(comp)
    comps.sort(key=len, reverse=True)
    return comps


def avg_shortest_path(g: SimpleGraph, node) -> float:
    """Mean BFS distance from ``node`` to the rest of its component."""
    dist = bfs_distances(g, node)
    if len(dist) < 2:
        raise UndefinedMetricError(f"node {node!r} is isolated")
    return sum(dist.values()) / (len(dist) - 1)


def eccentricity(g: SimpleGraph, node) -> int:
    return max(bfs_distances(g, node).values())


def diameter(g: SimpleGraph) -> int:
    """Largest finite shortest-path distance in the graph."""
    return max((eccentricity(g, v) for v in g.nodes), default=0)


def clustering_coefficient(g: SimpleGraph, node) -> float:
    nbrs = g.adjacency[node]
    d = len(nbrs)
    if d < 2:
        raise UndefinedMetricError(f"node {node!r} has degree {d} < 2")
    links = sum(len(g.adjacency[u] & nbrs) for u in nbrs) // 2
    return links / (d * (d - 1) / 2)


LOW, MID, HIGH = "LOW", "MID", "HIGH"


def nearest_rank(sorted_values: list[float], pct: float) -> float:
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return sorted_values[rank - 1]


def percentile_classes(values: Mapping) -> dict:
    """LOW at or below the 30th percentile, HIGH above the 70th, MID between."""
    if not values:
        raise ValueError("percentile_classes needs at least one value")
    ordered = sorted(values.values())
    p30, p70 = nearest_rank(ordered, 30), nearest_rank(ordered, 70)
    out = {}
    for k, v in values.items():
        if v <= p30:
            out[k] = LOW
        elif v > p70:
            out[k] = HIGH
        else:
            out[k] = MID
    return out


def degree_distribution(g: SimpleGraph) -> dict[int, int]:
    hist: dict[int, int] = {}
    for v in g.nodes:
        hist[g.degree(v)] = hist.get(g.degree(v), 0) + 1
    return dict(sorted(hist.items()))


def node_metrics(g: SimpleGraph) -> list[dict]:
    """Per node: degree, component index, average path and clustering (None if undefined)."""
    comp_of = {}
    for i, comp in enumerate(connected_components(g)):
        for v in comp:
            comp_of[v] = i
    rows = []
    for v in g.nodes:
        d = g.degree(v)
        rows.append({
            "node": v,
            "degree": d,
            "component_id": comp_of[v],
            "avg_path": avg_shortest_path(g, v) if d > 0 else None,
            "clustering": clustering_coefficient(g, v) if d >= 2 else None,
        })
    return rows
