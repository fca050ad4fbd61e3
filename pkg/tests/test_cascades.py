import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chatcorpus.cascades import (
    CascadeGraph,
    UndefinedViralityError,
    cascade_table,
    competing_count,
    diameter,
    distance_sum,
    duration_minutes,
    group_virality,
    message_virality,
    reply_counts,
    reply_hour_profile,
    resolve_replies,
    virality_goel,
    virality_ours,
)

from conftest import corpus_of, msg, t
from oracles import pair_distance_sum


def chain(n):
    return CascadeGraph.from_edges("0", [(str(i), str(i - 1)) for i in range(1, n)])


def star(n):
    return CascadeGraph.from_edges("0", [(str(i), "0") for i in range(1, n)])


def random_tree(rng, n):
    parents = [rng.randrange(i) for i in range(1, n)]
    edges = [(str(i), str(p)) for i, p in zip(range(1, n), parents)]
    return CascadeGraph.from_edges("0", edges), [(i, p) for i, p in zip(range(1, n), parents)]


@pytest.mark.parametrize("n,ours,goel", [
    (1, Fraction(0), None),
    (2, Fraction(1, 2), Fraction(1)),
    (3, Fraction(8, 9), Fraction(4, 3)),
    (4, Fraction(5, 4), Fraction(5, 3)),
])
def test_chain_values(n, ours, goel):
    g = chain(n)
    assert virality_ours(g) == pytest.approx(float(ours), abs=1e-12)
    if goel is None:
        with pytest.raises(UndefinedViralityError):
            virality_goel(g)
    else:
        assert virality_goel(g) == pytest.approx(float(goel), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 10, 100])
def test_star_goel_bound(n):
    assert virality_goel(star(n)) == pytest.approx(2 * (n - 1) / n, abs=1e-12)
    assert virality_goel(star(n)) < 2


def test_chain_virality_increases():
    vals = [virality_ours(chain(n)) for n in range(1, 30)]
    assert vals == sorted(vals) and len(set(vals)) == len(vals)


def test_diameter_anchors():
    assert diameter(chain(1)) == 0
    assert diameter(chain(4)) == 3
    assert diameter(star(6)) == 2


@given(st.integers(1, 30), st.integers(0, 10**6))
def test_random_tree_oracle(n, seed):
    g, edges = random_tree(random.Random(seed), n)
    assert distance_sum(g) == pair_distance_sum(n, edges)
    if n >= 2:
        assert virality_ours(g) == pytest.approx((n - 1) / n * virality_goel(g), abs=1e-12)
        assert diameter(g) >= virality_goel(g) >= virality_ours(g) >= 0


def test_non_tree_falls_back_to_bfs():
    g = CascadeGraph.from_edges("a", [("b", "a"), ("c", "b"), ("c", "a")])
    assert not g.is_tree()
    assert distance_sum(g) == 6


def test_resolve_chain_and_missing_parent():
    c = corpus_of([msg("a", sent="2020-03-01T10:00Z"), msg("b", reply_to="a", sent="2020-03-01T10:01Z"),
                   msg("c", reply_to="b", sent="2020-03-01T22:00Z"), msg("d", reply_to="ghost"),
                   msg("e", reply_to="d"), msg("f")])
    cascades, unresolved = resolve_replies(c)
    assert len(cascades) == 1
    g = cascades[0]
    assert (g.root, g.n, sorted(g.edges)) == ("a", 3, [("b", "a"), ("c", "b")])
    assert unresolved == 2
    assert duration_minutes(g) == 720.0


def test_cycles_are_unresolved():
    c = corpus_of([msg("a", reply_to="b"), msg("b", reply_to="a"), msg("c", reply_to="a"), msg("r")])
    cascades, unresolved = resolve_replies(c)
    assert cascades == [] and unresolved == 3


@given(st.integers(1, 60), st.floats(0, 1), st.integers(0, 10**6))
def test_cascade_partition(n, missing, seed):
    rng = random.Random(seed)
    msgs = []
    for i in range(n):
        r = None
        if i and rng.random() < 0.6:
            r = f"m{rng.randrange(i)}" if rng.random() > missing * 0.3 else f"gone{i}"
        msgs.append(msg(f"m{i}", sent=f"2020-03-01T10:{i:02d}Z", reply_to=r))
    c = corpus_of(msgs)
    cascades, unresolved = resolve_replies(c)
    in_cascade = [v for g in cascades for v in g.nodes]
    assert len(in_cascade) == len(set(in_cascade))
    standalone = [m for m in msgs if m.id not in set(in_cascade)]
    assert sum(g.n for g in cascades) + len(standalone) == n
    assert unresolved == sum(1 for m in standalone if m.reply_to is not None)
    for g in cascades:
        assert g.is_tree() and g.n >= 2


def test_competing_count():
    assert competing_count(corpus_of([msg("a")]), msg("a")) == 0
    ms = [msg(x) for x in "abc"] + [msg("d", sent="2020-03-01T12:05Z"), msg("e", sent="2020-03-01T12:06Z")]
    c = corpus_of(ms)
    assert competing_count(c, ms[0]) == 3
    assert competing_count(c, ms[4]) == 1


@given(st.lists(st.integers(0, 60), min_size=1, max_size=30), st.integers(0, 10))
def test_competing_count_sweep_oracle(minutes, w):
    ms = [msg(str(i), sent=f"2020-03-01T10:{m:02d}Z" if m < 60 else "2020-03-01T11:00Z")
          for i, m in enumerate(minutes)]
    c = corpus_of(ms)
    for m in ms:
        expected = sum(1 for o in ms if o is not m and abs((o.sent_time - m.sent_time).total_seconds()) <= w * 60)
        assert competing_count(c, m, w) == expected


def test_group_virality():
    c = corpus_of([msg("a", "g1"), msg("b", "g1", reply_to="a"), msg("x", "g2")])
    assert group_virality(c, "g1") == 0.5
    assert group_virality(c, "g2") == 0.0
    mixed = corpus_of([msg("a"), msg("b", reply_to="a"),
                       msg("p"), msg("q", reply_to="p"), msg("r", reply_to="q")])
    assert group_virality(mixed, "g1") == pytest.approx((2 * 0.5 + 3 * 8 / 9) / 5)


def test_tables_and_profiles():
    c = corpus_of([msg("a", sent="2020-03-01T15:00Z"), msg("b", reply_to="a", sent="2020-03-01T15:03Z")])
    cascades, _ = resolve_replies(c)
    row = cascade_table(cascades)[0]
    assert row["size"] == 2 and row["virality_goel"] == 1.0 and row["duration_min"] == 3.0
    assert message_virality(cascades) == {"a": ("a", 0.5), "b": ("a", 0.5)}
    assert reply_counts(c)["a"] == 1
    hour10 = reply_hour_profile(c)[10]
    assert hour10 == {"hour": 10, "messages": 2, "replies": 1, "replies_per_message": 0.5}
    assert t("2020-03-01T15:00Z").hour == 15
