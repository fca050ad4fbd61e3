import pytest
from hypothesis import given, strategies as st

from chatcorpus.activity import (
    ShareDistribution,
    activity_rate,
    char_count,
    gini,
    group_concentration_table,
    hh_concentration,
    length_stats,
    lorenz_curve,
    repeated_text_shares,
    reshare_analysis,
    reshares,
    top5_concentration,
    word_count,
)
from chatcorpus.membership import CountryDistribution, simpson

from conftest import corpus_of, msg
from oracles import lorenz_gini

counts_st = st.lists(st.integers(1, 500), min_size=1, max_size=40)


def sd(counts):
    return ShareDistribution.from_counts(dict(enumerate(counts)))


def test_activity_rate_anchors():
    assert activity_rate(corpus_of([msg("1")]), "g1") == 1.0
    ten = [msg(str(i), sent=f"2020-03-0{1 + i // 2}T15:00Z") for i in range(10)]
    assert activity_rate(corpus_of(ten), "g1") == 2.0
    seven = [msg(str(i), sent=f"2020-03-01T15:0{i}Z") for i in range(7)]
    assert activity_rate(corpus_of(seven), "g1") == 7.0
    with pytest.raises(ValueError):
        activity_rate(corpus_of([msg("1")], extra_groups=["e"]), "e")


def test_activity_rate_uses_local_days():
    # 03:00Z and 06:00Z fall on different local days at UTC-5
    c = corpus_of([msg("1", sent="2020-03-02T03:00Z"), msg("2", sent="2020-03-02T06:00Z")])
    assert activity_rate(c, "g1") == 1.0
    assert activity_rate(c, "g1", tz_offset=0) == 2.0


def test_hh_anchors():
    assert hh_concentration(sd([9])) == 1.0
    assert hh_concentration(sd([4] * 8)) == pytest.approx(1 / 8)
    assert hh_concentration(sd([3, 1])) == pytest.approx(0.625)


def test_top5_anchors():
    assert top5_concentration(sd([1, 5, 2])) == 1.0
    assert top5_concentration(sd([3] * 10)) == 0.5
    assert top5_concentration(sd([10, 1, 1, 1, 1, 1, 5])) == pytest.approx(18 / 20)


def test_gini_anchors():
    assert gini(sd([12])) == 0.0
    assert gini(sd([4, 4, 4])) == 0.0
    assert gini(sd([1, 3])) == pytest.approx(lorenz_gini([1, 3]), abs=1e-9)
    assert gini(sd([1, 3])) == pytest.approx(0.25)


@given(counts_st)
def test_gini_matches_lorenz_area(counts):
    assert gini(sd(counts)) == pytest.approx(lorenz_gini(counts), abs=1e-9)


@given(counts_st, st.integers(2, 7))
def test_concentration_bounds(counts, k):
    d = sd(counts)
    n = len(counts)
    assert 1 / n - 1e-12 <= hh_concentration(d) <= 1 + 1e-12
    assert 0 <= gini(d) <= 1 - 1 / n + 1e-12
    assert gini(sd([k * c for c in counts])) == pytest.approx(gini(d), abs=1e-12)
    if n >= 5:
        assert top5_concentration(d) >= 5 / n - 1e-12
    assert top5_concentration(d) == pytest.approx(sum(sorted(counts)[::-1][:5]) / sum(counts))
    cd = CountryDistribution(dict(enumerate(d.shares())), n)
    assert hh_concentration(d) == pytest.approx(simpson(cd), abs=1e-12)
    curve = lorenz_curve(d)
    assert curve[0] == (0.0, 0.0) and curve[-1][1] == pytest.approx(1.0)


def test_share_distribution_rejects_zero():
    with pytest.raises(ValueError):
        ShareDistribution.from_counts({"a": 0})
    with pytest.raises(ValueError):
        ShareDistribution.from_counts({})


def test_word_and_char_counts():
    assert (word_count("hola"), char_count("hola")) == (1, 4)
    assert (word_count(""), word_count(None)) == (0, 0)
    assert char_count("año 🇻🇪") == 6


def test_length_stats():
    assert length_stats(corpus_of([])) == []
    c = corpus_of([msg(str(i), text=" ".join(["x"] * (i + 1))) for i in range(10)]
                  + [msg("a", kind="audio", media_duration_s=30, forwarded=True), msg("e", text="")])
    rows = {(r["kind"], r["forwarded"], r["metric"]): r for r in length_stats(c)}
    words = rows[("text", False, "words")]
    assert words["n"] == 10 and words["mean"] == 5.5
    assert (words["p10"], words["p25"], words["p50"], words["p75"], words["p90"]) == (1, 3, 5, 8, 9)
    assert rows[("audio", True, "seconds")]["mean"] == 30
    assert [r["metric"] for r in length_stats(c, kind="audio")] == ["seconds"]


def test_reshares():
    c = corpus_of([msg("1", "g1", kind="image", media_hash="h", sent="2020-03-01T00:00Z"),
                   msg("2", "g2", kind="image", media_hash="h", sent="2020-03-02T00:00Z"),
                   msg("3", "g3", kind="image", media_hash="h", sent="2020-03-03T00:00Z"),
                   msg("4", "g1", kind="image", media_hash="k"),
                   msg("5", "g1", kind="video", media_hash="v", media_duration_s=10),
                   msg("6", "g2", kind="video", media_hash="v", media_duration_s=11)])
    imgs = reshares(c, "image")
    assert [(r.media_hash, r.n_shares, r.span_hours) for r in imgs] == [("h", 3, 48.0), ("k", 1, 0.0)]
    assert imgs[0].first_group_uid == "g1"
    assert [r.n_shares for r in reshares(c, "video")] == [1, 1]
    rows = reshare_analysis(c, "image")
    assert rows[0]["first_group"] == "g1" and rows[0]["degree"] == 2
    with pytest.raises(ValueError):
        reshares(c, "audio")


def test_group_table_and_repeated_texts():
    long = "compartan esta cadena por favor ahora"
    c = corpus_of([msg(str(i), f"g{i}", text=long) for i in range(3)] + [msg("x", "g0", text="hola")])
    assert repeated_text_shares(c) == [{"text": long, "n_shares": 3}]
    rows = group_concentration_table(c)
    assert [r["group_uid"] for r in rows] == ["g0", "g1", "g2"]
    assert rows[0]["hh"] == 1.0 and rows[0]["activity"] == 2.0
