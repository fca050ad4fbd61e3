import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chatcorpus.misinfo import (
    LabeledCorpus,
    LabelingError,
    ReviewCandidate,
    apply_decisions,
    known_matches,
    meaningful_texts,
    merge_variants,
    prevalence,
    read_candidates,
    read_decisions,
    score_candidates,
    scoring_index,
    write_candidates,
)
from chatcorpus.ingest import dedup, parse_record, resolve_group_variants
from chatcorpus.synthgen import GenConfig, generate
from chatcorpus.text import tokenize

from conftest import corpus_of, msg

SCAM = "obtenga su prestamo inmediato sin codeudor ni papeles escribanos solo hoy"
MUTATED = SCAM.replace("codeudor", "vecino")
BACKGROUND = [
    "alguien sabe donde venden harina pan barata cerca terminal",
    "necesito trabajo como cocinera tengo experiencia papeles vigentes",
    "buenas noches grupo quien viaja manana temprano hacia bogota",
    "busco habitacion amoblada barrio centro precio economico llamar",
    "vendo celular samsung buen estado precio negociable escribir",
    "informacion sobre permiso especial permanencia migracion colombia",
]


def labeled():
    return LabeledCorpus.from_texts([("scam-0", "scam", SCAM, "manual"),
                                     ("fake-0", "fake_news", "cierran la frontera manana todo el dia", "factcheck")])


def corpus_with(*texts):
    ms = [msg(f"b{i}", text=t) for i, t in enumerate(BACKGROUND)]
    ms += [msg(f"m{i}", text=t, sent=f"2020-03-02T1{i}:00Z") for i, t in enumerate(texts)]
    return corpus_of(ms)


def oracle_cosine(docs, a, b):
    """Cosine with idf ln(N/df), computed densely."""
    vocab = sorted({w for d in docs for w in d})
    df = Counter(w for d in docs for w in set(d))
    idf = np.array([math.log(len(docs) / df[w]) for w in vocab])

    def vec(d):
        c = Counter(d)
        return np.array([c[w] for w in vocab], dtype=float) * idf

    u, v = vec(a), vec(b)
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


def test_meaningful_texts():
    c = corpus_of([msg("a", text="hola"), msg("b", text="trocha frontera cucuta bus pasaje"),
                   msg("c", text="de la que el en y a los del se las"), msg("d", kind="image")])
    assert [m.id for m, _ in meaningful_texts(c)] == ["b"]


def test_score_exact_copy_ranks_first_and_unrelated_absent():
    c = corpus_with(MUTATED, SCAM, "receta de arepas con queso y mantequilla rica")
    cands = score_candidates(c, labeled())
    assert cands[0].message_id == "m1" and cands[0].max_similarity == pytest.approx(1.0)
    assert cands[0].best_match_corpus_id == "scam-0"
    ids = [x.message_id for x in cands]
    assert "m0" in ids and "m2" not in ids
    sims = [x.max_similarity for x in cands]
    assert sims == sorted(sims, reverse=True) and min(sims) >= 0.3


def test_mutated_scam_similarity_matches_oracle():
    c = corpus_with(MUTATED)
    cands = {x.message_id: x for x in score_candidates(c, labeled())}
    docs = [tokenize(t) for t in BACKGROUND + [MUTATED]] + [list(it.tokens) for it in labeled().items]
    expected = oracle_cosine(docs, tokenize(MUTATED), tokenize(SCAM))
    assert cands["m0"].max_similarity == pytest.approx(expected, abs=1e-12)



def test_score_requires_labels():
    with pytest.raises(LabelingError):
        score_candidates(corpus_with(), LabeledCorpus())


def test_labeled_corpus_invariants(tmp_path):
    with pytest.raises(LabelingError):
        LabeledCorpus.from_texts([("a", "scam", SCAM, "manual"), ("a", "scam", SCAM, "manual")])
    with pytest.raises(LabelingError):
        LabeledCorpus.from_texts([("a", "rumor", SCAM, "manual")])
    with pytest.raises(LabelingError):
        LabeledCorpus.from_texts([("a", "scam", "de la", "manual")])
    f = tmp_path / "l.jsonl"
    f.write_text('{"corpus_id": "x", "label": "scam", "text": "%s"}\n\n{"bad": 1}\n' % SCAM)
    with pytest.raises(LabelingError, match=":3:"):
        LabeledCorpus.read(f)


def test_apply_decisions():
    cands = [ReviewCandidate(i, 0.5, "scam-0") for i in "abc"]
    assert apply_decisions(cands, {}) == (set(), [])
    tps, reviewed = apply_decisions(cands, {"a": "true_positive", "b": "true_positive", "c": "false_positive"})
    assert tps == {"a", "b"} and len(reviewed) == 3
    again = apply_decisions(cands, {"a": "true_positive", "b": "true_positive", "c": "false_positive"})
    assert again[0] == tps
    with pytest.raises(LabelingError):
        apply_decisions(cands, {"zzz": "true_positive"})


def test_candidate_and_decision_files(tmp_path):
    cands = [ReviewCandidate("a", 0.123456789012345, "scam-0")]
    write_candidates(cands, tmp_path / "c.csv")
    assert read_candidates(tmp_path / "c.csv") == cands
    (tmp_path / "d.csv").write_text("message_id,decision\na,true_positive\nb,maybe\n")
    with pytest.raises(LabelingError, match=":3:"):
        read_decisions(tmp_path / "d.csv")


def test_merge_variants_trivial_cases():
    two = [msg("a", text=SCAM), msg("b", text=SCAM, sender="+584141111111", group="g2")]
    [cl] = merge_variants(two)
    assert (cl.n_shares, cl.n_users, cl.n_groups) == (2, 2, 2)
    assert cl.shares_per_user == 1.0
    apart = [msg(str(i), text=t) for i, t in enumerate(BACKGROUND)]
    assert len(merge_variants(apart)) == len(BACKGROUND)


@pytest.fixture(scope="module")
def generated():
    out = generate(GenConfig(seed=3, mutation=1, n_groups=12, days=10, n_users=400))
    records = [parse_record(r) for rows in out.raw.values() for r in rows]
    corpus, _ = resolve_group_variants(dedup(records)[0])
    lab = LabeledCorpus.from_texts([(d["corpus_id"], d["label"], d["text"], d["source"]) for d in out.labeled])
    return out, corpus, lab


def test_single_token_mutations_score_high_on_generated_corpus(generated):
    out, corpus, lab = generated
    cands = {x.message_id: x for x in score_candidates(corpus, lab)}
    planted = out.ground_truth["planted"]
    assert len(planted) == 300
    for p in planted:
        assert cands[p["message_id"]].max_similarity >= 0.8
        assert cands[p["message_id"]].best_match_corpus_id == p["template_id"]


def test_planted_family_forms_one_cluster(generated):
    out, corpus, lab = generated
    family = [corpus.by_id[p["message_id"]] for p in out.ground_truth["planted"]
              if p["template_id"] == "scam-00" and p["variant_id"] < 3]
    assert len(family) == 3
    [cluster] = merge_variants(family, 0.8, scoring_index(corpus, lab))
    assert sorted(cluster.message_ids) == sorted(m.id for m in family)
    assert cluster.canonical_text == max(cluster.texts, key=len)


def test_variant_clusters_never_mix_templates(generated):
    out, corpus, lab = generated
    template = {p["message_id"]: p["template_id"] for p in out.ground_truth["planted"]}
    ms = [corpus.by_id[i] for i in sorted(template)]
    clusters = merge_variants(ms, 0.8, scoring_index(corpus, lab))
    assert len(clusters) >= len(set(template.values()))
    for cl in clusters:
        assert len({template[i] for i in cl.message_ids}) == 1


@given(st.lists(st.sampled_from(BACKGROUND + [SCAM, MUTATED]), min_size=1, max_size=12),
       st.floats(0.1, 0.9), st.floats(0.0, 0.1))
def test_merge_partitions_and_is_monotone(texts, th, step):
    ms = [msg(str(i), text=t) for i, t in enumerate(texts)]
    lo = merge_variants(ms, th)
    hi = merge_variants(ms, min(1.0, th + step))
    ids = sorted(i for cl in lo for i in cl.message_ids)
    assert ids == sorted(m.id for m in ms)
    assert len(lo) + sum(len(cl.message_ids) - 1 for cl in lo) == len(ms)
    assert len(hi) >= len(lo)


def test_prevalence():
    long = "uno dos tres cuatro cinco seis"
    c = corpus_of([msg("a", "g1", "+573001111111", text=long), msg("b", "g1", "+573002222222", text=long),
                   msg("c", "g2", "+573001111111", text=long), msg("d", "g3", text="hola")])
    groups, users = prevalence(c, set())
    assert all(r["labeled"] == 0 for r in groups)
    groups, users = prevalence(c, {"a", "b", "c"})
    g = {r["group_uid"]: r for r in groups}
    assert g["g1"]["message_prevalence"] == 1.0 and g["g1"]["user_prevalence"] == 1.0
    assert g["g3"]["message_prevalence"] is None
    assert all(u["prevalence"] == 1.0 for u in users)
    groups, _ = prevalence(c, {"a"})
    g = {r["group_uid"]: r for r in groups}
    assert g["g1"]["message_prevalence"] == 0.5 and g["g1"]["user_prevalence"] == 0.5


def test_known_matches():
    c = corpus_with(SCAM, MUTATED)
    assert known_matches(c, labeled()) == {"m0": "scam"}
