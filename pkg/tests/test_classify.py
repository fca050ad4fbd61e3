from datetime import timedelta

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from chatcorpus.classify import (
    NOT_SCAM,
    SCAM,
    Dataset,
    EvalReport,
    FeatureSpec,
    FoldPlan,
    Row,
    RunSpec,
    best_split,
    build_dataset,
    build_features,
    check_fold_order,
    chrono_split,
    evaluate,
    forward_chain_folds,
    knn_predict,
    logistic_objective,
    logistic_predict,
    logistic_train,
    run,
    tree_predict,
    tree_train,
)

from conftest import corpus_of, msg, t
from oracles import central_difference, exhaustive_best_split

T0 = t("2020-03-01T00:00Z")


def rows(n, same_time_every=1, label=lambda i: i % 7 == 0):
    return [Row(f"r{i:05d}", T0 + timedelta(minutes=i // same_time_every), (f"w{i % 5}", "x"),
                int(label(i)), word_count=3 + i % 4) for i in range(n)]


def split_score(X, y, j, thr):
    n = len(y)
    out = 0.0
    for part in (y[X[:, j] <= thr], y[X[:, j] > thr]):
        p = part.mean()
        out += len(part) / n * (1 - p * p - (1 - p) ** 2)
    return out


# --- splits and folds ------------------------------------------------------------

def test_chrono_split_sizes():
    tr, te = chrono_split(Dataset(rows(10)))
    assert (len(tr), len(te)) == (8, 2)
    tr, te = chrono_split(Dataset(rows(44025)))
    assert (len(tr), len(te)) == (35220, 8805)
    assert [r.message_id for r in tr.rows + te.rows] == [r.message_id for r in rows(44025)]
    with pytest.raises(ValueError):
        chrono_split(Dataset(rows(1)))


def test_chrono_split_snaps_past_equal_timestamps():
    tr, te = chrono_split(Dataset(rows(10, same_time_every=3)))
    assert len(tr) == 9
    assert tr.rows[-1].sent_time < te.rows[0].sent_time


def test_dataset_sorts_by_time_then_id():
    ds = Dataset(list(reversed(rows(6, same_time_every=2))))
    assert [r.message_id for r in ds.rows] == [f"r{i:05d}" for i in range(6)]


def test_folds_anchors():
    plan = forward_chain_folds(Dataset(rows(100)), 5)
    assert [len(tr) for tr, _ in plan.folds] == [20, 40, 60, 80]
    assert [len(te) for _, te in plan.folds] == [20, 20, 20, 20]
    assert len(forward_chain_folds(Dataset(rows(10)), 2).folds) == 1
    plan = forward_chain_folds(Dataset(rows(103)), 5)
    assert len(plan.folds[-1][1]) == 103 - 4 * (103 // 5) == 23
    with pytest.raises(ValueError):
        forward_chain_folds(Dataset(rows(10)), 1)
    with pytest.raises(ValueError):
        forward_chain_folds(Dataset(rows(3)), 5)


@given(st.integers(10, 300), st.integers(2, 8), st.integers(1, 5))
def test_folds_never_train_on_the_future(n, k, tie):
    ds = Dataset(rows(n, same_time_every=tie))
    plan = forward_chain_folds(ds, k)
    check_fold_order(ds, plan)
    prev = 0
    for tr, te in plan.folds:
        assert tr.start == 0 and tr.stop == te.start and tr.stop >= prev
        prev = tr.stop
        assert ds.rows[tr.stop - 1].sent_time < ds.rows[te.start].sent_time


def test_check_fold_order_flags_violations():
    ds = Dataset(rows(10, same_time_every=2))
    with pytest.raises(AssertionError):
        check_fold_order(ds, FoldPlan([(range(0, 3), range(3, 6))]))


# --- features ---------------------------------------------------------------------

def test_features_fit_on_train_only():
    train = [Row("a", T0, ("troch", "pas"), 0, 2), Row("b", T0, ("pas", "bus"), 1, 6)]
    test = [Row("c", T0, ("nuev",), 0, 10)]
    f = build_features(train, test, FeatureSpec(word_length=True))
    assert "nuev" not in f.vocabulary
    assert f.X_test.shape == (1, len(f.vocabulary) + 1)
    assert f.X_test.toarray()[0].tolist() == [0.0] * len(f.vocabulary) + [1.0]
    assert f.X_train[:, -1].toarray().ravel().tolist() == [0.0, 1.0]
    f = build_features(train, test)
    assert f.X_test.nnz == 0
    with pytest.raises(ValueError):
        build_features([], test)


def test_features_country_and_concentration():
    train = [Row("a", T0, ("x",), 0, 1, "CO", 0.5, 0.1), Row("b", T0, ("y",), 1, 1, "EC", 0.2, 0.3)]
    spec = FeatureSpec(country=True, concentration=True)
    f = build_features(train, [Row("c", T0, ("x",), 0, 1, "VE", 0.9, 0.4)], spec)
    assert f.names[-4:] == ["country_CO", "country_VE", "group_hh", "group_gini"]
    assert f.X_train.toarray()[:, -4:].tolist() == [[1, 0, 0.5, 0.1], [0, 0, 0.2, 0.3]]
    assert f.X_test.toarray()[0, -4:].tolist() == [0, 1, 0.9, 0.4]


def test_build_dataset_labels_meaningful_texts():
    long = "trocha frontera cucuta bus pasaje"
    c = corpus_of([msg("a", text=long), msg("b", text="hola"), msg("c", text=long + " hoy",
                                                                   sent="2020-03-01T13:00Z")])
    ds = build_dataset(c, {"c"})
    assert [(r.message_id, r.label) for r in ds.rows] == [("a", NOT_SCAM), ("c", SCAM)]
    assert ds.rows[0].country == "CO" and ds.rows[0].word_count == 5


# --- kNN ---------------------------------------------------------------------------

def test_knn_anchors():
    X = sp.csr_matrix(np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 1.0, 0.1], [0, 0.9, 0]]))
    y = np.array([SCAM, NOT_SCAM, NOT_SCAM, SCAM])
    assert knn_predict(X, y, 1, X[0]).tolist() == [SCAM]
    assert knn_predict(X, y, 3, sp.csr_matrix([[0, 1.0, 0]])).tolist() == [NOT_SCAM]
    with pytest.raises(ValueError):
        knn_predict(X, y, 0, X)
    with pytest.raises(ValueError):
        knn_predict(X, y, 5, X)


def test_knn_ties():
    X = sp.csr_matrix(np.array([[1.0, 0], [1.0, 0], [0, 1.0]]))
    # equal distances: the earlier row wins
    assert knn_predict(X, np.array([SCAM, NOT_SCAM, NOT_SCAM]), 1, X[1]).tolist() == [SCAM]
    assert knn_predict(X, np.array([NOT_SCAM, SCAM, NOT_SCAM]), 1, X[1]).tolist() == [NOT_SCAM]
    # 1-1 vote goes to scam
    assert knn_predict(X, np.array([NOT_SCAM, SCAM, NOT_SCAM]), 2, X[0]).tolist() == [SCAM]


@given(st.integers(0, 10**6))
def test_knn_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    X = rng.random((30, 6)) * (rng.random((30, 6)) < 0.5)
    y = rng.integers(0, 2, 30)
    Q = rng.random((5, 6))
    k = int(rng.integers(1, 8))
    got = knn_predict(sp.csr_matrix(X), y, k, sp.csr_matrix(Q), chunk=2)
    for q, g in zip(Q, got):
        sims = [0.0 if not x.any() else float(q @ x / np.linalg.norm(q) / np.linalg.norm(x)) for x in X]
        order = sorted(range(30), key=lambda i: (1 - sims[i], i))[:k]
        assert g == int(2 * sum(y[order]) >= k)


# --- tree ----------------------------------------------------------------------------

def test_tree_anchors():
    X = sp.csr_matrix(np.array([[0.0], [1.0], [2.0], [3.0]]))
    y = np.array([0, 0, 1, 1])
    tree = tree_train(X, y, 5)
    assert tree.depth() == 1 and tree.threshold == 1.5
    assert tree_predict(tree, X).tolist() == [0, 0, 1, 1]
    leaf = tree_train(X, np.ones(4, dtype=int), 3)
    assert leaf.feature is None and leaf.label == SCAM
    assert tree_train(X[:2], np.array([0, 1]), 1).left.label == 0
    with pytest.raises(ValueError):
        tree_train(X, y, 0)
    with pytest.raises(ValueError):
        tree_train(X[:0], y[:0], 2)


def test_tree_leaf_tie_is_scam():
    X = sp.csr_matrix(np.array([[1.0], [1.0]]))
    assert tree_train(X, np.array([0, 1]), 3).label == SCAM


@given(st.integers(0, 10**6), st.integers(2, 25), st.integers(1, 5))
def test_best_split_matches_exhaustive_oracle(seed, n, d):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, (n, d)).astype(float) * (rng.random((n, d)) < 0.6)
    y = rng.integers(0, 2, n)
    ours = best_split(sp.csc_matrix(X), y)
    ref = exhaustive_best_split(X, y)
    if ref is None:
        assert ours is None
        return
    imp, j, thr = ours
    assert 2 * imp / n == pytest.approx(ref[0], abs=1e-12)
    assert split_score(X, y, j, thr) == pytest.approx(ref[0], abs=1e-12)
    assert (j, thr) == (ref[1], ref[2])


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_tree_respects_depth_and_fits_training_data(seed, depth):
    rng = np.random.default_rng(seed)
    X = rng.random((40, 4))
    y = (X[:, 0] + X[:, 1] > 1).astype(int)
    tree = tree_train(sp.csr_matrix(X), y, depth)
    assert tree.depth() <= depth
    deep = tree_train(sp.csr_matrix(X), y, 40)
    assert (tree_predict(deep, sp.csr_matrix(X)) == y).all()


# --- logistic --------------------------------------------------------------------------

@given(st.integers(0, 10**6), st.floats(0.01, 100))
def test_logistic_gradient_matches_finite_differences(seed, C):
    rng = np.random.default_rng(seed)
    X = sp.csr_matrix(rng.normal(size=(12, 4)))
    y = rng.integers(0, 2, 12).astype(float)
    w = rng.normal(size=4)
    b = float(rng.normal())
    _, gw, gb = logistic_objective(w, b, X, y, C)
    theta = np.append(w, b)
    num = central_difference(lambda th: logistic_objective(th[:-1], th[-1], X, y, C)[0], theta)
    assert np.allclose(np.append(gw, gb), num, atol=1e-6)


def test_logistic_separable_and_monotone_loss():
    X = sp.csr_matrix(np.array([[1.0], [-1.0]]))
    model = logistic_train(X, np.array([1, 0]), C=100.0)
    assert logistic_predict(model, X).tolist() == [1, 0]
    hist = model.loss_history
    assert all(b <= a + 1e-15 for a, b in zip(hist, hist[1:]))


def test_logistic_tiny_C_predicts_majority():
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.normal(size=(50, 3)))
    y = (rng.random(50) < 0.3).astype(int)
    model = logistic_train(X, y, C=1e-8)
    assert np.abs(model.weights).max() < 1e-6
    assert logistic_predict(model, X).tolist() == [int(y.mean() >= 0.5)] * 50


def test_logistic_reports_non_convergence(caplog):
    X = sp.csr_matrix(np.array([[1.0], [-1.0], [0.5]]))
    model = logistic_train(X, np.array([1, 0, 1]), C=1e6, max_iter=2)
    assert not model.converged and model.n_iter == 2
    assert "did not converge" in caplog.text
    with pytest.raises(ValueError):
        logistic_train(X, np.array([1, 0, 1]), C=0)


# --- evaluation and runs -------------------------------------------------------------------

def test_evaluate_examples():
    r = EvalReport.from_counts(103, 11, 49, 8637)
    assert round(r.recall, 3) == 0.678 and round(r.precision, 3) == 0.904
    r = EvalReport.from_counts(58, 7, 94, 8641)
    assert round(r.recall, 3) == 0.382 and round(r.precision, 3) == 0.892
    r = evaluate([1, 0, 1, 0], [1, 0, 1, 0])
    assert (r.recall, r.precision, r.size) == (1.0, 1.0, 4)
    r = evaluate([0, 0], [0, 0])
    assert r.recall is None and r.precision is None
    with pytest.raises(ValueError):
        evaluate([1], [1, 0])


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), max_size=50))
def test_evaluate_invariants(pairs):
    p = [a for a, _ in pairs]
    y = [b for _, b in pairs]
    r = evaluate(p, y)
    assert r.size == len(pairs)
    if r.tp + r.fn:
        assert r.recall == r.tp / (r.tp + r.fn)


def test_run_end_to_end_on_rows():
    ds = Dataset([Row(f"r{i:04d}", T0 + timedelta(minutes=i),
                      ("prestam", "obteng", f"n{i % 3}") if i % 5 == 0 else (f"w{i % 11}", f"v{i % 7}"),
                      int(i % 5 == 0), 5) for i in range(200)])
    for spec in (RunSpec("knn", {"k": 1}), RunSpec("tree", {"max_depth": 3}),
                 RunSpec("logistic", {"C": 10.0})):
        folds, final = run(spec, ds)
        assert len(folds) == 4
        assert final.size == 40
        assert final.recall == 1.0 and final.precision == 1.0
    with pytest.raises(ValueError):
        RunSpec.from_dict({"classifier": "svm"})
