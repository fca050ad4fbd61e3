"""Scam classification: features, kNN, CART, L2 logistic regression, chronological evaluation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from chatcorpus.activity import ShareDistribution, gini, hh_concentration, word_count
from chatcorpus.misinfo import meaningful_texts
from chatcorpus.model import Corpus
from chatcorpus.text import build_index

log = logging.getLogger(__name__)

SCAM, NOT_SCAM = 1, 0


@dataclass(frozen=True)
class Row:
    message_id: str
    sent_time: datetime
    tokens: tuple[str, ...]
    label: int
    word_count: int = 0
    country: str = "UNKNOWN"
    group_hh: float = 0.0
    group_gini: float = 0.0


@dataclass
class Dataset:
    rows: list[Row]

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: (r.sent_time, r.message_id))

    def __len__(self) -> int:
        return len(self.rows)

    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.rows], dtype=int)

    def subset(self, idx: range) -> "Dataset":
        return Dataset(self.rows[idx.start:idx.stop])


def build_dataset(corpus: Corpus, scam_ids: set[str], min_tokens: int = 5) -> Dataset:
    conc = {}
    for uid in corpus.groups:
        if corpus.by_group[uid]:
            d = ShareDistribution.of_group(corpus, uid)
            conc[uid] = (hh_concentration(d), gini(d))
    rows = []
    for m, toks in meaningful_texts(corpus, min_tokens):
        hh, g = conc[m.group_uid]
        rows.append(Row(m.id, m.sent_time, tuple(toks), SCAM if m.id in scam_ids else NOT_SCAM,
                        word_count(m.text), m.sender.country.tag, hh, g))
    return Dataset(rows)


def _snap_forward(rows: Sequence[Row], cut: int) -> int:
    """Move a boundary past any run of rows sharing the timestamp just before it."""
    while 0 < cut < len(rows) and rows[cut].sent_time == rows[cut - 1].sent_time:
        cut += 1
    return cut


def chrono_split(ds: Dataset, train_fraction: float = 0.8) -> tuple[Dataset, Dataset]:
    n = len(ds)
    if n < 2:
        raise ValueError("need at least two rows to split")
    cut = _snap_forward(ds.rows, math.floor(train_fraction * n))
    return Dataset(ds.rows[:cut]), Dataset(ds.rows[cut:])


@dataclass
class FoldPlan:
    folds: list[tuple[range, range]]


def forward_chain_folds(train: Dataset, k: int = 5) -> FoldPlan:
    """k chronological blocks; fold i trains on blocks 1..i and tests on block i+1."""
    if k < 2:
        raise ValueError("forward chaining needs k >= 2")
    n = len(train)
    if n < k:
        raise ValueError(f"{n} rows cannot fill {k} blocks")
    size = n // k
    bounds = [0] + [_snap_forward(train.rows, size * i) for i in range(1, k)] + [n]
    for i in range(1, len(bounds)):
        bounds[i] = max(bounds[i], bounds[i - 1])
    folds = []
    for i in range(1, k):
        tr, te = range(0, bounds[i]), range(bounds[i], bounds[i + 1])
        if len(tr) and len(te):
            folds.append((tr, te))
    return FoldPlan(folds)


@dataclass
class FeatureSpec:
    word_length: bool = False
    country: bool = False
    concentration: bool = False

    def extra_names(self) -> list[str]:
        names = []
        if self.word_length:
            names.append("word_count")
        if self.country:
            names += ["country_CO", "country_VE"]
        if self.concentration:
            names += ["group_hh", "group_gini"]
        return names


@dataclass
class Features:
    X_train: sp.csr_matrix
    X_test: sp.csr_matrix
    vocabulary: dict[str, int]
    names: list[str] = field(default_factory=list)


def _token_matrix(rows: Sequence[Row], vocab: dict[str, int], idf: np.ndarray) -> sp.csr_matrix:
    data, indices, indptr = [], [], [0]
    for r in rows:
        counts: dict[int, int] = {}
        for t in r.tokens:
            j = vocab.get(t)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        for j in sorted(counts):
            w = counts[j] * idf[j]
            if w != 0.0:
                indices.append(j)
                data.append(w)
        indptr.append(len(indices))
    return sp.csr_matrix((np.array(data, dtype=float), np.array(indices, dtype=np.int64),
                          np.array(indptr, dtype=np.int64)), shape=(len(rows), len(vocab)))


def _extras(rows: Sequence[Row], spec: FeatureSpec, wmin: float, wmax: float) -> np.ndarray:
    cols = []
    if spec.word_length:
        w = np.array([r.word_count for r in rows], dtype=float)
        span = wmax - wmin
        cols.append(np.clip((w - wmin) / span, 0.0, 1.0) if span > 0 else np.zeros(len(rows)))
    if spec.country:
        cols.append(np.array([r.country == "CO" for r in rows], dtype=float))
        cols.append(np.array([r.country == "VE" for r in rows], dtype=float))
    if spec.concentration:
        cols.append(np.array([r.group_hh for r in rows], dtype=float))
        cols.append(np.array([r.group_gini for r in rows], dtype=float))
    return np.column_stack(cols) if cols else np.empty((len(rows), 0))


def build_features(train: Sequence[Row], test: Sequence[Row], spec: FeatureSpec | None = None) -> Features:
    """TF-IDF token features plus optional dense extras, fitted on train rows only."""
    spec = spec or FeatureSpec()
    if not train:
        raise ValueError("cannot fit features on an empty training set")
    index = build_index(r.tokens for r in train)
    vocab = index.vocabulary
    idf = np.zeros(len(vocab))
    for t, j in vocab.items():
        idf[j] = index.idf(t)
    wc = [r.word_count for r in train]
    wmin, wmax = float(min(wc)), float(max(wc))
    mats = []
    for rows in (train, test):
        tok = _token_matrix(rows, vocab, idf)
        ext = _extras(rows, spec, wmin, wmax)
        mats.append(sp.hstack([tok, sp.csr_matrix(ext)], format="csr") if ext.shape[1] else tok)
    names = sorted(vocab, key=vocab.get) + spec.extra_names()
    return Features(mats[0], mats[1], vocab, names)


def _row_normalize(X: sp.csr_matrix) -> sp.csr_matrix:
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    return sp.diags(1.0 / norms) @ X


def knn_predict(X_train, y_train, k: int, X_query, chunk: int = 512) -> np.ndarray:
    """Majority vote of the k most cosine-similar training rows.

    Distance ties go to the earlier training row; vote ties go to scam.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    X_train = sp.csr_matrix(X_train)
    X_query = sp.csr_matrix(X_query)
    y_train = np.asarray(y_train, dtype=int)
    if k > X_train.shape[0]:
        raise ValueError(f"k={k} exceeds training size {X_train.shape[0]}")
    A = _row_normalize(X_train)
    Q = _row_normalize(X_query)
    out = np.empty(Q.shape[0], dtype=int)
    for start in range(0, Q.shape[0], chunk):
        sims = (Q[start:start + chunk] @ A.T).toarray()
        dist = 1.0 - sims
        nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
        votes = y_train[nearest].sum(axis=1)
        out[start:start + chunk] = (2 * votes >= k).astype(int)
    return out


@dataclass
class TreeNode:
    label: int
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    def depth(self) -> int:
        if self.feature is None:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


def _majority(y: np.ndarray) -> int:
    pos = int(y.sum())
    return SCAM if 2 * pos >= len(y) else NOT_SCAM


def _exact_impurity(n: int, P: int, nl: int, pl: int) -> Fraction:
    nr, pr = n - nl, P - pl
    return Fraction(pl * (nl - pl), nl) + Fraction(pr * (nr - pr), nr)


def best_split(X: sp.csc_matrix, y: np.ndarray):
    """Best (impurity, feature, threshold) over all midpoints, or None.

    Impurity is the size-weighted Gini of the two children (times n/2, which
    does not change the argmin). Ties prefer the lower feature, then the
    lower threshold. Assumes non-negative features.
    """
    n = len(y)
    P = int(y.sum())
    X = sp.csc_matrix(X)
    X.sort_indices()
    nnz_per_col = np.diff(X.indptr)
    cols = np.repeat(np.arange(X.shape[1]), nnz_per_col)
    vals = X.data
    labs = y[X.indices]
    keep = vals != 0
    cols, vals, labs = cols[keep], vals[keep], labs[keep]
    order = np.lexsort((vals, cols))
    cols, vals, labs = cols[order], vals[order], labs[order]

    nnz = np.bincount(cols, minlength=X.shape[1])
    nnz_pos = np.bincount(cols, weights=labs, minlength=X.shape[1])
    zeros = n - nnz
    zero_pos = P - nnz_pos

    cand_nl, cand_pl, cand_col, cand_thr = [], [], [], []

    def impurity(nl, pl):
        nr, pr = n - nl, P - pl
        return pl * (nl - pl) / nl + pr * (nr - pr) / nr

    # zeros | non-zeros
    zc = np.nonzero((zeros > 0) & (nnz > 0))[0]
    if len(zc):
        starts = np.searchsorted(cols, zc)
        cand_nl.append(zeros[zc])
        cand_pl.append(zero_pos[zc])
        cand_col.append(zc)
        cand_thr.append(vals[starts] / 2.0)

    # between consecutive distinct non-zero values of one column
    if len(cols) > 1:
        col_start = np.searchsorted(cols, cols)
        rank = np.arange(len(cols)) - col_start + 1
        cum_pos = np.cumsum(labs)
        base = np.concatenate([[0.0], cum_pos])[col_start]
        within_pos = cum_pos - base
        left_n = zeros[cols] + rank
        left_p = zero_pos[cols] + within_pos
        ok = np.zeros(len(cols), dtype=bool)
        ok[:-1] = (cols[:-1] == cols[1:]) & (vals[:-1] < vals[1:])
        idx = np.nonzero(ok)[0]
        if len(idx):
            cand_nl.append(left_n[idx])
            cand_pl.append(left_p[idx])
            cand_col.append(cols[idx])
            cand_thr.append((vals[idx] + vals[idx + 1]) / 2.0)

    if not cand_nl:
        return None
    nl = np.concatenate(cand_nl).astype(float)
    pl = np.concatenate(cand_pl).astype(float)
    col = np.concatenate(cand_col)
    thr = np.concatenate(cand_thr)
    imp = impurity(nl, pl)
    # float rounding can split exact ties; settle near-ties with exact fractions
    near = np.nonzero(imp <= imp.min() * (1 + 1e-9) + 1e-12)[0]
    exact = [(_exact_impurity(n, P, int(nl[i]), int(pl[i])), int(col[i]), float(thr[i]), i) for i in near]
    _, _, _, best = min(exact)
    return float(imp[best]), int(col[best]), float(thr[best])


def tree_train(X, y, max_depth: int) -> TreeNode:
    """Binary CART with Gini impurity.

    Stops at ``max_depth``, on pure nodes, below two samples, or when no
    feature varies inside the node. Leaf ties go to scam.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    y = np.asarray(y, dtype=int)
    if len(y) == 0:
        raise ValueError("cannot train on an empty set")
    X = sp.csc_matrix(X)

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        yy = y[idx]
        node = TreeNode(_majority(yy))
        if depth >= max_depth or len(idx) < 2 or yy.min() == yy.max():
            return node
        sub = X[idx]
        found = best_split(sub, yy)
        if found is None:
            return node
        _, f, thr = found
        col = sub[:, f].toarray().ravel()
        node.feature, node.threshold = f, thr
        node.left = grow(idx[col <= thr], depth + 1)
        node.right = grow(idx[col > thr], depth + 1)
        return node

    return grow(np.arange(len(y)), 0)


def tree_predict(tree: TreeNode, X) -> np.ndarray:
    X = sp.csc_matrix(X)
    out = np.empty(X.shape[0], dtype=int)

    def route(node: TreeNode, idx: np.ndarray):
        if len(idx) == 0:
            return
        if node.feature is None:
            out[idx] = node.label
            return
        col = X[idx][:, node.feature].toarray().ravel()
        route(node.left, idx[col <= node.threshold])
        route(node.right, idx[col > node.threshold])

    route(tree, np.arange(X.shape[0]))
    return out


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    converged: bool
    n_iter: int
    loss_history: list[float] = field(default_factory=list)

    def probability(self, X) -> np.ndarray:
        z = np.asarray(X @ self.weights).ravel() + self.bias
        return 1.0 / (1.0 + np.exp(-z))


def logistic_objective(w: np.ndarray, b: float, X, y: np.ndarray, C: float):
    """Mean log-loss + ||w||^2 / (2 C n); returns (loss, grad_w, grad_b)."""
    n = X.shape[0]
    z = np.asarray(X @ w).ravel() + b
    loss = np.where(y == 1, np.logaddexp(0.0, -z), np.logaddexp(0.0, z)).mean()
    loss += (w @ w) / (2.0 * C * n)
    p = 0.5 * (1.0 + np.tanh(0.5 * z))  # overflow-free sigmoid
    r = (p - y) / n
    grad_w = np.asarray(X.T @ r).ravel() + w / (C * n)
    return float(loss), grad_w, float(r.sum())


def logistic_train(X, y, C: float = 1.0, max_iter: int = 1000, tol: float = 1e-6) -> LogisticModel:
    """Gradient descent with Armijo backtracking; the intercept is not penalized."""
    if C <= 0:
        raise ValueError("C must be positive")
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=float)
    w = np.zeros(X.shape[1])
    b = 0.0
    loss, gw, gb = logistic_objective(w, b, X, y, C)
    history = [loss]
    step = 1.0
    for it in range(1, max_iter + 1):
        gnorm2 = float(gw @ gw + gb * gb)
        if math.sqrt(gnorm2) <= tol:
            return LogisticModel(w, b, True, it - 1, history)
        while True:
            w_new, b_new = w - step * gw, b - step * gb
            new_loss, ngw, ngb = logistic_objective(w_new, b_new, X, y, C)
            if new_loss <= loss - 0.5 * step * gnorm2:
                break
            step *= 0.5
            if step < 1e-20:
                log.warning("line search stalled at iteration %d", it)
                return LogisticModel(w, b, False, it, history)
        w, b, loss, gw, gb = w_new, b_new, new_loss, ngw, ngb
        history.append(loss)
        step = min(step * 2.0, 1e6)
    converged = math.sqrt(float(gw @ gw + gb * gb)) <= tol
    if not converged:
        log.warning("logistic regression did not converge in %d iterations", max_iter)
    return LogisticModel(w, b, converged, max_iter, history)


def logistic_predict(model: LogisticModel, X) -> np.ndarray:
    return (model.probability(sp.csr_matrix(X)) >= 0.5).astype(int)


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def size(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_counts(cls, tp, fp, fn, tn) -> "EvalReport":
        return cls(int(tp), int(fp), int(fn), int(tn))

    def as_row(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
                "recall": self.recall, "precision": self.precision}


def evaluate(predictions, labels) -> EvalReport:
    p = np.asarray(predictions, dtype=int)
    t = np.asarray(labels, dtype=int)
    if p.shape != t.shape:
        raise ValueError("predictions and labels differ in length")
    return EvalReport(int(((p == 1) & (t == 1)).sum()), int(((p == 1) & (t == 0)).sum()),
                      int(((p == 0) & (t == 1)).sum()), int(((p == 0) & (t == 0)).sum()))


@dataclass
class RunSpec:
    classifier: str = "knn"
    params: dict = field(default_factory=dict)
    features: FeatureSpec = field(default_factory=FeatureSpec)
    train_fraction: float = 0.8
    folds: int = 5

    @classmethod
    def from_dict(cls, d: dict) -> "RunSpec":
        name = d.get("classifier", "knn")
        if name not in ("knn", "tree", "logistic"):
            raise ValueError(f"unknown classifier {name!r}")
        return cls(name, dict(d.get("params", {})), FeatureSpec(**d.get("features", {})),
                   float(d.get("train_fraction", 0.8)), int(d.get("folds", 5)))


def fit_predict(spec: RunSpec, train: Dataset, test: Dataset) -> np.ndarray:
    feats = build_features(train.rows, test.rows, spec.features)
    y = train.labels()
    p = spec.params
    if spec.classifier == "knn":
        return knn_predict(feats.X_train, y, int(p.get("k", 3)), feats.X_test)
    if spec.classifier == "tree":
        tree = tree_train(feats.X_train, y, int(p.get("max_depth", 12)))
        return tree_predict(tree, feats.X_test)
    model = logistic_train(feats.X_train, y, float(p.get("C", 1.0)),
                           int(p.get("max_iter", 1000)), float(p.get("tol", 1e-6)))
    return logistic_predict(model, feats.X_test)


def check_fold_order(train: Dataset, plan: FoldPlan) -> None:
    for tr, te in plan.folds:
        last_train = train.rows[tr.stop - 1].sent_time
        if last_train >= train.rows[te.start].sent_time:
            raise AssertionError(f"fold trains on data at or after its test start ({last_train})")


def run(spec: RunSpec, ds: Dataset) -> tuple[list[EvalReport], EvalReport]:
    """Forward-chained validation on the training part, then the held-out test."""
    train, test = chrono_split(ds, spec.train_fraction)
    plan = forward_chain_folds(train, spec.folds)
    check_fold_order(train, plan)
    fold_reports = []
    for tr, te in plan.folds:
        a, b = train.subset(tr), train.subset(te)
        fold_reports.append(evaluate(fit_predict(spec, a, b), b.labels()))
    final = evaluate(fit_predict(spec, train, test), test.labels())
    return fold_reports, final
