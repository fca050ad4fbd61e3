"""Pearson correlation, Welch t-test, one-way ANOVA and OLS with exact p-values.

Student-t and F tail probabilities go through the regularized incomplete
beta function, evaluated by its continued fraction (modified Lentz).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


class DegenerateDataError(ValueError):
    pass


class RankDeficiencyError(ValueError):
    pass


_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc needs a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
              + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(log_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_sf2(t: float, dof: float) -> float:
    """Two-sided tail P(|T| >= |t|) for Student t."""
    if math.isinf(t):
        return 0.0
    if math.isnan(t):
        return math.nan
    return betainc(dof / 2.0, 0.5, dof / (dof + t * t))


def t_cdf(t: float, dof: float) -> float:
    tail = 0.5 * t_sf2(t, dof)
    return 1.0 - tail if t > 0 else tail


def f_cdf(f: float, d1: float, d2: float) -> float:
    if f <= 0:
        return 0.0
    if math.isinf(f):
        return 1.0
    return betainc(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2))


def f_sf(f: float, d1: float, d2: float) -> float:
    """Upper tail of the F distribution, computed without cancellation."""
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n != len(y) or n < 3:
        raise ValueError("pearson needs two equal-length samples of at least 3")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DegenerateDataError("zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1 - r * r))
    return r, t_sf2(t, n - 2)


def welch_t(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """Welch statistic, Satterthwaite degrees of freedom, two-sided p."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise DegenerateDataError("each sample needs at least two observations")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if not (math.isfinite(va) and math.isfinite(vb)):
        raise DegenerateDataError("non-finite variance")
    qa, qb = va / na, vb / nb
    if qa + qb == 0:
        raise DegenerateDataError("both samples are constant")
    t = float((a.mean() - b.mean()) / math.sqrt(qa + qb))
    dof = (qa + qb) ** 2 / (qa * qa / (na - 1) + qb * qb / (nb - 1))
    return t, float(dof), t_sf2(t, dof)


def anova_oneway(groups: Sequence[Sequence[float]]) -> tuple[float, int, int, float]:
    """Classic equal-variance one-way ANOVA: (F, between dof, within dof, p)."""
    gs = [np.asarray(g, dtype=float) for g in groups]
    if len(gs) < 2 or any(len(g) < 2 for g in gs):
        raise DegenerateDataError("ANOVA needs at least two groups of at least two observations")
    n = sum(len(g) for g in gs)
    k = len(gs)
    grand = sum(g.sum() for g in gs) / n
    ssb = sum(len(g) * (g.mean() - grand) ** 2 for g in gs)
    ssw = sum(((g - g.mean()) ** 2).sum() for g in gs)
    d1, d2 = k - 1, n - k
    if ssw == 0:
        raise DegenerateDataError("no variation within groups")
    f = float((ssb / d1) / (ssw / d2))
    return f, d1, d2, f_sf(f, d1, d2)


@dataclass(frozen=True)
class OlsFit:
    names: list[str]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    r_squared: float
    n: int
    dof: int
    residuals: np.ndarray

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def table(self) -> list[dict]:
        rows = [{"term": nm, "coef": float(c), "se": float(s), "t": float(t), "p": float(p)}
                for nm, c, s, t, p in zip(self.names, self.coefficients, self.std_errors,
                                          self.t_values, self.p_values)]
        return rows


def ols(columns: Mapping[str, Sequence[float]], y: Sequence[float], intercept: bool = True) -> OlsFit:
    """Least squares via QR with homoskedastic standard errors."""
    y = np.asarray(y, dtype=float)
    names = (["const"] if intercept else []) + list(columns)
    cols = ([np.ones(len(y))] if intercept else []) + [np.asarray(columns[c], dtype=float) for c in columns]
    for nm, c in zip(names, cols):
        if len(c) != len(y):
            raise ValueError(f"column {nm} has {len(c)} rows, expected {len(y)}")
    X = np.column_stack(cols) if cols else np.empty((len(y), 0))
    n, p = X.shape
    if p == 0 or n <= p:
        raise DegenerateDataError(f"need more observations ({n}) than coefficients ({p})")

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    scale = np.linalg.norm(X, axis=0)
    for j in range(p):
        if scale[j] == 0 or diag[j] <= 1e-10 * scale[j]:
            raise RankDeficiencyError(f"column {names[j]!r} is collinear with earlier columns")

    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    dof = n - p
    ssr = float(resid @ resid)
    sigma2 = ssr / dof
    r_inv = np.linalg.inv(r)
    cov_diag = (r_inv * r_inv).sum(axis=1) * sigma2
    se = np.sqrt(cov_diag)

    tvals = np.empty(p)
    pvals = np.empty(p)
    for j in range(p):
        if se[j] == 0:
            tvals[j] = 0.0 if beta[j] == 0 else math.copysign(math.inf, beta[j])
        else:
            tvals[j] = beta[j] / se[j]
        pvals[j] = 1.0 if tvals[j] == 0 else t_sf2(float(tvals[j]), dof)

    if intercept:
        sst = float(((y - y.mean()) ** 2).sum())
    else:
        sst = float(y @ y)
    # constant response: nothing to explain
    r2 = 0.0 if sst == 0 else max(0.0, min(1.0, 1.0 - ssr / sst))
    return OlsFit(names, beta, se, tvals, pvals, r2, n, dof, resid)


_FORMULA = re.compile(r"^\s*(\w+)\s*~\s*(.+?)\s*$")


def parse_formula(formula: str) -> tuple[str, list[str], bool]:
    """``y ~ x1 + x2`` (append ``- 1`` to drop the intercept)."""
    m = _FORMULA.match(formula)
    if not m:
        raise ValueError(f"cannot parse formula {formula!r}")
    rhs = m.group(2).replace(" ", "")
    intercept = True
    if rhs.endswith("-1"):
        intercept = False
        rhs = rhs[:-2]
    terms = [t for t in rhs.split("+") if t and t != "1"]
    return m.group(1), terms, intercept


def ols_formula(data: Mapping[str, Sequence[float]], formula: str) -> OlsFit:
    yname, terms, intercept = parse_formula(formula)
    missing = [c for c in [yname, *terms] if c not in data]
    if missing:
        raise KeyError(f"columns not found: {', '.join(missing)}")
    return ols({t: data[t] for t in terms}, data[yname], intercept=intercept)
