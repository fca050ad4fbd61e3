"""Regenerate tests/data/cdf_grid.json from scipy (reference values only).

Besides the CDF grid it stores Welch, Pearson and ANOVA results on a few
fixed samples.
"""

import json
from pathlib import Path

from scipy import stats

T_POINTS = [-40.0, -6.5, -3.0, -2.0, -1.0, -0.25, 0.0, 0.3, 1.0, 1.96, 2.5, 4.0, 8.0, 25.0]
T_DOFS = [1, 2, 3, 5, 10, 29.5, 30, 100, 1000, 35000]
F_POINTS = [0.0, 0.05, 0.3, 0.9, 1.0, 1.5, 2.7, 4.0, 10.0, 60.0]
F_DOFS = [(1, 1), (1, 10), (2, 5), (3, 27), (5, 2), (10, 10), (4, 400), (40, 3), (100, 1000)]

WELCH = ([12.1, 14.3, 11.8, 15.2, 13.9, 12.7, 16.1], [10.2, 11.9, 9.8, 12.5, 10.1, 11.4])
PEARSON = (list(range(1, 11)), [2.1, 3.9, 6.2, 7.8, 9.7, 12.5, 13.1, 16.4, 17.2, 20.9])
ANOVA = [[4.2, 5.1, 3.9, 4.8], [6.3, 5.9, 7.1, 6.6, 6.0], [5.0, 4.4, 5.6]]


def main():
    t = [[x, d, float(stats.t.cdf(x, d))] for d in T_DOFS for x in T_POINTS]
    f = [[x, a, b, float(stats.f.cdf(x, a, b))] for a, b in F_DOFS for x in F_POINTS]
    w = stats.ttest_ind(*WELCH, equal_var=False)
    r = stats.pearsonr(*PEARSON)
    a = stats.f_oneway(*ANOVA)
    samples = {
        "welch": {"a": WELCH[0], "b": WELCH[1], "t": float(w.statistic), "p": float(w.pvalue)},
        "pearson": {"x": PEARSON[0], "y": PEARSON[1], "r": float(r.statistic), "p": float(r.pvalue)},
        "anova": {"groups": ANOVA, "f": float(a.statistic), "p": float(a.pvalue)},
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "cdf_grid.json"
    out.write_text(json.dumps({"t_cdf": t, "f_cdf": f, "samples": samples}, indent=0) + "\n")
    print(f"{len(t)} t points, {len(f)} F points -> {out}")


if __name__ == "__main__":
    main()
