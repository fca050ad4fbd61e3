"""Run configuration shared by CLI commands, read from a JSON file.

Schema (every key optional)::

    {
      "inputs": ["raw/server_A.jsonl", ...],
      "out": "out/",
      "tz_offset": -5,
      "thresholds": {"candidate": 0.3, "variant": 0.8,
                     "merge_cosine": 0.5, "merge_overlap": 0.6},
      "classifiers": [{"classifier": "knn", "params": {"k": 3},
                       "features": {"word_length": false, "country": false,
                                    "concentration": false},
                       "train_fraction": 0.8, "folds": 5}],
      "periods": {"a": ["2020-03-01", "2020-03-10"], "b": ["2020-03-24", "2020-03-30"]},
      "stems": ["troch"],
      "min_words": 5
    }

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from chatcorpus.classify import RunSpec

DEFAULT_THRESHOLDS = {"candidate": 0.3, "variant": 0.8, "merge_cosine": 0.5, "merge_overlap": 0.6}


class RunConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    inputs: list[Path] = field(default_factory=list)
    out: Path | None = None
    tz_offset: float = -5.0
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    classifiers: list[RunSpec] = field(default_factory=lambda: [RunSpec("knn", {"k": 3})])
    periods: dict[str, tuple[date, date]] = field(default_factory=dict)
    stems: list[str] = field(default_factory=lambda: ["troch"])
    min_words: int = 5

    def __post_init__(self):
        unknown = set(self.thresholds) - set(DEFAULT_THRESHOLDS)
        if unknown:
            raise RunConfigError(f"unknown thresholds: {', '.join(sorted(unknown))}")
        self.thresholds = {**DEFAULT_THRESHOLDS, **self.thresholds}
        for k, v in self.thresholds.items():
            if not 0.0 <= float(v) <= 1.0:
                raise RunConfigError(f"threshold {k}={v} is not in [0, 1]")

    @classmethod
    def from_dict(cls, d: dict, base: Path = Path(".")) -> "RunConfig":
        known = {"inputs", "out", "tz_offset", "thresholds", "classifiers", "periods", "stems", "min_words"}
        unknown = set(d) - known
        if unknown:
            raise RunConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kw: dict = {}
        if "inputs" in d:
            kw["inputs"] = [base / p for p in d["inputs"]]
        if d.get("out"):
            kw["out"] = base / d["out"]
        if "tz_offset" in d:
            kw["tz_offset"] = float(d["tz_offset"])
        if "thresholds" in d:
            kw["thresholds"] = dict(d["thresholds"])
        if "classifiers" in d:
            try:
                kw["classifiers"] = [RunSpec.from_dict(c) for c in d["classifiers"]]
            except (TypeError, ValueError) as exc:
                raise RunConfigError(f"bad classifier spec: {exc}") from None
        if "periods" in d:
            kw["periods"] = {k: parse_period(v) for k, v in d["periods"].items()}
        if "stems" in d:
            kw["stems"] = list(d["stems"])
        if "min_words" in d:
            kw["min_words"] = int(d["min_words"])
        return cls(**kw)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise RunConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
        if not isinstance(d, dict):
            raise RunConfigError(f"{path}: top level must be an object")
        return cls.from_dict(d, path.parent)


def parse_period(v) -> tuple[date, date]:
    """``["2020-03-01", "2020-03-10"]`` or ``"2020-03-01:2020-03-10"``, inclusive."""
    if isinstance(v, str):
        v = v.split(":")
    try:
        a, b = (date.fromisoformat(x) for x in v)
    except (TypeError, ValueError):
        raise RunConfigError(f"bad period {v!r}; expected two ISO dates") from None
    if a > b:
        raise RunConfigError(f"period {a}..{b} is reversed")
    return a, b
