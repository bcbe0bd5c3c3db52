"""Least-squares regression of fun ratings on standardized game features."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

FEATURE_COLUMNS = ("entropy_bits", "advantage", "expected_length", "external")


class FeatureError(ValueError):
    pass


class RankDeficientError(ValueError):
    pass


@dataclass
class FeatureMatrix:
    game_ids: list[str]
    columns: list[str]
    raw: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    @property
    def values(self) -> np.ndarray:
        """Standardized features, one row per game."""
        return (self.raw - self.means) / self.stds

    def standardize(self, row: Mapping[str, float]) -> np.ndarray:
        missing = [c for c in self.columns if c not in row]
        if missing:
            raise FeatureError(f"missing feature columns: {', '.join(missing)}")
        x = np.array([float(row[c]) for c in self.columns])
        return (x - self.means) / self.stds


def build_features(rows: Mapping[str, Mapping[str, float]], columns: Sequence[str] | None = None,
                   external: Mapping[str, float] | None = None) -> FeatureMatrix:
    """Z-score the selected columns of ``rows`` (game id -> feature values).

    ``external`` adds an ``external`` column joined on game id; ids must match exactly.
    """
    game_ids = list(rows)
    if len(set(game_ids)) != len(game_ids):
        raise FeatureError("duplicate game ids")
    if columns is None:
        first = next(iter(rows.values()), {})
        columns = [c for c in first if c != "game_id"]
    columns = list(columns)
    if external is not None:
        unmatched = sorted(set(game_ids) ^ set(external))
        if unmatched:
            raise FeatureError(f"external scores do not match game ids: {', '.join(unmatched)}")
        columns = [c for c in columns if c != "external"] + ["external"]
    if not columns:
        raise FeatureError("no feature columns selected")
    raw = np.empty((len(game_ids), len(columns)))
    for i, gid in enumerate(game_ids):
        for j, col in enumerate(columns):
            value = external[gid] if col == "external" and external is not None else rows[gid].get(col)
            try:
                raw[i, j] = float(value)
            except (TypeError, ValueError):
                raise FeatureError(f"{gid}: non-numeric {col} value {value!r}") from None
            if not math.isfinite(raw[i, j]):
                raise FeatureError(f"{gid}: non-finite {col} value {value!r}")
    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    flat = [c for c, s in zip(columns, stds) if not s > 0]
    if flat:
        raise FeatureError(f"zero-variance columns: {', '.join(flat)}")
    return FeatureMatrix(game_ids, columns, raw, means, stds)


@dataclass
class RegressionModel:
    intercept: float
    weights: dict[str, float]
    r_squared: float
    means: dict[str, float] = field(default_factory=dict)
    stds: dict[str, float] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "intercept": self.intercept,
            "weights": self.weights,
            "standardization": {c: {"mean": self.means[c], "std": self.stds[c]} for c in self.weights},
            "r_squared": self.r_squared,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RegressionModel":
        std = data["standardization"]
        return cls(float(data["intercept"]), {k: float(v) for k, v in data["weights"].items()},
                   float(data["r_squared"]), {c: float(std[c]["mean"]) for c in std},
                   {c: float(std[c]["std"]) for c in std}, data.get("metadata", {}))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RegressionModel":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_ols(features: FeatureMatrix, targets: Mapping[str, float]) -> RegressionModel:
    missing = [g for g in features.game_ids if g not in targets]
    if missing:
        raise FeatureError(f"no target for games: {', '.join(missing)}")
    n, p = features.raw.shape
    if n < p + 2:
        raise FeatureError(f"need at least {p + 2} games for {p} features, got {n}")
    X = np.column_stack([np.ones(n), features.values])
    y = np.array([float(targets[g]) for g in features.game_ids])
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficientError("design matrix is rank deficient (collinear features)")
    beta = np.linalg.solve(X.T @ X, X.T @ y)
    resid = y - X @ beta
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 0.0
    cols = features.columns
    return RegressionModel(
        intercept=float(beta[0]),
        weights={c: float(w) for c, w in zip(cols, beta[1:])},
        r_squared=r2,
        means={c: float(m) for c, m in zip(cols, features.means)},
        stds={c: float(s) for c, s in zip(cols, features.stds)},
    )


def predict_fun(model: RegressionModel, row: Mapping[str, float]) -> float:
    missing = [c for c in model.weights if c not in row]
    if missing:
        raise FeatureError(f"missing feature columns: {', '.join(missing)}")
    return model.intercept + sum(
        w * (float(row[c]) - model.means[c]) / model.stds[c] for c, w in model.weights.items())


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    xc, yc = x - x.mean(), y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    return float(xc @ yc) / denom if denom > 0 else float("nan")


# CSV helpers

def read_table(path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "game_id" not in reader.fieldnames:
            raise FeatureError(f"{path}: header must include game_id")
        return list(reader.fieldnames), list(reader)


def read_feature_rows(path) -> dict[str, dict[str, str]]:
    _, rows = read_table(path)
    out: dict[str, dict[str, str]] = {}
    for row in rows:
        gid = row["game_id"]
        if gid in out:
            raise FeatureError(f"{path}: duplicate game id {gid!r}")
        out[gid] = {k: v for k, v in row.items() if k != "game_id" and v not in (None, "")}
    return out


def read_scores(path, column: str | None = None, aggregate: str = "mean") -> dict[str, float]:
    """Per-game scores from a CSV; repeated game ids are averaged (or medianed)."""
    header, rows = read_table(path)
    if column is None:
        others = [h for h in header if h != "game_id"]
        if not others:
            raise FeatureError(f"{path}: no value column")
        column = "rating" if "rating" in others else others[0]
    grouped: dict[str, list[float]] = {}
    for line, row in enumerate(rows, start=2):
        try:
            grouped.setdefault(row["game_id"], []).append(float(row[column]))
        except (TypeError, ValueError):
            raise FeatureError(f"{path}:{line}: non-numeric {column} value {row.get(column)!r}") from None
    reduce = np.mean if aggregate == "mean" else np.median
    return {g: float(reduce(v)) for g, v in grouped.items()}
