import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novelgames.funmodel import (
    FeatureError,
    RankDeficientError,
    RegressionModel,
    build_features,
    fit_ols,
    pearson_r,
    predict_fun,
    read_feature_rows,
    read_scores,
)

COLUMNS = ["entropy_bits", "advantage", "expected_length"]


def random_rows(n=30, seed=0):
    rng = np.random.default_rng(seed)
    return {
        f"g{i:02d}": {"entropy_bits": rng.uniform(0, 1.58), "advantage": rng.uniform(-1, 1),
                      "expected_length": rng.uniform(5, 60)}
        for i in range(n)
    }


def planted(rows, intercept=40.0, weights=(12.0, -7.5, 3.25)):
    fm = build_features(rows, COLUMNS)
    y = intercept + fm.values @ np.array(weights)
    return fm, dict(zip(fm.game_ids, y))


class TestBuildFeatures:
    def test_constant_column_rejected(self):
        rows = {"a": {"x": 1.0}, "b": {"x": 1.0}, "c": {"x": 1.0}}
        with pytest.raises(FeatureError, match="zero-variance"):
            build_features(rows, ["x"])

    def test_two_point_zscore(self):
        fm = build_features({"a": {"x": 0.0}, "b": {"x": 2.0}}, ["x"])
        assert fm.values[:, 0].tolist() == [-1.0, 1.0]
        assert fm.means.tolist() == [1.0] and fm.stds.tolist() == [1.0]

    def test_external_join(self):
        rows = {"a": {"x": 0.0}, "b": {"x": 2.0}, "c": {"x": 5.0}}
        fm = build_features(rows, ["x"], external={"c": 3.0, "a": 1.0, "b": 2.0})
        assert fm.columns == ["x", "external"]
        assert fm.raw[:, 1].tolist() == [1.0, 2.0, 3.0]

    def test_external_unmatched_ids_listed(self):
        rows = {"a": {"x": 0.0}, "b": {"x": 2.0}}
        with pytest.raises(FeatureError, match="b, z"):
            build_features(rows, ["x"], external={"a": 1.0, "z": 2.0})

    def test_non_numeric(self):
        with pytest.raises(FeatureError, match="non-numeric"):
            build_features({"a": {"x": "lots"}, "b": {"x": 1}}, ["x"])

    def test_missing_value(self):
        with pytest.raises(FeatureError, match="b"):
            build_features({"a": {"x": 1.0}, "b": {}}, ["x"])

    def test_standardize_uses_training_parameters(self):
        fm = build_features({"a": {"x": 0.0}, "b": {"x": 2.0}}, ["x"])
        assert fm.standardize({"x": 4.0}).tolist() == [3.0]


class TestFit:
    def test_exact_linear_recovery(self):
        fm, y = planted(random_rows())
        model = fit_ols(fm, y)
        assert model.r_squared == pytest.approx(1.0, abs=1e-9)
        assert model.intercept == pytest.approx(40.0, abs=1e-6)
        for c, w in zip(COLUMNS, (12.0, -7.5, 3.25)):
            assert model.weights[c] == pytest.approx(w, abs=1e-6)

    def test_constant_targets(self):
        fm = build_features(random_rows(), COLUMNS)
        model = fit_ols(fm, dict.fromkeys(fm.game_ids, 55.0))
        assert model.intercept == pytest.approx(55.0)
        assert all(abs(w) < 1e-9 for w in model.weights.values())
        assert model.r_squared == 0.0

    def test_duplicate_column_is_rank_deficient(self):
        rows = random_rows()
        for r in rows.values():
            r["copy"] = 2 * r["advantage"] + 1
        fm = build_features(rows, COLUMNS + ["copy"])
        with pytest.raises(RankDeficientError):
            fit_ols(fm, {g: 1.0 * i for i, g in enumerate(fm.game_ids)})

    def test_too_few_games(self):
        fm = build_features(random_rows(4), COLUMNS)
        with pytest.raises(FeatureError, match="at least 5"):
            fit_ols(fm, dict.fromkeys(fm.game_ids, 1.0))

    def test_missing_target_named(self):
        fm, y = planted(random_rows())
        del y["g07"]
        with pytest.raises(FeatureError, match="g07"):
            fit_ols(fm, y)


class TestPredict:
    def setup_method(self):
        rows = random_rows(seed=3)
        rng = np.random.default_rng(9)
        fm = build_features(rows, COLUMNS)
        self.rows, self.fm = rows, fm
        self.y = {g: 50 + 5 * rng.normal() + 3 * v for g, v in zip(fm.game_ids, fm.values[:, 0])}
        self.model = fit_ols(fm, self.y)

    def test_means_give_intercept(self):
        at_means = dict(zip(COLUMNS, self.fm.means))
        assert predict_fun(self.model, at_means) == pytest.approx(self.model.intercept, abs=1e-12)

    def test_residual_identity(self):
        X = np.column_stack([np.ones(len(self.fm.game_ids)), self.fm.values])
        beta = np.array([self.model.intercept] + [self.model.weights[c] for c in COLUMNS])
        fitted = X @ beta
        for g, f in zip(self.fm.game_ids, fitted):
            assert predict_fun(self.model, self.rows[g]) == pytest.approx(f, abs=1e-9)

    def test_zero_weights(self):
        flat = RegressionModel(7.0, dict.fromkeys(COLUMNS, 0.0), 0.0,
                               dict.fromkeys(COLUMNS, 0.0), dict.fromkeys(COLUMNS, 1.0))
        assert predict_fun(flat, {"entropy_bits": 3, "advantage": -9, "expected_length": 1e4}) == 7.0

    def test_missing_column(self):
        with pytest.raises(FeatureError, match="advantage"):
            predict_fun(self.model, {"entropy_bits": 1, "expected_length": 9})

    def test_residuals_orthogonal(self):
        y = np.array([self.y[g] for g in self.fm.game_ids])
        pred = np.array([predict_fun(self.model, self.rows[g]) for g in self.fm.game_ids])
        resid = y - pred
        assert abs(resid.sum()) < 1e-8
        for j in range(len(COLUMNS)):
            assert abs(resid @ self.fm.values[:, j]) < 1e-8

    def test_r_squared_matches_residuals(self):
        y = np.array([self.y[g] for g in self.fm.game_ids])
        pred = np.array([predict_fun(self.model, self.rows[g]) for g in self.fm.game_ids])
        r2 = 1 - ((y - pred) ** 2).sum() / ((y - y.mean()) ** 2).sum()
        assert self.model.r_squared == pytest.approx(r2, abs=1e-9)
        assert 0 <= self.model.r_squared <= 1

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "model.json"
        self.model.save(path)
        loaded = RegressionModel.load(path)
        assert loaded == self.model
        for g in self.fm.game_ids:
            assert predict_fun(loaded, self.rows[g]) == predict_fun(self.model, self.rows[g])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    rows = random_rows(20, seed)
    y = {g: float(rng.normal(50, 10)) for g in rows}
    base = fit_ols(build_features(rows, COLUMNS), y)
    order = list(rows)
    rng.shuffle(order)
    shuffled = fit_ols(build_features({g: rows[g] for g in order}, COLUMNS), y)
    assert shuffled.intercept == pytest.approx(base.intercept, abs=1e-10)
    for c in COLUMNS:
        assert shuffled.weights[c] == pytest.approx(base.weights[c], abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100), st.floats(-1e3, 1e3), st.sampled_from(COLUMNS))
def test_affine_rescaling_keeps_r_squared(seed, scale, shift, column):
    rng = np.random.default_rng(seed)
    rows = random_rows(20, seed)
    y = {g: float(rng.normal(50, 10)) for g in rows}
    base = fit_ols(build_features(rows, COLUMNS), y)
    moved = {g: {**r, column: scale * r[column] + shift} for g, r in rows.items()}
    assert fit_ols(build_features(moved, COLUMNS), y).r_squared == pytest.approx(base.r_squared, abs=1e-9)


def test_pearson():
    assert pearson_r([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson_r([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert np.isnan(pearson_r([1, 1, 1], [1, 2, 3]))


class TestCsv:
    def test_scores_aggregate(self, tmp_path):
        path = tmp_path / "ratings.csv"
        path.write_text("game_id,participant,rating\na,1,10\na,2,30\na,3,35\nb,1,50\n")
        assert read_scores(path) == {"a": 25.0, "b": 50.0}
        assert read_scores(path, aggregate="median") == {"a": 30.0, "b": 50.0}

    def test_scores_bad_value(self, tmp_path):
        path = tmp_path / "ratings.csv"
        path.write_text("game_id,rating\na,10\nb,lots\n")
        with pytest.raises(FeatureError, match=":3:"):
            read_scores(path)

    def test_header_needs_game_id(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("id,x\na,1\n")
        with pytest.raises(FeatureError, match="game_id"):
            read_feature_rows(path)

    def test_duplicate_feature_row(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("game_id,x\na,1\na,2\n")
        with pytest.raises(FeatureError, match="duplicate"):
            read_feature_rows(path)
