import datetime as dt
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metercast import tuning
from metercast.errors import EmptySideError, InsufficientDataError
from metercast.featurize import FeatureMatrix
from metercast.trees import HyperParams

#: Small space so tuning tests stay fast; shapes are still exercised.
_FAST_SPACE = tuning.ParamSpace(
    num_leaves=(2, 6),
    min_leaf_instances=(1, 5),
    learning_rate=(0.05, 0.3),
    num_trees=(5, 15),
)


def _toy_matrix(n=160, seed=0, first_date=dt.date(2011, 1, 1)):
    rng = np.random.default_rng(seed)
    slots = np.arange(n) % 48
    dates = [first_date + dt.timedelta(days=i // 48) for i in range(n)]
    X = np.column_stack(
        [
            slots.astype(float),
            (slots >= 24).astype(float),
            rng.random(n),
        ]
    )
    y = 0.1 * X[:, 0] + 2.0 * X[:, 1] + 0.1 * rng.standard_normal(n)
    return FeatureMatrix(
        column_names=["slot", "is_pm", "noise"],
        X=X,
        y=y,
        dates=dates,
        slots=slots,
    )


def _matrix_with_years(years):
    n = len(years)
    dates = [dt.date(year, 6, 1) for year in years]
    return FeatureMatrix(
        column_names=["a"],
        X=np.arange(n, dtype=float).reshape(-1, 1),
        y=np.arange(n, dtype=float),
        dates=dates,
        slots=np.zeros(n, dtype=int),
    )


class TestTemporalSplit:
    def test_year_partition(self):
        matrix = _matrix_with_years([2010, 2011, 2012, 2013, 2014, 2014])
        train, test = tuning.temporal_split(matrix, 2013)
        assert set(train.years) == {2010, 2011, 2012, 2013}
        assert set(test.years) == {2014}
        assert train.n + test.n == matrix.n

    def test_order_preserved(self):
        matrix = _matrix_with_years([2012, 2013, 2012, 2014, 2013])
        train, test = tuning.temporal_split(matrix, 2013)
        assert train.y.tolist() == [0.0, 1.0, 2.0, 4.0]
        assert test.y.tolist() == [3.0]

    def test_empty_train_side(self):
        with pytest.raises(EmptySideError):
            tuning.temporal_split(_matrix_with_years([2014, 2014]), 2013)

    def test_empty_test_side(self):
        with pytest.raises(EmptySideError):
            tuning.temporal_split(_matrix_with_years([2012, 2013]), 2013)


class TestSampleHyperparams:
    def test_deterministic(self):
        a = tuning.sample_hyperparams(7, tuning.ParamSpace(), 6)
        b = tuning.sample_hyperparams(7, tuning.ParamSpace(), 6)
        assert a == b

    def test_bounds_respected(self):
        space = tuning.ParamSpace()
        draws = tuning.sample_hyperparams(0, space, 10_000)
        for hp in draws:
            assert space.num_leaves[0] <= hp.num_leaves <= space.num_leaves[1]
            assert (
                space.min_leaf_instances[0]
                <= hp.min_leaf_instances
                <= space.min_leaf_instances[1]
            )
            assert space.learning_rate[0] <= hp.learning_rate <= space.learning_rate[1]
            assert space.num_trees[0] <= hp.num_trees <= space.num_trees[1]

    def test_longer_sweep_extends_shorter(self):
        short = tuning.sample_hyperparams(3, tuning.ParamSpace(), 5)
        long = tuning.sample_hyperparams(3, tuning.ParamSpace(), 30)
        assert long[:5] == short

    def test_rejects_zero_m(self):
        with pytest.raises(ValueError):
            tuning.sample_hyperparams(0, tuning.ParamSpace(), 0)

    def test_space_validation(self):
        with pytest.raises(ValueError):
            tuning.ParamSpace(num_leaves=(10, 5))
        with pytest.raises(ValueError):
            tuning.ParamSpace(learning_rate=(0.0, 0.1))


class TestFoldBounds:
    def test_three_fold_chaining(self):
        assert tuning.fold_bounds(8, 3) == [(2, 2, 4), (4, 4, 6), (6, 6, 8)]

    def test_minimal_rows(self):
        assert tuning.fold_bounds(4, 3) == [(1, 1, 2), (2, 2, 3), (3, 3, 4)]

    def test_insufficient_rows(self):
        with pytest.raises(InsufficientDataError):
            tuning.fold_bounds(3, 3)

    def test_fraction_holdout(self):
        assert tuning.fold_bounds(8, 0.25) == [(6, 6, 8)]

    def test_fraction_too_small(self):
        with pytest.raises(InsufficientDataError):
            tuning.fold_bounds(10, 0.01)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            tuning.fold_bounds(10, 0)
        with pytest.raises(ValueError):
            tuning.fold_bounds(10, 1.0)

    @settings(max_examples=60)
    @given(st.integers(4, 500), st.integers(1, 6))
    def test_blocks_are_contiguous_and_cover_suffix(self, n, k):
        try:
            bounds = tuning.fold_bounds(n, k)
        except InsufficientDataError:
            assert n < 2 * (k + 1)  # only tight row counts may fail
            return
        assert len(bounds) == k
        assert bounds[-1][2] == n
        for fit_end, val_start, val_end in bounds:
            assert 0 < fit_end == val_start < val_end
        for prev, nxt in zip(bounds, bounds[1:]):
            assert prev[2] == nxt[1]


class TestRandomSearch:
    def test_single_candidate_is_best(self):
        result = tuning.random_search(_toy_matrix(), space=_FAST_SPACE, m=1, seed=5)
        assert result.best_index == 0
        assert result.best == result.candidates[0].params
        assert result.final_model.hyperparams == result.best

    def test_rigged_metric_selects_third_candidate(self):
        class Rig:
            def __init__(self, folds):
                self.calls = 0
                self.folds = folds

            def __call__(self, y, y_hat):
                candidate = self.calls // self.folds
                self.calls += 1
                return 0.0 if candidate == 2 else 1.0

        result = tuning.random_search(
            _toy_matrix(), space=_FAST_SPACE, m=5, metric=Rig(3), seed=1
        )
        assert result.best_index == 2
        assert result.candidates[2].mean_score == 0.0

    def test_argmin_over_recorded_candidates(self):
        result = tuning.random_search(_toy_matrix(), space=_FAST_SPACE, m=8, seed=2)
        means = [c.mean_score for c in result.candidates]
        assert result.candidates[result.best_index].mean_score == min(means)
        assert result.best_index == means.index(min(means))  # first on ties

    def test_reproducible(self):
        a = tuning.random_search(_toy_matrix(), space=_FAST_SPACE, m=4, seed=9)
        b = tuning.random_search(_toy_matrix(), space=_FAST_SPACE, m=4, seed=9)
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_no_leakage(self):
        matrix = _toy_matrix()
        result = tuning.random_search(matrix, space=_FAST_SPACE, m=2, seed=3)
        stamps = list(zip(matrix.dates, matrix.slots.tolist()))
        for fit_end, val_start, val_end in result.fold_bounds:
            last_fit = max(stamps[:fit_end])
            first_val = min(stamps[val_start:val_end])
            assert last_fit < first_val

    def test_monotone_sweep(self):
        matrix = _toy_matrix()
        small = tuning.random_search(matrix, space=_FAST_SPACE, m=3, seed=4)
        large = tuning.random_search(matrix, space=_FAST_SPACE, m=9, seed=4)
        assert [c.params for c in large.candidates[:3]] == [
            c.params for c in small.candidates
        ]
        assert (
            large.candidates[large.best_index].mean_score
            <= small.candidates[small.best_index].mean_score
        )

    def test_rmse_metric_and_fraction_resampling(self):
        result = tuning.random_search(
            _toy_matrix(), space=_FAST_SPACE, m=2, resampling=0.3, metric="rmse", seed=6
        )
        assert result.selection_metric == "rmse"
        assert len(result.fold_bounds) == 1
        assert all(len(c.fold_scores) == 1 for c in result.candidates)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            tuning.random_search(_toy_matrix(n=3), space=_FAST_SPACE, m=1)

    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            tuning.random_search(_toy_matrix(), space=_FAST_SPACE, m=1, metric="mape")

    def test_final_model_refit_on_full_train(self):
        matrix = _toy_matrix()
        result = tuning.random_search(matrix, space=_FAST_SPACE, m=2, seed=7)
        assert result.final_model.feature_names == matrix.column_names
        from metercast.trees import fit_gbdt

        refit = fit_gbdt(matrix, result.best)
        assert refit.to_dict() == result.final_model.to_dict()

    def test_default_space_used_when_omitted(self):
        defaults = tuning.sample_hyperparams(11, tuning.ParamSpace(), 1)[0]
        assert isinstance(defaults, HyperParams)
