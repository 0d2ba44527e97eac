import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metercast import stacking
from metercast.errors import LengthMismatchError
from metercast.metrics import rmse


@st.composite
def prediction_triples(draw):
    """(b, d, y) where both components carry signal about y."""
    n = draw(st.integers(5, 60))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    y = rng.normal(0.0, 5.0, n)
    b = y + rng.normal(0.0, draw(st.floats(0.1, 3.0)), n)
    d = y + rng.normal(0.0, draw(st.floats(0.1, 3.0)), n)
    return b, d, y


class TestFitStack:
    def test_perfect_component_gets_unit_weight(self):
        y = np.array([1.0, 2.0, 3.0])
        b = np.array([1.0, 2.0, 3.0])
        d = np.array([3.0, 1.0, 2.0])
        model = stacking.fit_stack(b, d, y)
        assert model.intercept == pytest.approx(0.0, abs=1e-9)
        assert model.weight_bdtr == pytest.approx(1.0, abs=1e-9)
        assert model.weight_dfr == pytest.approx(0.0, abs=1e-9)
        assert not model.ridge_applied

    def test_collinear_components_use_ridge(self):
        rng = np.random.default_rng(0)
        b = rng.normal(0, 1, 20)
        y = 2.0 * b + rng.normal(0, 0.1, 20)
        model = stacking.fit_stack(b, b.copy(), y)
        assert model.ridge_applied
        pred = model.predict(b, b)
        assert np.all(np.isfinite(pred))
        # the collinear pair still explains y about as well as OLS on b alone
        assert model.training_rmse <= rmse(y, 2.0 * b) + 1e-6

    def test_constant_target_varied_components(self):
        rng = np.random.default_rng(1)
        b = rng.normal(0, 1, 15)
        d = rng.normal(0, 1, 15)
        y = np.full(15, 7.5)
        model = stacking.fit_stack(b, d, y)
        assert model.intercept == pytest.approx(7.5, abs=1e-9)
        assert model.weight_bdtr == pytest.approx(0.0, abs=1e-9)
        assert model.weight_dfr == pytest.approx(0.0, abs=1e-9)

    def test_all_constant_inputs_flagged(self):
        n = 10
        model = stacking.fit_stack(np.full(n, 2.0), np.full(n, 3.0), np.full(n, 5.0))
        assert model.ridge_applied
        assert stacking.predict_stack(model, 2.0, 3.0) == pytest.approx(5.0, abs=1e-3)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            stacking.fit_stack([1.0, 2.0], [1.0, 2.0, 3.0], [1.0, 2.0, 3.0])

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            stacking.fit_stack([1.0, 2.0], [3.0, 4.0], [5.0, 6.0])

    @settings(max_examples=80, deadline=None)
    @given(prediction_triples())
    def test_training_dominance(self, triple):
        b, d, y = triple
        model = stacking.fit_stack(b, d, y)
        floor = min(rmse(y, b), rmse(y, d))
        assert model.training_rmse <= floor + 1e-9

    @settings(max_examples=40, deadline=None)
    @given(prediction_triples(), st.floats(0.1, 50.0))
    def test_scale_equivariance(self, triple, c):
        b, d, y = triple
        base = stacking.fit_stack(b, d, y).predict(b, d)
        scaled = stacking.fit_stack(b, d, c * y).predict(b, d)
        assert scaled == pytest.approx(c * base, rel=1e-9, abs=1e-9)

    def test_exact_interpolation(self):
        rng = np.random.default_rng(2)
        b = rng.normal(0, 2, 25)
        d = rng.normal(0, 2, 25)
        y = 2.0 + 3.0 * b - d
        model = stacking.fit_stack(b, d, y)
        residual = y - model.predict(b, d)
        assert float(np.linalg.norm(residual)) <= 1e-9

    def test_training_rmse_matches_fitted_values(self):
        rng = np.random.default_rng(3)
        b, d = rng.normal(0, 1, 30), rng.normal(0, 1, 30)
        y = b + 0.5 * d + rng.normal(0, 0.2, 30)
        model = stacking.fit_stack(b, d, y)
        assert model.training_rmse == pytest.approx(rmse(y, model.predict(b, d)), rel=1e-12)
        assert model.fit_diagnostics == (model.training_rmse, model.ridge_applied)


class TestPredictStack:
    def test_identity_weights(self):
        model = stacking.StackModel(0.0, 1.0, 0.0, 0.0, False)
        assert stacking.predict_stack(model, 7.0, 100.0) == 7.0

    def test_affine_arithmetic(self):
        model = stacking.StackModel(1.0, 0.5, 0.5, 0.0, False)
        assert stacking.predict_stack(model, 2.0, 4.0) == 4.0

    def test_fitted_values_reproduced(self):
        rng = np.random.default_rng(4)
        b, d = rng.normal(0, 1, 12), rng.normal(0, 1, 12)
        y = 1.0 + b - 2.0 * d + rng.normal(0, 0.1, 12)
        model = stacking.fit_stack(b, d, y)
        batch = model.predict(b, d)
        single = [stacking.predict_stack(model, bi, di) for bi, di in zip(b, d)]
        assert single == pytest.approx(batch, rel=1e-9)


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(5)
        b, d = rng.normal(0, 1, 20), rng.normal(0, 1, 20)
        y = 0.3 + 0.6 * b + 0.4 * d
        model = stacking.fit_stack(b, d, y)
        back = stacking.StackModel.from_dict(json.loads(json.dumps(model.to_dict())))
        assert back == model

    def test_kind_checked(self):
        with pytest.raises(ValueError):
            stacking.StackModel.from_dict({"kind": "gbdt"})
