import numpy as np
import pytest

from mtqe.errors import ConfigError, DimensionMismatch, NonFiniteLoss
from mtqe.mlp import (
    MlpConfig,
    MlpModel,
    adam_update,
    forward,
    init_mlp,
    loss_and_gradients,
    train,
)


def finite_difference_grads(model, X, Y, step=1e-5):
    """Central finite differences over every parameter component."""
    num_w = [np.zeros_like(w) for w in model.weights]
    num_b = [np.zeros_like(b) for b in model.biases]
    for arrs, nums in ((model.weights, num_w), (model.biases, num_b)):
        for arr, num in zip(arrs, nums):
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + step
                up, _ = loss_and_gradients(model, X, Y)
                arr[idx] = orig - step
                down, _ = loss_and_gradients(model, X, Y)
                arr[idx] = orig
                num[idx] = (up - down) / (2 * step)
    return num_w, num_b


def max_relative_error(analytic, numeric):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


class TestInit:
    def test_deterministic_per_seed(self):
        cfg = MlpConfig(hidden_sizes=(5, 3), seed=7)
        a = init_mlp(cfg, 4)
        b = init_mlp(cfg, 4)
        assert all((wa == wb).all() for wa, wb in zip(a.weights, b.weights))

    def test_shape_chain(self):
        model = init_mlp(MlpConfig(hidden_sizes=(3,), n_outputs=4), 2)
        assert [w.shape for w in model.weights] == [(2, 3), (3, 4)]
        assert [b.shape for b in model.biases] == [(3,), (4,)]

    def test_biases_zero(self):
        model = init_mlp(MlpConfig(hidden_sizes=(4, 2)), 3)
        assert all(not b.any() for b in model.biases)

    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            MlpConfig(hidden_sizes=())
        with pytest.raises(ConfigError):
            MlpConfig(hidden_sizes=(3,), n_outputs=2)
        with pytest.raises(ConfigError):
            MlpConfig(hidden_sizes=(3,), activation="sigmoid")


class TestForward:
    def test_zero_parameters_zero_outputs(self):
        model = init_mlp(MlpConfig(hidden_sizes=(4,), n_outputs=4), 3)
        for w in model.weights:
            w[:] = 0.0
        X = np.random.default_rng(0).normal(size=(6, 3))
        assert not forward(model, X).any()

    def test_hand_computed_value(self):
        # hidden: w=2, b=0 on input 3 -> relu(6)=6; output: w=1, b=1 -> 7
        model = init_mlp(MlpConfig(hidden_sizes=(1,), activation="relu"), 1)
        model.weights[0][:] = 2.0
        model.biases[0][:] = 0.0
        model.weights[1][:] = 1.0
        model.biases[1][:] = 1.0
        assert forward(model, [[3.0]]).item() == 7.0

    def test_finite_on_bounded_inputs(self):
        for activation in ("relu", "tanh"):
            model = init_mlp(MlpConfig(hidden_sizes=(8, 4), activation=activation), 5)
            X = np.random.default_rng(1).uniform(-10, 10, size=(20, 5))
            assert np.isfinite(forward(model, X)).all()

    def test_dimension_mismatch(self):
        model = init_mlp(MlpConfig(hidden_sizes=(2,)), 3)
        with pytest.raises(DimensionMismatch):
            forward(model, np.zeros((2, 4)))

    def test_shared_hidden_layer_restriction(self):
        # Column y_k of a 4-output net equals a 1-output net built from
        # the same hidden stack plus that output column.
        rng = np.random.default_rng(4)
        wide = init_mlp(MlpConfig(hidden_sizes=(6, 3), n_outputs=4, seed=10), 5)
        narrow = init_mlp(MlpConfig(hidden_sizes=(6, 3), n_outputs=1, seed=10), 5)
        for layer in range(2):
            narrow.weights[layer][:] = wide.weights[layer]
            narrow.biases[layer][:] = wide.biases[layer]
        column = 2
        narrow.weights[-1][:] = wide.weights[-1][:, [column]]
        narrow.biases[-1][:] = wide.biases[-1][[column]]
        X = rng.normal(size=(9, 5))
        assert np.array_equal(forward(narrow, X)[:, 0], forward(wide, X)[:, column])


class TestLossAndGradients:
    def test_zero_residual_zero_alpha(self):
        model = init_mlp(MlpConfig(hidden_sizes=(4,), alpha=0.0), 3)
        X = np.random.default_rng(2).normal(size=(5, 3))
        Y = forward(model, X)
        loss, (grad_w, grad_b) = loss_and_gradients(model, X, Y)
        assert loss == 0.0
        assert all(not g.any() for g in grad_w + grad_b)

    def test_penalty_only_gradient(self):
        model = init_mlp(MlpConfig(hidden_sizes=(4,), alpha=0.5), 3)
        X = np.random.default_rng(3).normal(size=(8, 3))
        Y = forward(model, X)
        _, (grad_w, grad_b) = loss_and_gradients(model, X, Y)
        n = X.shape[0]
        for g, w in zip(grad_w, model.weights):
            assert np.array_equal(g, (0.5 / n) * w)
        assert all(not g.any() for g in grad_b)

    @pytest.mark.parametrize("activation", ["relu", "tanh"])
    @pytest.mark.parametrize("alpha", [0.0, 0.1])
    @pytest.mark.parametrize("n_outputs", [1, 4])
    def test_gradient_check(self, activation, alpha, n_outputs):
        rng = np.random.default_rng(hash((activation, alpha, n_outputs)) % 2**32)
        cfg = MlpConfig(
            hidden_sizes=(4,), activation=activation, alpha=alpha, n_outputs=n_outputs, seed=5
        )
        model = init_mlp(cfg, 3)
        X = rng.normal(size=(5, 3))
        Y = rng.normal(size=(5, n_outputs))
        _, (grad_w, grad_b) = loss_and_gradients(model, X, Y)
        num_w, num_b = finite_difference_grads(model, X, Y)
        assert max_relative_error(grad_w + grad_b, num_w + num_b) < 1e-4


class TestAdam:
    def test_single_step_hand_value(self):
        cfg = MlpConfig(hidden_sizes=(1,), learning_rate=0.1)
        param, m, v = adam_update(
            np.float64(0.0), np.float64(1.0), np.float64(0.0), np.float64(0.0), 1, cfg
        )
        assert param == pytest.approx(-0.1 / (1.0 + 1e-8), abs=1e-12)


class TestTrain:
    def test_fits_noiseless_line(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-2, 2, size=(200, 1))
        y = 3.0 * x + 1.0
        # closed-form check that the data is exactly linear
        coef, res, *_ = np.linalg.lstsq(np.column_stack([x, np.ones(200)]), y, rcond=None)
        assert float(res[0]) < 1e-20
        cfg = MlpConfig(
            hidden_sizes=(16,),
            activation="relu",
            alpha=0.0,
            tol=1e-12,
            learning_rate=0.01,
            max_epochs=2000,
            batch_size=32,
            seed=0,
        )
        model = train(cfg, x, y)
        mse = float(np.mean((forward(model, x) - y) ** 2))
        assert mse < 1e-3

    def test_deterministic_loss_trace(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(40, 3))
        Y = rng.normal(size=(40, 1))
        cfg = MlpConfig(hidden_sizes=(5,), max_epochs=20, tol=1e-12, seed=3)
        a = train(cfg, X, Y)
        b = train(cfg, X, Y)
        assert a.loss_trace == b.loss_trace
        assert all((wa == wb).all() for wa, wb in zip(a.weights, b.weights))

    def test_trace_non_increasing_on_linear_data(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(100, 2))
        Y = X @ np.array([[2.0], [-1.0]]) + 0.25
        cfg = MlpConfig(
            hidden_sizes=(8,), alpha=0.0, tol=1e-12, learning_rate=0.005,
            max_epochs=120, batch_size=100, seed=1,
        )
        trace = train(cfg, X, Y).loss_trace
        for prev, cur in zip(trace[5:], trace[6:]):
            assert cur <= prev + 1e-6

    def test_full_batch_row_permutation_invariance(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(40, 3))
        Y = X @ np.array([[1.0], [2.0], [3.0]]) + 0.5
        cfg = MlpConfig(
            hidden_sizes=(5,), shuffle=False, batch_size=1000, max_epochs=60,
            tol=1e-15, seed=2,
        )
        a = train(cfg, X, Y)
        perm = rng.permutation(40)
        b = train(cfg, X[perm], Y[perm])
        for wa, wb in zip(a.weights, b.weights):
            assert np.allclose(wa, wb, atol=1e-9)

    def test_convergence_tolerance_stops_early(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(30, 2))
        Y = rng.normal(size=(30, 1))
        cfg = MlpConfig(hidden_sizes=(4,), tol=1e9, max_epochs=500, seed=0)
        model = train(cfg, X, Y)
        assert len(model.loss_trace) == 3  # 2 consecutive calm epochs after the first

    def test_divergence_raises(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(20, 3))
        Y = rng.normal(size=(20, 1))
        cfg = MlpConfig(hidden_sizes=(8,), learning_rate=1e200, max_epochs=5, seed=1)
        with np.errstate(all="ignore"):
            with pytest.raises(NonFiniteLoss):
                train(cfg, X, Y)

    def test_output_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            train(MlpConfig(hidden_sizes=(3,), n_outputs=4), np.zeros((5, 2)), np.zeros((5, 2)))


class TestRoundTrip:
    def test_dict_round_trip_exact(self):
        model = init_mlp(MlpConfig(hidden_sizes=(4, 2), n_outputs=4, seed=12), 3)
        doc = model.to_dict()
        back = MlpModel.from_dict(doc)
        assert all((a == b).all() for a, b in zip(model.weights, back.weights))
        assert back.config == model.config
