import numpy as np
import pytest

from pnarc.exceptions import (
    DegenerateBatchError,
    DimensionMismatchError,
    InvalidParameterError,
    TrainingDivergedError,
)
from pnarc.readout import (
    ReadoutRegressor,
    SELU_ALPHA,
    SELU_LAMBDA,
    TrainConfig,
    init_model,
    load_model,
    loss,
    loss_gradients,
    predict,
    save_model,
    selu,
    train,
)


def test_selu_constants_and_shape():
    assert SELU_LAMBDA == 1.0507009873554805
    assert SELU_ALPHA == 1.6732632423543772
    assert selu(np.array([0.0]))[0] == 0.0
    assert np.isclose(selu(np.array([2.0]))[0], SELU_LAMBDA * 2.0)
    assert np.isclose(selu(np.array([-30.0]))[0], -SELU_LAMBDA * SELU_ALPHA, atol=1e-9)


def test_loss_perfect_fit_is_zero():
    y = np.array([0.2, 0.5, 0.9, 0.1])
    breakdown = loss(y, y, 0.15)
    assert breakdown.total == 0.0
    assert breakdown.cc == 1.0


def test_loss_anticorrelated_zero_mean():
    y = np.array([-1.0, 0.0, 1.0])
    breakdown = loss(y, -y, 0.15)
    mse = np.mean((2 * y) ** 2)
    assert np.isclose(breakdown.cc, -1.0)
    assert np.isclose(breakdown.total, 0.15 * mse + 0.85 * 2.0)


def test_loss_three_point_hand_case():
    # Y = [0, 1, 2], Yhat = [0, 1, 2.3]: MSE = 0.03, CC by direct formula.
    y = np.array([0.0, 1.0, 2.0])
    out = np.array([0.0, 1.0, 2.3])
    yc = y - y.mean()
    oc = out - out.mean()
    cc = (yc @ oc) / np.sqrt((yc @ yc) * (oc @ oc))
    breakdown = loss(y, out, 0.15)
    assert np.isclose(breakdown.mse_term, 0.03)
    assert np.isclose(breakdown.cc, cc, atol=1e-14)
    assert np.isclose(breakdown.total, 0.15 * 0.03 + 0.85 * (1 - cc), atol=1e-14)


def test_loss_decomposition_invariant_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = rng.standard_normal(20)
        out = rng.standard_normal(20)
        alpha = float(rng.uniform(0, 1))
        b = loss(y, out, alpha)
        assert np.isclose(b.total, alpha * b.mse_term + (1 - alpha) * b.cc_term,
                          atol=1e-12)


def test_cc_invariant_under_positive_affine():
    rng = np.random.default_rng(1)
    y = rng.standard_normal(30)
    out = rng.standard_normal(30)
    base = loss(y, out, 0.15).cc
    shifted = loss(y, 3.7 * out + 2.5, 0.15).cc
    assert np.isclose(base, shifted, atol=1e-12)


def test_loss_constant_vectors_rejected():
    with pytest.raises(DegenerateBatchError):
        loss(np.ones(5), np.arange(5.0), 0.15)
    with pytest.raises(DegenerateBatchError):
        loss(np.arange(5.0), np.ones(5), 0.15)


def _finite_difference_grads(model, x, y, alpha, eps=1e-6):
    grads = {}
    for name, arr in model.params.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = loss(y, predict(model, x), alpha).total
            flat[i] = orig - eps
            dn = loss(y, predict(model, x), alpha).total
            flat[i] = orig
            gflat[i] = (up - dn) / (2 * eps)
        grads[name] = g
    return grads


def test_gradient_check_linear_and_mlp():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((10, 7))
    y = rng.standard_normal(10)
    for kind in ("linear", "mlp1"):
        for alpha in (0.15, 1.0):
            model = init_model(kind, 7, hidden_width=5, seed=3)
            _, analytic = loss_gradients(model, x, y, alpha)
            numeric = _finite_difference_grads(model, x, y, alpha)
            for name in analytic:
                denom = np.maximum(np.abs(numeric[name]), 1e-8)
                rel = np.abs(analytic[name] - numeric[name]) / denom
                assert rel.max() < 1e-4, f"{kind} {name} alpha={alpha}"


def test_alpha_one_reduces_to_pure_mse_gradient():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((12, 4))
    y = rng.standard_normal(12)
    model = init_model("linear", 4, seed=1)
    out = predict(model, x)
    _, grads = loss_gradients(model, x, y, 1.0)
    want_w = x.T @ (2 * (out - y) / 12)
    assert np.allclose(grads["w"], want_w, atol=1e-14)


def test_train_recovers_realizable_linear_target():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((200, 6))
    w = rng.standard_normal(6)
    y = x @ w + 0.7
    cfg = TrainConfig(alpha_loss=0.15, epochs=2000, batch_size=200,
                      learning_rate=3e-2, seed=0, patience=2000)
    model, log = train(x, y, kind="linear", config=cfg)
    mse = np.mean((predict(model, x) - y) ** 2)
    assert mse < 1e-6
    assert log[-1].total <= log[0].total


def test_predict_zero_model_outputs_zero():
    model = init_model("linear", 3, seed=0)
    model.params["w"][:] = 0.0
    out = predict(model, np.ones((4, 3)))
    assert np.allclose(out, 0.0)


def test_predict_identity_wiring_selects_coordinate():
    model = init_model("linear", 3, seed=0)
    model.params["w"][:] = [0.0, 1.0, 0.0]
    model.params["b"][:] = 0.0
    x = np.array([[1.0, 5.0, 2.0], [0.0, -3.0, 9.0]])
    assert np.allclose(predict(model, x), [5.0, -3.0])


def test_predict_dimension_mismatch():
    model = init_model("linear", 3, seed=0)
    with pytest.raises(DimensionMismatchError):
        predict(model, np.ones((2, 4)))


def test_training_deterministic_and_logged():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((64, 5))
    y = rng.standard_normal(64)
    cfg = TrainConfig(epochs=10, batch_size=16, seed=9)
    m1, log1 = train(x, y, kind="mlp1", config=cfg, hidden_width=8)
    m2, log2 = train(x, y, kind="mlp1", config=cfg, hidden_width=8)
    assert log1[0].total == log2[0].total
    assert log1[-1].total == log2[-1].total
    for k in m1.params:
        assert np.array_equal(m1.params[k], m2.params[k])


def test_training_divergence_names_epoch():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((32, 3)) * 1e8
    y = rng.standard_normal(32)
    cfg = TrainConfig(epochs=50, batch_size=32, learning_rate=1e300, seed=0)
    with pytest.raises(TrainingDivergedError) as err:
        train(x, y, kind="mlp1", config=cfg, hidden_width=4)
    assert err.value.epoch is not None


def test_batch_size_below_8_rejected():
    with pytest.raises(InvalidParameterError):
        TrainConfig(batch_size=4)


def test_model_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    x = rng.standard_normal((40, 6))
    y = rng.standard_normal(40)
    cfg = TrainConfig(epochs=5, batch_size=40, seed=2)
    model, _ = train(x, y, kind="mlp1", config=cfg, hidden_width=4)
    path = tmp_path / "readout.pnar"
    save_model(model, path)
    back = load_model(path)
    assert back.kind == model.kind and back.input_dim == model.input_dim
    assert np.array_equal(predict(back, x), predict(model, x))


def test_regressor_estimator_interface():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((120, 4))
    y = x @ np.array([1.0, -2.0, 0.5, 0.0]) + 0.3
    reg = ReadoutRegressor(kind="linear", epochs=800, batch_size=120,
                           learning_rate=3e-2, patience=800, seed=0)
    reg.fit(x, y)
    assert np.mean((reg.predict(x) - y) ** 2) < 1e-4
    assert reg.get_params()["kind"] == "linear"
