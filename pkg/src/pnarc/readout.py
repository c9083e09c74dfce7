"""Trainable readout: mixed state vector -> scalar output.

Two model kinds: a single linear layer, and a one-hidden-layer perceptron
with SELU activation.  Both train by Adam on the composite loss

    L = alpha * MSE(Y, Yhat) + (1 - alpha) * (1 - CC(Y, Yhat))

with CC the Pearson correlation of the batch.  Gradients are analytic
(closed-form backprop, checked against finite differences in the tests);
with alpha = 1 the correlation term is skipped entirely and training is
exact MSE minimization.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import (
    DegenerateBatchError,
    DimensionMismatchError,
    InvalidParameterError,
    StoreFormatError,
    TrainingDivergedError,
)
from .validation import check_matrix, check_series

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772

_MODEL_MAGIC = b"PNAR"
_MODEL_VERSION = 1
_KIND_CODES = {"linear": 0, "mlp1": 1}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


def selu(x: np.ndarray) -> np.ndarray:
    # min/max split keeps expm1 off large positive arguments.
    return SELU_LAMBDA * (
        np.maximum(x, 0.0) + SELU_ALPHA * np.expm1(np.minimum(x, 0.0))
    )


def selu_grad(x: np.ndarray) -> np.ndarray:
    return SELU_LAMBDA * np.where(
        x > 0, 1.0, SELU_ALPHA * np.exp(np.minimum(x, 0.0))
    )


@dataclass(frozen=True)
class LossBreakdown:
    total: float
    mse_term: float
    cc_term: float
    cc: float


@dataclass(frozen=True)
class TrainConfig:
    alpha_loss: float = 0.15
    epochs: int = 300
    batch_size: int = 256
    learning_rate: float = 1e-3
    seed: int = 0
    patience: int = 30
    weight_decay: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not 0.0 <= self.alpha_loss <= 1.0:
            raise InvalidParameterError("alpha_loss must be in [0, 1]")
        if self.batch_size < 8:
            raise InvalidParameterError(
                "batch_size must be >= 8 so the batch correlation is meaningful"
            )
        if self.epochs < 1:
            raise InvalidParameterError("epochs must be >= 1")


@dataclass
class ReadoutModel:
    """Parameter container; "linear" holds w, b; "mlp1" holds W1, b1, w2, b2."""

    kind: str
    input_dim: int
    hidden_width: int | None
    params: dict = field(default_factory=dict)

    def copy(self) -> "ReadoutModel":
        return ReadoutModel(self.kind, self.input_dim, self.hidden_width,
                            {k: v.copy() for k, v in self.params.items()})


def init_model(kind: str, input_dim: int, hidden_width: int = 128,
               seed: int = 0) -> ReadoutModel:
    """LeCun-normal initialization, seeded; biases start at zero."""
    rng = np.random.default_rng(seed)
    if kind == "linear":
        params = {
            "w": rng.standard_normal(input_dim) / np.sqrt(input_dim),
            "b": np.zeros(1),
        }
        return ReadoutModel("linear", input_dim, None, params)
    if kind == "mlp1":
        if hidden_width < 1:
            raise InvalidParameterError("hidden_width must be >= 1")
        params = {
            "W1": rng.standard_normal((input_dim, hidden_width)) / np.sqrt(input_dim),
            "b1": np.zeros(hidden_width),
            "w2": rng.standard_normal(hidden_width) / np.sqrt(hidden_width),
            "b2": np.zeros(1),
        }
        return ReadoutModel("mlp1", input_dim, hidden_width, params)
    raise InvalidParameterError(f"unknown readout kind {kind!r}")


def predict(model: ReadoutModel, states) -> np.ndarray:
    """Pure forward pass over rows of the state matrix."""
    x = check_matrix(states, "states")
    if x.shape[1] != model.input_dim:
        raise DimensionMismatchError(
            f"states have dimension {x.shape[1]}, model expects {model.input_dim}"
        )
    p = model.params
    if model.kind == "linear":
        return x @ p["w"] + p["b"][0]
    a1 = selu(x @ p["W1"] + p["b1"])
    return a1 @ p["w2"] + p["b2"][0]


def _pearson_terms(y: np.ndarray, out: np.ndarray):
    yc = y - y.mean()
    pc = out - out.mean()
    sxx = float(yc @ yc)
    syy = float(pc @ pc)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateBatchError(
            "Pearson correlation undefined: constant targets or outputs"
        )
    sxy = float(yc @ pc)
    return yc, pc, sxx, syy, sxy


def loss(targets, outputs, alpha_loss: float = 0.15) -> LossBreakdown:
    """Composite-loss breakdown; raises on constant vectors."""
    y = check_series(targets, "targets")
    out = check_series(outputs, "outputs")
    if y.size != out.size:
        raise DimensionMismatchError("targets and outputs must have equal length")
    if y.size < 2:
        raise InvalidParameterError("need at least two samples")
    if not 0.0 <= alpha_loss <= 1.0:
        raise InvalidParameterError("alpha_loss must be in [0, 1]")
    diff = out - y
    mse = float(diff @ diff) / y.size
    _, _, sxx, syy, sxy = _pearson_terms(y, out)
    cc = sxy / np.sqrt(sxx * syy)
    total = alpha_loss * mse + (1.0 - alpha_loss) * (1.0 - cc)
    return LossBreakdown(total=float(total), mse_term=mse,
                         cc_term=float(1.0 - cc), cc=float(cc))


def _loss_and_output_grad(y: np.ndarray, out: np.ndarray, alpha_loss: float):
    """Loss value and dL/d(output); skips the CC term when alpha is 1."""
    n = y.size
    diff = out - y
    mse = float(diff @ diff) / n
    grad = alpha_loss * 2.0 * diff / n
    if alpha_loss == 1.0:
        return mse, grad
    yc, pc, sxx, syy, sxy = _pearson_terms(y, out)
    cc = sxy / np.sqrt(sxx * syy)
    dcc = yc / np.sqrt(sxx * syy) - (cc / syy) * pc
    total = alpha_loss * mse + (1.0 - alpha_loss) * (1.0 - cc)
    grad = grad - (1.0 - alpha_loss) * dcc
    return float(total), grad


def loss_gradients(model: ReadoutModel, x: np.ndarray, y: np.ndarray,
                   alpha_loss: float):
    """Analytic parameter gradients of the composite loss on one batch."""
    p = model.params
    if model.kind == "linear":
        out = x @ p["w"] + p["b"][0]
        value, g = _loss_and_output_grad(y, out, alpha_loss)
        return value, {"w": x.T @ g, "b": np.array([g.sum()])}
    z1 = x @ p["W1"] + p["b1"]
    a1 = selu(z1)
    out = a1 @ p["w2"] + p["b2"][0]
    value, g = _loss_and_output_grad(y, out, alpha_loss)
    dz1 = np.outer(g, p["w2"]) * selu_grad(z1)
    grads = {
        "W1": x.T @ dz1,
        "b1": dz1.sum(axis=0),
        "w2": a1.T @ g,
        "b2": np.array([g.sum()]),
    }
    return value, grads


def train(
    states,
    targets,
    kind: str = "mlp1",
    config: TrainConfig | None = None,
    hidden_width: int = 128,
) -> tuple[ReadoutModel, list[LossBreakdown]]:
    """Adam minimization of the composite loss; deterministic per seed.

    Returns the best-epoch model (early stop after ``patience`` epochs with
    no improvement of the full-training-set loss) and the per-epoch loss
    log.
    """
    config = config or TrainConfig()
    x = check_matrix(states, "states")
    y = check_series(targets, "targets")
    if x.shape[0] != y.size:
        raise DimensionMismatchError("states and targets must have equal length")
    if x.shape[0] < config.batch_size and x.shape[0] < 8:
        raise InvalidParameterError("need at least 8 training samples")

    model = init_model(kind, x.shape[1], hidden_width, seed=config.seed)
    rng = np.random.default_rng(config.seed + 1)
    n = x.shape[0]
    batch = min(config.batch_size, n)

    adam_m = {k: np.zeros_like(v) for k, v in model.params.items()}
    adam_v = {k: np.zeros_like(v) for k, v in model.params.items()}
    step = 0
    log: list[LossBreakdown] = []
    best = None
    best_epoch = -1

    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start: start + batch]
            if idx.size < 8:
                continue  # trailing slivers make the batch correlation noise
            value, grads = loss_gradients(model, x[idx], y[idx], config.alpha_loss)
            if not np.isfinite(value):
                raise TrainingDivergedError(
                    f"loss became non-finite at epoch {epoch}", epoch=epoch
                )
            step += 1
            for k, g in grads.items():
                if config.weight_decay and k in ("w", "W1", "w2"):
                    g = g + config.weight_decay * model.params[k]
                adam_m[k] = config.beta1 * adam_m[k] + (1 - config.beta1) * g
                adam_v[k] = config.beta2 * adam_v[k] + (1 - config.beta2) * g * g
                mhat = adam_m[k] / (1 - config.beta1 ** step)
                vhat = adam_v[k] / (1 - config.beta2 ** step)
                model.params[k] -= (
                    config.learning_rate * mhat / (np.sqrt(vhat) + config.adam_eps)
                )

        outputs = predict(model, x)
        if not np.all(np.isfinite(outputs)):
            raise TrainingDivergedError(
                f"loss became non-finite at epoch {epoch}", epoch=epoch
            )
        epoch_loss = loss(y, outputs, config.alpha_loss)
        if not np.isfinite(epoch_loss.total):
            raise TrainingDivergedError(
                f"loss became non-finite at epoch {epoch}", epoch=epoch
            )
        log.append(epoch_loss)
        if best is None or epoch_loss.total < best[0]:
            best = (epoch_loss.total, model.copy())
            best_epoch = epoch
        elif epoch - best_epoch >= config.patience:
            break

    return best[1], log


def save_model(model: ReadoutModel, path) -> None:
    """Versioned little-endian binary: dims then float64 parameter arrays."""
    hidden = model.hidden_width or 0
    head = struct.pack("<4sBBII", _MODEL_MAGIC, _MODEL_VERSION,
                       _KIND_CODES[model.kind], model.input_dim, hidden)
    with open(path, "wb") as fh:
        fh.write(head)
        for name in sorted(model.params):
            arr = np.ascontiguousarray(model.params[name], dtype="<f8")
            fh.write(struct.pack("<I", arr.size))
            fh.write(arr.tobytes())


def load_model(path) -> ReadoutModel:
    with open(path, "rb") as fh:
        data = fh.read()
    head_size = struct.calcsize("<4sBBII")
    magic, version, kind_code, input_dim, hidden = struct.unpack(
        "<4sBBII", data[:head_size]
    )
    if magic != _MODEL_MAGIC:
        raise StoreFormatError(f"bad model magic {magic!r}")
    if version != _MODEL_VERSION:
        raise StoreFormatError(f"unsupported model version {version}")
    kind = _KIND_NAMES[kind_code]
    model = init_model(kind, input_dim, hidden or 1, seed=0)
    off = head_size
    for name in sorted(model.params):
        (size,) = struct.unpack("<I", data[off: off + 4])
        off += 4
        flat = np.frombuffer(data[off: off + 8 * size], dtype="<f8")
        off += 8 * size
        model.params[name] = flat.reshape(model.params[name].shape).copy()
    return model


class ReadoutRegressor(BaseEstimator, RegressorMixin):
    """scikit-learn estimator wrapper around the composite-loss readout."""

    def __init__(
        self,
        kind: str = "mlp1",
        hidden_width: int = 128,
        alpha_loss: float = 0.15,
        epochs: int = 300,
        batch_size: int = 256,
        learning_rate: float = 1e-3,
        patience: int = 30,
        weight_decay: float = 0.0,
        seed: int = 0,
    ):
        self.kind = kind
        self.hidden_width = hidden_width
        self.alpha_loss = alpha_loss
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.patience = patience
        self.weight_decay = weight_decay
        self.seed = seed

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            alpha_loss=self.alpha_loss,
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            patience=self.patience,
            weight_decay=self.weight_decay,
            seed=self.seed,
        )

    def fit(self, X, y):
        self.model_, self.log_ = train(
            X, y, kind=self.kind, config=self._train_config(),
            hidden_width=self.hidden_width,
        )
        return self

    def predict(self, X):
        return predict(self.model_, X)
