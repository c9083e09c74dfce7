"""Evaluation metrics and reservoir-quality probes.

Memory capacity sums, over delays j = 1..k, the squared held-out Pearson
correlation between the input j steps back and its best ridge-regression
reconstruction from the state vectors.  Nonlinearity is one minus the mean
held-out R^2 of the best linear model of each state coordinate from the
last k inputs: 0 for states that are linear in the recent inputs, toward 1
for states the linear model cannot explain.  Both use ridge 1e-6 and a
50/50 chronological fit/evaluation split.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateBatchError,
    DegenerateStatesError,
    DimensionMismatchError,
    InvalidParameterError,
)
from .validation import check_matrix, check_series

RIDGE_DEFAULT = 1e-6


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    nrmse: float
    cc: float
    split: str = ""
    task: str = ""


@dataclass(frozen=True)
class ReservoirQuality:
    mc: float
    nl: float
    k: int

    def __post_init__(self):
        if self.mc > self.k + 1e-9:
            raise InvalidParameterError("memory capacity cannot exceed the probe depth")


def pearson(a, b) -> float:
    a = check_series(a, "a")
    b = check_series(b, "b")
    if a.size != b.size:
        raise DimensionMismatchError("vectors must have equal length")
    ac = a - a.mean()
    bc = b - b.mean()
    denom = np.sqrt(float(ac @ ac) * float(bc @ bc))
    if denom == 0.0:
        raise DegenerateBatchError("Pearson correlation undefined for constant input")
    return float(ac @ bc) / denom


def evaluate(targets, outputs, split: str = "", task: str = "") -> MetricsReport:
    """MSE, NRMSE (rms error over target standard deviation), and Pearson CC."""
    y = check_series(targets, "targets")
    out = check_series(outputs, "outputs")
    if y.size != out.size:
        raise DimensionMismatchError("targets and outputs must have equal length")
    if y.size < 2:
        raise InvalidParameterError("need at least two samples")
    std = y.std()
    if std == 0.0:
        raise DegenerateBatchError("NRMSE and CC undefined for constant targets")
    diff = out - y
    mse = float(diff @ diff) / y.size
    return MetricsReport(
        mse=mse,
        nrmse=float(np.sqrt(mse) / std),
        cc=pearson(y, out),
        split=split,
        task=task,
    )


def _ridge_solve(xc: np.ndarray, yc: np.ndarray, lam: float) -> np.ndarray:
    """Ridge coefficients for centered data; dual form when wide."""
    n, d = xc.shape
    if d <= n:
        return np.linalg.solve(xc.T @ xc + lam * np.eye(d), xc.T @ yc)
    dual = np.linalg.solve(xc @ xc.T + lam * np.eye(n), yc)
    return xc.T @ dual


def _fit_eval_split(states, inputs, k_max, washout):
    x = check_matrix(states, "states")
    u = check_series(inputs, "inputs")
    if x.shape[0] != u.size:
        raise DimensionMismatchError("states and inputs must have equal length")
    if k_max < 1:
        raise InvalidParameterError("k_max must be >= 1")
    start = max(washout, k_max)
    ts = np.arange(start, x.shape[0])
    if ts.size < 4 * k_max:
        raise InvalidParameterError("probe series too short for this k_max")
    if np.all(x[ts].std(axis=0) == 0.0):
        raise DegenerateStatesError("all state coordinates are constant")
    half = ts.size // 2
    return x, u, ts[:half], ts[half:]


def memory_capacity(states, inputs, k_max: int = 8, washout: int = 100,
                    ridge: float = RIDGE_DEFAULT) -> float:
    """Sum of squared held-out correlations of delayed-input reconstructions.

    Delays whose reconstruction collapses to a constant contribute zero
    capacity.
    """
    x, u, ts_fit, ts_eval = _fit_eval_split(states, inputs, k_max, washout)
    x_fit, x_eval = x[ts_fit], x[ts_eval]
    xm = x_fit.mean(axis=0)
    xc_fit = x_fit - xm
    xc_eval = x_eval - xm
    y_fit = np.stack([u[ts_fit - j] for j in range(1, k_max + 1)], axis=1)
    y_eval = np.stack([u[ts_eval - j] for j in range(1, k_max + 1)], axis=1)
    ym = y_fit.mean(axis=0)
    coefs = _ridge_solve(xc_fit, y_fit - ym, ridge)
    preds = xc_eval @ coefs + ym

    mc = 0.0
    for j in range(k_max):
        try:
            mc += pearson(y_eval[:, j], preds[:, j]) ** 2
        except DegenerateBatchError:
            continue
    return float(mc)


def nonlinearity(states, inputs, k_max: int = 8, washout: int = 100,
                 ridge: float = RIDGE_DEFAULT) -> float:
    """One minus the mean held-out R^2 of linear input models per coordinate.

    Coordinates constant over the evaluation half carry no dynamical signal
    and are excluded from the mean; the result is clamped to [0, 1].
    """
    x, u, ts_fit, ts_eval = _fit_eval_split(states, inputs, k_max, washout)

    def design(ts):
        cols = [np.ones(ts.size)] + [u[ts - j] for j in range(k_max)]
        return np.stack(cols, axis=1)

    f_fit, f_eval = design(ts_fit), design(ts_eval)
    s_fit, s_eval = x[ts_fit], x[ts_eval]
    coefs = np.linalg.solve(f_fit.T @ f_fit + ridge * np.eye(f_fit.shape[1]),
                            f_fit.T @ s_fit)
    resid = s_eval - f_eval @ coefs
    sse = (resid ** 2).sum(axis=0)
    sst = ((s_eval - s_eval.mean(axis=0)) ** 2).sum(axis=0)
    live = sst > 0.0
    if not live.any():
        raise DegenerateStatesError("all state coordinates constant on the eval half")
    r2 = 1.0 - sse[live] / sst[live]
    return float(np.clip(1.0 - r2.mean(), 0.0, 1.0))


def reservoir_quality(states, inputs, k_max: int = 8, washout: int = 100,
                      ridge: float = RIDGE_DEFAULT) -> ReservoirQuality:
    return ReservoirQuality(
        mc=memory_capacity(states, inputs, k_max, washout, ridge),
        nl=nonlinearity(states, inputs, k_max, washout, ridge),
        k=k_max,
    )
