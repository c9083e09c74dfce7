"""Benchmark series generation.

NARMA-N is the driven nonlinear recurrence

    y[t+1] = a*y[t] + b*y[t]*sum(y[t-N+1..t]) + c*u[t-N+1]*u[t] + d

with u ~ U(0, 0.5) i.i.d., and y and u taken as zero before the first step.
Mackey-Glass is the delay differential equation

    du/dt = beta * u(t - tau_d) / (1 + u(t - tau_d)^n) - gamma * u(t)

integrated with fixed-step RK4; delayed values between grid nodes come from
cubic Hermite interpolation of the stored trajectory and its derivative, so
halving the integration step barely moves the sampled values.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InvalidParameterError, SeriesInstabilityError
from .validation import check_positive_int

DIVERGENCE_BOUND = 1e6


@dataclass(frozen=True)
class TimeSeries:
    samples: np.ndarray
    dt: float = 1.0
    provenance: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidParameterError("samples must be 1-D")
        if samples.size and not np.all(np.isfinite(samples)):
            raise InvalidParameterError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class NarmaParams:
    order: int = 2
    a: float = 0.3
    b: float = 0.05
    c: float = 1.5
    d: float = 0.1
    input_low: float = 0.0
    input_high: float = 0.5
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.order, "order")


@dataclass(frozen=True)
class MackeyGlassParams:
    beta: float = 0.2
    gamma: float = 0.1
    n: int = 10
    tau_d: float = 17.0
    dt_int: float = 0.1
    sample_spacing: float = 1.0
    initial_value: float = 1.2
    transient: int = 1000

    def __post_init__(self):
        if self.beta <= 0 or self.gamma <= 0:
            raise InvalidParameterError("beta and gamma must be > 0")
        if self.n < 1:
            raise InvalidParameterError("n must be >= 1")
        if self.tau_d <= 0:
            raise InvalidParameterError("tau_d must be > 0")
        steps = self.sample_spacing / self.dt_int
        if abs(steps - round(steps)) > 1e-9:
            raise InvalidParameterError("dt_int must divide the sample spacing")


@dataclass(frozen=True)
class HorizonSpec:
    tau: int = 1

    def __post_init__(self):
        if self.tau < 0:
            raise InvalidParameterError("prediction horizon must be >= 0")


def gen_narma(params: NarmaParams, length: int) -> tuple[TimeSeries, TimeSeries]:
    """Seeded NARMA inputs and targets, both of the requested length."""
    length = check_positive_int(length, "length")
    if length <= params.order:
        raise InvalidParameterError("length must exceed the NARMA order")
    rng = np.random.default_rng(params.seed)
    u = rng.uniform(params.input_low, params.input_high, size=length)
    y = np.zeros(length)
    n = params.order
    for t in range(length - 1):
        window = y[max(0, t - n + 1): t + 1].sum()
        u_old = u[t - n + 1] if t - n + 1 >= 0 else 0.0
        y[t + 1] = (
            params.a * y[t]
            + params.b * y[t] * window
            + params.c * u_old * u[t]
            + params.d
        )
        if abs(y[t + 1]) > DIVERGENCE_BOUND:
            raise SeriesInstabilityError(
                f"NARMA-{n} recurrence diverged at step {t + 1}", step=t + 1
            )
    prov = (
        f"narma order={n} a={params.a} b={params.b} c={params.c} d={params.d} "
        f"seed={params.seed} length={length}"
    )
    return (
        TimeSeries(u, dt=1.0, provenance=prov + " role=input"),
        TimeSeries(y, dt=1.0, provenance=prov + " role=target"),
    )


def _mg_rhs(x: float, x_delayed: float, p: MackeyGlassParams) -> float:
    return p.beta * x_delayed / (1.0 + x_delayed ** p.n) - p.gamma * x


def integrate_mackey_glass(params: MackeyGlassParams, n_samples: int) -> np.ndarray:
    """Raw sampled trajectory from the constant initial history (no scaling).

    Fixed-step RK4 on the integration grid; x(t <= 0) = initial_value.  The
    half-step delayed values use cubic Hermite interpolation between grid
    nodes, with stored node derivatives.
    """
    n_samples = check_positive_int(n_samples, "n_samples")
    p = params
    dt = p.dt_int
    steps_per_sample = round(p.sample_spacing / dt)
    total_steps = n_samples * steps_per_sample
    delay = p.tau_d / dt  # grid units, not necessarily integer

    # vals[k], derivs[k] for grid index k; history (k <= 0) is constant.
    pad = int(np.ceil(delay)) + 2
    vals = np.empty(pad + total_steps + 1)
    derivs = np.zeros_like(vals)
    vals[: pad + 1] = p.initial_value  # indices -pad .. 0
    off = pad

    def delayed(k_float: float) -> float:
        """x at fractional grid index k_float (cubic Hermite between nodes)."""
        if k_float <= 0.0:
            return p.initial_value
        k0 = int(np.floor(k_float))
        s = k_float - k0
        if s == 0.0:
            return vals[off + k0]
        y0, y1 = vals[off + k0], vals[off + k0 + 1]
        d0, d1 = derivs[off + k0], derivs[off + k0 + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1

    x = p.initial_value
    derivs[off] = _mg_rhs(x, delayed(-delay), p)
    for k in range(total_steps):
        xd0 = delayed(k - delay)
        xdh = delayed(k + 0.5 - delay)
        xd1 = delayed(k + 1 - delay)
        k1 = _mg_rhs(x, xd0, p)
        k2 = _mg_rhs(x + 0.5 * dt * k1, xdh, p)
        k3 = _mg_rhs(x + 0.5 * dt * k2, xdh, p)
        k4 = _mg_rhs(x + dt * k3, xd1, p)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.isfinite(x):
            raise SeriesInstabilityError(
                f"Mackey-Glass integration lost finiteness at step {k + 1}",
                step=k + 1,
            )
        vals[off + k + 1] = x
        derivs[off + k + 1] = _mg_rhs(x, delayed(k + 1 - delay), p)

    return vals[off + steps_per_sample:: steps_per_sample][:n_samples].copy()


def gen_mackey_glass(params: MackeyGlassParams, length: int) -> TimeSeries:
    """Transient-discarded, [0, 1] min-max scaled Mackey-Glass samples."""
    length = check_positive_int(length, "length")
    raw = integrate_mackey_glass(params, params.transient + length)
    tail = raw[params.transient:]
    lo, hi = tail.min(), tail.max()
    if hi <= lo:
        raise SeriesInstabilityError("Mackey-Glass trajectory collapsed to a constant")
    scaled = (tail - lo) / (hi - lo)
    prov = (
        f"mackey_glass beta={params.beta} gamma={params.gamma} n={params.n} "
        f"tau_d={params.tau_d} dt_int={params.dt_int} transient={params.transient} "
        f"length={length} scaled=[0,1]"
    )
    return TimeSeries(scaled, dt=params.sample_spacing, provenance=prov)


def shift_horizon(series: TimeSeries, tau) -> tuple[TimeSeries, TimeSeries]:
    """Split a series into (inputs, targets-tau-ahead) pairs."""
    if isinstance(tau, HorizonSpec):
        tau = tau.tau
    if tau < 0:
        raise InvalidParameterError("prediction horizon must be >= 0")
    if tau >= len(series):
        raise InvalidParameterError(
            f"horizon {tau} must be smaller than the series length {len(series)}"
        )
    n = len(series)
    inputs = TimeSeries(
        series.samples[: n - tau], dt=series.dt,
        provenance=series.provenance + f" horizon_inputs tau={tau}",
    )
    targets = TimeSeries(
        series.samples[tau:], dt=series.dt,
        provenance=series.provenance + f" horizon_targets tau={tau}",
    )
    return inputs, targets


def save_series(series: TimeSeries, path) -> None:
    """CSV with a provenance header comment and (index, value) rows."""
    with open(path, "w") as fh:
        fh.write(f"# provenance: {series.provenance}\n")
        fh.write(f"# dt: {series.dt!r}\n")
        fh.write("index,value\n")
        for i, v in enumerate(series.samples):
            fh.write(f"{i},{float(v)!r}\n")


def load_series(path) -> TimeSeries:
    provenance = ""
    dt = 1.0
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# provenance:"):
                provenance = line.split(":", 1)[1].strip()
            elif line.startswith("# dt:"):
                dt = float(line.split(":", 1)[1])
            elif not line or line.startswith("#") or line.startswith("index"):
                continue
            else:
                values.append(float(line.split(",")[1]))
    return TimeSeries(np.asarray(values), dt=dt, provenance=provenance)
