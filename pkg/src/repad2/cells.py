"""Single-layer recurrent predictors (vanilla RNN, LSTM, GRU) written against numpy.

Every network has one scalar input, ``hidden_dim`` tanh units and a scalar
linear readout.  Parameters live in one flat float64 vector so that training,
gradient clipping and finite-difference checks are plain vector arithmetic.

Flat layout (``G`` gate blocks, ``H`` hidden units)::

    w_in   G*H       input weights, gate-major
    w_rec  G*H x H   recurrent weights, row-major
    b      G*H       gate biases
    w_out  H         readout weights
    b_out  1         readout bias

Gate order is ``[input, forget, output, candidate]`` for LSTM and
``[update, reset, candidate]`` for GRU.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, InvalidArgumentError, NumericInputError

SCALE_FLOOR = 1e-8


class CellKind(str, enum.Enum):
    VANILLA_RNN = "rnn"
    LSTM = "lstm"
    GRU = "gru"

    @property
    def gates(self) -> int:
        return _GATES[self]


_GATES = {CellKind.VANILLA_RNN: 1, CellKind.GRU: 3, CellKind.LSTM: 4}


def parameter_count(kind: CellKind, hidden_dim: int) -> int:
    g, h = CellKind(kind).gates, hidden_dim
    return g * h * (2 + h) + h + 1


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int = 50
    learning_rate: float = 0.005
    seed: int = 140
    hidden_dim: int = 10
    clip: float = 5.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be positive, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be unsigned, got {self.seed}")
        if self.hidden_dim < 1:
            raise ConfigurationError(f"hidden_dim must be positive, got {self.hidden_dim}")
        if not self.clip > 0:
            raise ConfigurationError(f"clip must be positive, got {self.clip}")


@dataclass(frozen=True, eq=False)
class CellParameters:
    """Weights of one network, stored flat.  The array is read-only."""

    kind: CellKind
    hidden_dim: int
    values: np.ndarray

    def __post_init__(self):
        kind = CellKind(self.kind)
        object.__setattr__(self, "kind", kind)
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (parameter_count(kind, self.hidden_dim),):
            raise InvalidArgumentError(
                f"{kind.name} with hidden_dim={self.hidden_dim} needs "
                f"{parameter_count(kind, self.hidden_dim)} values, got shape {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def w_in(self) -> np.ndarray:
        return _views(self.kind, self.hidden_dim, self.values)[0]

    @property
    def w_rec(self) -> np.ndarray:
        return _views(self.kind, self.hidden_dim, self.values)[1]

    @property
    def b(self) -> np.ndarray:
        return _views(self.kind, self.hidden_dim, self.values)[2]

    @property
    def w_out(self) -> np.ndarray:
        return _views(self.kind, self.hidden_dim, self.values)[3]

    @property
    def b_out(self) -> float:
        return float(self.values[-1])

    def replace(self, values: np.ndarray) -> "CellParameters":
        return CellParameters(self.kind, self.hidden_dim, values)

    def __eq__(self, other):
        if not isinstance(other, CellParameters):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.hidden_dim == other.hidden_dim
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class WindowNormalizer:
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ConfigurationError(f"scale must be positive, got {self.scale}")

    @classmethod
    def fit(cls, window: Sequence[float]) -> "WindowNormalizer":
        """Mean/std normalizer for ``window``.

        A constant window keeps its value as the shift verbatim, so that it
        normalizes to exact zeros instead of to rounding residue of the mean.
        """
        arr = _finite_array(window, "window")
        if arr.size == 0:
            raise InvalidArgumentError("cannot fit a normalizer to an empty window")
        if np.all(arr == arr[0]):
            return cls(float(arr[0]), SCALE_FLOOR)
        return cls(float(arr.mean()), max(float(arr.std()), SCALE_FLOOR))

    def normalize(self, x):
        return (np.asarray(x, dtype=np.float64) - self.shift) / self.scale

    def denormalize(self, z):
        return np.asarray(z, dtype=np.float64) * self.scale + self.shift


def _views(kind: CellKind, hidden: int, flat: np.ndarray):
    gh = kind.gates * hidden
    i = 0
    w_in = flat[i:i + gh]
    i += gh
    w_rec = flat[i:i + gh * hidden].reshape(gh, hidden)
    i += gh * hidden
    b = flat[i:i + gh]
    i += gh
    w_out = flat[i:i + hidden]
    return w_in, w_rec, b, w_out, flat[-1:]


def _finite_array(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise NumericInputError(f"{what} contains non-finite values")
    return arr


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def init_parameters(kind: CellKind, hidden_dim: int, seed: int) -> CellParameters:
    """Glorot-uniform weights, zero biases.

    Draw order from ``numpy.random.default_rng(seed)`` is fixed: ``w_in``,
    then ``w_rec`` (row-major), then ``w_out``.  Each gate block of ``w_in``
    and ``w_rec`` uses the fan of a single ``H``-unit layer.
    """
    kind = CellKind(kind)
    if hidden_dim < 1:
        raise ConfigurationError(f"hidden_dim must be >= 1, got {hidden_dim}")
    if seed < 0:
        raise ConfigurationError(f"seed must be unsigned, got {seed}")
    rng = np.random.default_rng(seed)
    flat = np.zeros(parameter_count(kind, hidden_dim))
    w_in, w_rec, _, w_out, _ = _views(kind, hidden_dim, flat)
    w_in[:] = rng.uniform(-1.0, 1.0, w_in.shape) * np.sqrt(6.0 / (1 + hidden_dim))
    w_rec[:] = rng.uniform(-1.0, 1.0, w_rec.shape) * np.sqrt(6.0 / (2 * hidden_dim))
    w_out[:] = rng.uniform(-1.0, 1.0, w_out.shape) * np.sqrt(6.0 / (hidden_dim + 1))
    return CellParameters(kind, hidden_dim, flat)


# Each _run_* returns (outputs, hidden_states, cache); hidden_states[0] is h0.

def _run_rnn(flat, hidden, xs):
    w_in, w_rec, b, w_out, b_out = _views(CellKind.VANILLA_RNN, hidden, flat)
    h = np.zeros(hidden)
    hs = [h]
    for x in xs:
        h = np.tanh(w_in * x + w_rec @ h + b)
        hs.append(h)
    ys = np.array([w_out @ h for h in hs[1:]]) + b_out[0]
    return ys, hs, None


def _back_rnn(flat, hidden, xs, hs, cache, dys):
    w_in, w_rec, b, w_out, b_out = _views(CellKind.VANILLA_RNN, hidden, flat)
    grad = np.zeros_like(flat)
    g_in, g_rec, g_b, g_out, g_bout = _views(CellKind.VANILLA_RNN, hidden, grad)
    dh_next = np.zeros(hidden)
    for t in reversed(range(len(xs))):
        h = hs[t + 1]
        dh = dys[t] * w_out + dh_next
        g_out += dys[t] * h
        da = dh * (1.0 - h * h)
        g_in += da * xs[t]
        g_rec += np.outer(da, hs[t])
        g_b += da
        dh_next = w_rec.T @ da
    g_bout += dys.sum()
    return grad


def _run_lstm(flat, hidden, xs):
    w_in, w_rec, b, w_out, b_out = _views(CellKind.LSTM, hidden, flat)
    H = hidden
    h = np.zeros(H)
    c = np.zeros(H)
    hs = [h]
    cache = []
    for x in xs:
        a = w_in * x + w_rec @ h + b
        i = _sigmoid(a[:H])
        f = _sigmoid(a[H:2 * H])
        o = _sigmoid(a[2 * H:3 * H])
        g = np.tanh(a[3 * H:])
        c_prev = c
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        cache.append((i, f, o, g, c_prev, tc))
        hs.append(h)
    ys = np.array([w_out @ h for h in hs[1:]]) + b_out[0]
    return ys, hs, cache


def _back_lstm(flat, hidden, xs, hs, cache, dys):
    w_in, w_rec, b, w_out, b_out = _views(CellKind.LSTM, hidden, flat)
    grad = np.zeros_like(flat)
    g_in, g_rec, g_b, g_out, g_bout = _views(CellKind.LSTM, hidden, grad)
    H = hidden
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    da = np.empty(4 * H)
    for t in reversed(range(len(xs))):
        i, f, o, g, c_prev, tc = cache[t]
        dh = dys[t] * w_out + dh_next
        g_out += dys[t] * hs[t + 1]
        dc = dc_next + dh * o * (1.0 - tc * tc)
        da[:H] = dc * g * i * (1.0 - i)
        da[H:2 * H] = dc * c_prev * f * (1.0 - f)
        da[2 * H:3 * H] = dh * tc * o * (1.0 - o)
        da[3 * H:] = dc * i * (1.0 - g * g)
        dc_next = dc * f
        g_in += da * xs[t]
        g_rec += np.outer(da, hs[t])
        g_b += da
        dh_next = w_rec.T @ da
    g_bout += dys.sum()
    return grad


def _run_gru(flat, hidden, xs):
    w_in, w_rec, b, w_out, b_out = _views(CellKind.GRU, hidden, flat)
    H = hidden
    u_z, u_r, u_n = w_rec[:H], w_rec[H:2 * H], w_rec[2 * H:]
    h = np.zeros(H)
    hs = [h]
    cache = []
    for x in xs:
        ax = w_in * x + b
        z = _sigmoid(ax[:H] + u_z @ h)
        r = _sigmoid(ax[H:2 * H] + u_r @ h)
        rh = r * h
        n = np.tanh(ax[2 * H:] + u_n @ rh)
        h = (1.0 - z) * n + z * h
        cache.append((z, r, n, rh))
        hs.append(h)
    ys = np.array([w_out @ h for h in hs[1:]]) + b_out[0]
    return ys, hs, cache


def _back_gru(flat, hidden, xs, hs, cache, dys):
    w_in, w_rec, b, w_out, b_out = _views(CellKind.GRU, hidden, flat)
    grad = np.zeros_like(flat)
    g_in, g_rec, g_b, g_out, g_bout = _views(CellKind.GRU, hidden, grad)
    H = hidden
    u_z, u_r, u_n = w_rec[:H], w_rec[H:2 * H], w_rec[2 * H:]
    dh_next = np.zeros(H)
    da = np.empty(3 * H)
    for t in reversed(range(len(xs))):
        z, r, n, rh = cache[t]
        h_prev = hs[t]
        dh = dys[t] * w_out + dh_next
        g_out += dys[t] * hs[t + 1]
        da[2 * H:] = dh * (1.0 - z) * (1.0 - n * n)
        drh = u_n.T @ da[2 * H:]
        da[:H] = dh * (h_prev - n) * z * (1.0 - z)
        da[H:2 * H] = drh * h_prev * r * (1.0 - r)
        g_in += da * xs[t]
        g_b += da
        g_rec[:H] += np.outer(da[:H], h_prev)
        g_rec[H:2 * H] += np.outer(da[H:2 * H], h_prev)
        g_rec[2 * H:] += np.outer(da[2 * H:], rh)
        dh_next = dh * z + drh * r + u_z.T @ da[:H] + u_r.T @ da[H:2 * H]
    g_bout += dys.sum()
    return grad


_RUN = {CellKind.VANILLA_RNN: _run_rnn, CellKind.LSTM: _run_lstm, CellKind.GRU: _run_gru}
_BACK = {CellKind.VANILLA_RNN: _back_rnn, CellKind.LSTM: _back_lstm, CellKind.GRU: _back_gru}


def forward(params: CellParameters, inputs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Run the network over ``inputs`` from a zero state.

    Returns the per-step readouts and the final hidden state.
    """
    xs = _finite_array(inputs, "inputs")
    if xs.size == 0:
        raise InvalidArgumentError("inputs must be non-empty")
    ys, hs, _ = _RUN[params.kind](params.values, params.hidden_dim, xs)
    return ys, hs[-1].copy()


def _loss_and_grad(kind, hidden, flat, xs, targets):
    ys, hs, cache = _RUN[kind](flat, hidden, xs)
    resid = ys - targets
    dys = 2.0 * resid / resid.size
    return float(np.mean(resid * resid)), _BACK[kind](flat, hidden, xs, hs, cache, dys)


def mse_loss(params: CellParameters, inputs: Sequence[float], targets: Sequence[float]) -> float:
    xs, ts = _check_pair(inputs, targets)
    ys, _, _ = _RUN[params.kind](params.values, params.hidden_dim, xs)
    return float(np.mean((ys - ts) ** 2))


def _check_pair(inputs, targets):
    xs = _finite_array(inputs, "inputs")
    ts = _finite_array(targets, "targets")
    if xs.size != ts.size:
        raise InvalidArgumentError(f"length mismatch: {xs.size} inputs vs {ts.size} targets")
    if xs.size == 0:
        raise InvalidArgumentError("inputs must be non-empty")
    return xs, ts


def gradients(params: CellParameters, inputs: Sequence[float], targets: Sequence[float]) -> CellParameters:
    """BPTT gradient of the mean squared one-step error, in the parameter layout."""
    xs, ts = _check_pair(inputs, targets)
    _, grad = _loss_and_grad(params.kind, params.hidden_dim, params.values, xs, ts)
    return params.replace(grad)


def fit(
    params: CellParameters,
    inputs: Sequence[float],
    targets: Sequence[float],
    epochs: int,
    learning_rate: float,
    clip: float = 5.0,
) -> tuple[CellParameters, list[float]]:
    """Full-batch gradient descent with element-wise gradient clipping.

    ``losses[k]`` is the loss after ``k`` epochs, so the list has
    ``epochs + 1`` entries.
    """
    xs, ts = _check_pair(inputs, targets)
    kind, hidden = params.kind, params.hidden_dim
    theta = params.values.copy()
    losses = []
    for _ in range(epochs):
        loss, grad = _loss_and_grad(kind, hidden, theta, xs, ts)
        losses.append(loss)
        np.clip(grad, -clip, clip, out=grad)
        theta -= learning_rate * grad
    ys, _, _ = _RUN[kind](theta, hidden, xs)
    losses.append(float(np.mean((ys - ts) ** 2)))
    if not np.all(np.isfinite(theta)):
        raise NumericInputError("training diverged to non-finite parameters")
    return params.replace(theta), losses


def window_task(window: Sequence[float]) -> tuple[WindowNormalizer, np.ndarray, np.ndarray]:
    """Normalizer plus teacher-forced (inputs, targets) for a look-back window."""
    arr = _finite_array(window, "window")
    if arr.size < 2:
        raise InvalidArgumentError("a training window needs at least two values")
    norm = WindowNormalizer.fit(arr)
    z = norm.normalize(arr)
    return norm, z[:-1], z[1:]


def train_window(
    kind: CellKind, window: Sequence[float], config: TrainingConfig = TrainingConfig()
) -> tuple[CellParameters, WindowNormalizer]:
    """Fresh model trained on one look-back window.

    The window ``[d0, d1, d2]`` is fit as inputs ``[d0, d1]`` against targets
    ``[d1, d2]`` in normalized units.
    """
    norm, xs, ts = window_task(window)
    params = init_parameters(kind, config.hidden_dim, config.seed)
    params, _ = fit(params, xs, ts, config.epochs, config.learning_rate, config.clip)
    return params, norm


def predict_next(params: CellParameters, normalizer: WindowNormalizer, window: Sequence[float]) -> float:
    ys, _ = forward(params, normalizer.normalize(_finite_array(window, "window")))
    return float(normalizer.denormalize(ys[-1]))
