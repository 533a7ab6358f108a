"""Streaming detector: look-back/predict-forward forecasting with a windowed three-sigma threshold."""

from __future__ import annotations

import enum
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cells import CellKind, CellParameters, TrainingConfig, WindowNormalizer, predict_next, train_window
from .errors import ConfigurationError, InsufficientHistoryError, InvalidArgumentError

log = logging.getLogger(__name__)

AARE_EPS = 1e-8


class Verdict(str, enum.Enum):
    WARMUP = "WARMUP"
    NORMAL = "NORMAL"
    ANOMALOUS = "ANOMALOUS"


@dataclass(frozen=True)
class DetectorConfig:
    window_w: int
    look_back: int = 3
    predict_forward: int = 1
    sigma_multiplier: float = 3.0
    cell_kind: CellKind = CellKind.LSTM
    training: TrainingConfig = field(default_factory=TrainingConfig)

    def __post_init__(self):
        object.__setattr__(self, "cell_kind", CellKind(self.cell_kind))
        if self.window_w < 3:
            raise ConfigurationError(f"window_w must be >= 3, got {self.window_w}")
        if self.look_back < 2:
            raise ConfigurationError(f"look_back must be >= 2, got {self.look_back}")
        if self.predict_forward != 1:
            raise ConfigurationError("only predict_forward=1 is supported")
        if not self.sigma_multiplier > 0:
            raise ConfigurationError(f"sigma_multiplier must be positive, got {self.sigma_multiplier}")

    @property
    def canonical(self) -> bool:
        return self.look_back == 3 and self.predict_forward == 1

    @property
    def first_aare_index(self) -> int:
        return self.look_back + 2

    @property
    def first_detection_index(self) -> int:
        return self.look_back + 4


@dataclass(frozen=True)
class ThresholdSnapshot:
    mu_aare: float
    sigma_aare: float
    thd: float

    def exceeded_by(self, value: float) -> bool:
        # ">= thd" alone would flag every point of a perfectly predicted
        # stream (sigma == 0, value == mu); require the value to sit above
        # the mean as well.
        return value >= self.thd and value > self.mu_aare


@dataclass
class StepOutcome:
    t: int
    value: float
    predicted: float | None = None
    aare: float | None = None
    threshold: ThresholdSnapshot | None = None
    verdict: Verdict = Verdict.WARMUP
    retrained: bool = False
    warmup_trained: bool = False
    elapsed: float = 0.0
    data_quality_flag: bool = False

    @property
    def trained(self) -> bool:
        return self.retrained or self.warmup_trained


def aare(actuals: Sequence[float], predicted: Sequence[float]) -> float:
    """Average absolute relative error over the last three points."""
    a = np.asarray(actuals, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.shape != (3,) or p.shape != (3,):
        raise InvalidArgumentError(f"aare needs 3 actuals and 3 predictions, got {a.shape} and {p.shape}")
    return float(np.mean(np.abs(a - p) / np.maximum(np.abs(a), AARE_EPS)))


def threshold(values: Sequence[float], window_w: int, sigma_multiplier: float = 3.0) -> ThresholdSnapshot:
    """mu + k*sigma over the ``window_w`` most recent of ``values`` (population std)."""
    if window_w < 1:
        raise InvalidArgumentError(f"window_w must be positive, got {window_w}")
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 3:
        raise InsufficientHistoryError(f"threshold needs >= 3 AARE values, got {arr.size}")
    arr = arr[-window_w:]
    mu = float(arr.mean())
    sigma = float(np.sqrt(np.mean((arr - mu) ** 2)))
    return ThresholdSnapshot(mu, sigma, mu + sigma_multiplier * sigma)


class AareWindow:
    """Fixed-capacity FIFO of ``(t, aare)`` pairs backed by a ring buffer."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise InvalidArgumentError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._values = np.empty(capacity)
        self._times = np.empty(capacity, dtype=np.int64)
        self._head = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def append(self, t: int, value: float) -> None:
        if self._size and t <= self.last_time:
            raise InvalidArgumentError(f"time index {t} is not after {self.last_time}")
        self._values[self._head] = value
        self._times[self._head] = t
        self._head = (self._head + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    @property
    def last_time(self) -> int:
        return int(self._times[(self._head - 1) % self.capacity])

    def _order(self) -> np.ndarray:
        return (self._head - self._size + np.arange(self._size)) % self.capacity

    def values(self) -> np.ndarray:
        return self._values[self._order()]

    def times(self) -> np.ndarray:
        return self._times[self._order()]

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip(self.times().tolist(), self.values().tolist())

    def snapshot(self, sigma_multiplier: float = 3.0) -> ThresholdSnapshot:
        if self._size < 3:
            raise InsufficientHistoryError(f"threshold needs >= 3 AARE values, got {self._size}")
        live = self._values if self._size == self.capacity else self._values[: self._size]
        mu = float(live.mean())
        sigma = float(np.sqrt(np.mean((live - mu) ** 2)))
        return ThresholdSnapshot(mu, sigma, mu + sigma_multiplier * sigma)


class Detector:
    """One detector instance per stream; ``step`` is not thread-safe.

    Non-finite observations are consumed (the stream index advances) but
    bypass the forecasting machinery entirely: the detector's internal time
    index ``T`` counts finite points only.
    """

    def __init__(self, config: DetectorConfig):
        self.config = config
        if not config.canonical:
            log.warning("non-canonical look_back=%d (canonical is 3)", config.look_back)
        self.t = 0
        self.T = 0
        self.recent: deque[float] = deque(maxlen=max(config.look_back + 1, 3))
        self.predictions: dict[int, float] = {}
        self.aare_buffer = AareWindow(config.window_w)
        self.model: tuple[CellParameters, WindowNormalizer] | None = None
        self.retrain_count = 0
        self.warmup_train_count = 0
        self.point_count = 0

    def _train(self, window) -> None:
        self.model = train_window(self.config.cell_kind, window, self.config.training)

    def _predict(self, window) -> float:
        params, _ = self.model
        return predict_next(params, WindowNormalizer.fit(window), window)

    def _current_aare(self, T: int) -> float:
        actual = list(self.recent)[-3:]
        return aare(actual, [self.predictions[y] for y in range(T - 2, T + 1)])

    def step(self, value: float) -> StepOutcome:
        start = time.perf_counter()
        out = StepOutcome(t=self.t, value=value)
        self.t += 1
        self.point_count += 1
        if not math.isfinite(value):
            out.data_quality_flag = True
            out.verdict = Verdict.WARMUP if self.T < self.config.first_detection_index else Verdict.NORMAL
            out.elapsed = time.perf_counter() - start
            return out

        T = self.T
        self.T += 1
        b = self.config.look_back
        self.recent.append(float(value))
        recent = list(self.recent)
        out.predicted = self.predictions.get(T)

        if T < b - 1:
            pass
        elif T < self.config.first_detection_index:
            self._train(recent[-b:])
            self.warmup_train_count += 1
            out.warmup_trained = True
            if T >= self.config.first_aare_index:
                out.aare = self._current_aare(T)
                self.aare_buffer.append(T, out.aare)
            self.predictions[T + 1] = self._predict(recent[-b:])
        else:
            a = self._current_aare(T)
            if len(self.aare_buffer) >= 3:
                snap = self.aare_buffer.snapshot(self.config.sigma_multiplier)
            else:
                # Only at the first detection point: two prior values exist,
                # so the current one completes the minimum of three.
                snap = threshold([*self.aare_buffer.values(), a], self.config.window_w, self.config.sigma_multiplier)
            out.verdict = Verdict.NORMAL
            if snap.exceeded_by(a):
                previous = recent[-b - 1:-1]
                self._train(previous)
                self.retrain_count += 1
                out.retrained = True
                self.predictions[T] = out.predicted = self._predict(previous)
                a = self._current_aare(T)
                if snap.exceeded_by(a):
                    out.verdict = Verdict.ANOMALOUS
            out.aare = a
            out.threshold = snap
            self.aare_buffer.append(T, a)
            self.predictions[T + 1] = self._predict(recent[-b:])

        for y in [y for y in self.predictions if y < T - 1]:
            del self.predictions[y]
        out.elapsed = time.perf_counter() - start
        return out

    def run(self, values: Iterable[float]) -> Iterator[StepOutcome]:
        for v in values:
            yield self.step(v)
