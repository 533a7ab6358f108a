"""Scoring of detections against labeled anomalies, plus latency statistics."""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyStreamError, InvalidArgumentError

DEFAULT_K = 3


class LabelKind(str, enum.Enum):
    POINT = "POINT"
    COLLECTIVE = "COLLECTIVE"


@dataclass(frozen=True, order=True)
class AnomalyLabel:
    start: int
    end: int
    kind: LabelKind

    def __post_init__(self):
        object.__setattr__(self, "kind", LabelKind(self.kind))
        if self.kind is LabelKind.POINT and self.start != self.end:
            raise InvalidArgumentError(f"point label must have start == end, got [{self.start}, {self.end}]")
        if self.kind is LabelKind.COLLECTIVE and self.end <= self.start:
            raise InvalidArgumentError(f"collective label needs end > start, got [{self.start}, {self.end}]")

    @classmethod
    def point(cls, at: int) -> "AnomalyLabel":
        return cls(at, at, LabelKind.POINT)

    @classmethod
    def collective(cls, start: int, end: int) -> "AnomalyLabel":
        return cls(start, end, LabelKind.COLLECTIVE)

    def tolerance_window(self, k: int) -> tuple[int, int]:
        """Inclusive index range in which a detection credits this label."""
        if self.kind is LabelKind.POINT:
            return self.start - k, self.start + k
        return self.start - k, self.end


@dataclass(frozen=True)
class ScoringConfig:
    k: int = DEFAULT_K

    def __post_init__(self):
        if self.k < 0:
            raise InvalidArgumentError(f"k must be non-negative, got {self.k}")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int


def check_labels(labels: Sequence[AnomalyLabel]) -> None:
    for prev, cur in zip(labels, labels[1:]):
        if cur.start <= prev.end:
            raise InvalidArgumentError(f"labels must be sorted and disjoint: {prev} then {cur}")


def _check_sorted(detections: Sequence[int]) -> None:
    for a, b in zip(detections, detections[1:]):
        if b < a:
            raise InvalidArgumentError("detections must be sorted ascending")


def _hit(detections: Sequence[int], lo: int, hi: int) -> bool:
    i = bisect.bisect_left(detections, lo)
    return i < len(detections) and detections[i] <= hi


def undetected_labels(
    labels: Sequence[AnomalyLabel], detections: Sequence[int], cfg: ScoringConfig = ScoringConfig()
) -> list[AnomalyLabel]:
    labels, detections = list(labels), list(detections)
    check_labels(labels)
    _check_sorted(detections)
    return [lab for lab in labels if not _hit(detections, *lab.tolerance_window(cfg.k))]


def match_detections(
    labels: Sequence[AnomalyLabel], detections: Sequence[int], cfg: ScoringConfig = ScoringConfig()
) -> ConfusionCounts:
    """K-window matching.

    Each label is one TP if any detection falls in its tolerance window and
    one FN otherwise.  Each detection outside every window is one FP.
    """
    labels, detections = list(labels), list(detections)
    missed = undetected_labels(labels, detections, cfg)
    windows = sorted(lab.tolerance_window(cfg.k) for lab in labels)
    starts = [lo for lo, _ in windows]
    # windows may overlap when labels are closer than k; keep a running max of ends
    reach, acc = [], -math.inf
    for _, hi in windows:
        acc = max(acc, hi)
        reach.append(acc)
    fp = 0
    for d in detections:
        i = bisect.bisect_right(starts, d) - 1
        if i < 0 or reach[i] < d:
            fp += 1
    return ConfusionCounts(tp=len(labels) - len(missed), fp=fp, fn=len(missed))


def f1_score(precision: float, recall: float) -> float:
    s = precision + recall
    return 0.0 if s == 0 else 2.0 * precision * recall / s


def prf1(counts: ConfusionCounts) -> tuple[float, float, float]:
    """Precision, recall and F1; an empty denominator counts as 1.0."""
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 1.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 1.0
    return p, r, f1_score(p, r)


@dataclass(frozen=True)
class TimingStats:
    dt_train_mean: float | None
    dt_train_std: float | None
    dt_notrain_mean: float | None
    dt_notrain_std: float | None
    retrain_ratio: float
    n_train: int
    n_notrain: int
    n_retrain: int


def _mean_std(xs: list[float]) -> tuple[float | None, float | None]:
    if not xs:
        return None, None
    mu = math.fsum(xs) / len(xs)
    return mu, math.sqrt(math.fsum((x - mu) ** 2 for x in xs) / len(xs))


def timing_stats(outcomes: Iterable) -> TimingStats:
    """DT-Train / DT-noTrain mean and population std, plus the retrain ratio.

    A step counts as a training step when any model was trained in it,
    warm-up included; the ratio counts threshold-triggered retrains only.
    """
    train, notrain, n, retrains = [], [], 0, 0
    for o in outcomes:
        n += 1
        retrains += bool(o.retrained)
        (train if o.retrained or o.warmup_trained else notrain).append(o.elapsed)
    if n == 0:
        raise EmptyStreamError("timing_stats needs at least one outcome")
    tm, ts = _mean_std(train)
    nm, ns = _mean_std(notrain)
    return TimingStats(tm, ts, nm, ns, retrains / n, len(train), len(notrain), retrains)
