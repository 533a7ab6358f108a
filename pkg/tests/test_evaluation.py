import math
import statistics
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from repad2.errors import EmptyStreamError, InvalidArgumentError
from repad2.evaluation import (
    AnomalyLabel,
    ConfusionCounts,
    ScoringConfig,
    f1_score,
    match_detections,
    prf1,
    timing_stats,
    undetected_labels,
)

from oracles import match_oracle


def random_instance(rng, max_labels=20, max_dets=50, span=300):
    labels, pos = [], int(rng.integers(0, 10))
    for _ in range(int(rng.integers(0, max_labels + 1))):
        if rng.random() < 0.4:
            labels.append(AnomalyLabel.point(pos))
            pos += 1
        else:
            length = int(rng.integers(2, 15))
            labels.append(AnomalyLabel.collective(pos, pos + length - 1))
            pos += length
        pos += int(rng.integers(1, 20))
    dets = sorted(rng.choice(np.arange(span), size=int(rng.integers(0, max_dets + 1)), replace=False).tolist())
    return labels, dets


def test_point_boundary():
    assert match_detections([AnomalyLabel.point(100)], [103]) == ConfusionCounts(1, 0, 0)
    assert match_detections([AnomalyLabel.point(100)], [97]) == ConfusionCounts(1, 0, 0)
    assert match_detections([AnomalyLabel.point(100)], [104]) == ConfusionCounts(0, 1, 1)


def test_collective_boundary():
    lab = [AnomalyLabel.collective(50, 60)]
    assert match_detections(lab, [47]).tp == 1
    assert match_detections(lab, [46]) == ConfusionCounts(0, 1, 1)
    assert match_detections(lab, [61]) == ConfusionCounts(0, 1, 1)


def test_no_labels():
    assert match_detections([], [200, 201]) == ConfusionCounts(0, 2, 0)


def test_multiple_hits_single_tp():
    assert match_detections([AnomalyLabel.collective(10, 20)], [8, 10, 15, 20]) == ConfusionCounts(1, 0, 0)


def test_unsorted_rejected():
    with pytest.raises(InvalidArgumentError):
        match_detections([], [5, 3])
    with pytest.raises(InvalidArgumentError):
        match_detections([AnomalyLabel.point(9), AnomalyLabel.point(3)], [])


def test_label_validation():
    with pytest.raises(InvalidArgumentError):
        AnomalyLabel(3, 4, "POINT")
    with pytest.raises(InvalidArgumentError):
        AnomalyLabel.collective(5, 5)


def test_matches_oracle_on_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        labels, dets = random_instance(rng)
        k = int(rng.integers(0, 6))
        c = match_detections(labels, dets, ScoringConfig(k))
        assert (c.tp, c.fp, c.fn) == match_oracle(labels, dets, k)
        assert c.tp + c.fn == len(labels)


def test_undetected_labels():
    labels = [AnomalyLabel.point(10), AnomalyLabel.collective(40, 45)]
    assert undetected_labels(labels, [12]) == [labels[1]]


@given(st.integers(0, 2**32 - 1), st.integers(0, 299))
def test_adding_detection_is_monotone(seed, extra):
    labels, dets = random_instance(np.random.default_rng(seed))
    before = match_detections(labels, dets)
    after = match_detections(labels, sorted(set(dets) | {extra}))
    assert after.tp >= before.tp
    assert after.tp + after.fp >= before.tp + before.fp


def test_prf1_examples():
    assert prf1(ConfusionCounts(16, 0, 0)) == (1.0, 1.0, 1.0)
    assert round(f1_score(0.936, 1.0), 3) == 0.967
    assert round(f1_score(0.979, 1.0), 3) == 0.989
    assert prf1(ConfusionCounts(0, 0, 0)) == (1.0, 1.0, 1.0)
    assert prf1(ConfusionCounts(0, 5, 3)) == (0.0, 0.0, 0.0)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_prf1_bounds(tp, fp, fn):
    p, r, f = prf1(ConfusionCounts(tp, fp, fn))
    for x in (p, r, f):
        assert 0.0 <= x <= 1.0
    assert f <= (p + r) / 2 + 1e-12
    # harmonic mean: between min and max, and below the geometric mean
    assert f <= math.sqrt(p * r) + 1e-12
    if p + r > 0:
        assert min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12


def step(elapsed, retrained=False, warmup=False):
    return SimpleNamespace(elapsed=elapsed, retrained=retrained, warmup_trained=warmup)


def test_timing_all_notrain():
    s = timing_stats([step(0.010)] * 20)
    assert s.dt_notrain_mean == pytest.approx(0.010)
    assert s.dt_notrain_std == pytest.approx(0.0, abs=1e-15)
    assert s.retrain_ratio == 0.0 and s.dt_train_mean is None


def test_timing_partitions():
    rng = np.random.default_rng(3)
    outs = []
    for i in range(500):
        kind = rng.integers(0, 3)
        outs.append(step(float(rng.exponential(0.01)), retrained=kind == 1, warmup=kind == 2))
    s = timing_stats(outs)
    train = [o.elapsed for o in outs if o.retrained or o.warmup_trained]
    notrain = [o.elapsed for o in outs if not (o.retrained or o.warmup_trained)]
    # two-pass oracle via statistics, one-pass via running sums
    assert s.dt_train_mean == pytest.approx(statistics.fmean(train), rel=1e-9)
    assert s.dt_train_std == pytest.approx(statistics.pstdev(train), rel=1e-9)
    n, s1, s2 = len(notrain), sum(notrain), sum(x * x for x in notrain)
    assert s.dt_notrain_mean == pytest.approx(s1 / n, rel=1e-9)
    assert s.dt_notrain_std == pytest.approx(math.sqrt(s2 / n - (s1 / n) ** 2), rel=1e-6)
    assert s.retrain_ratio == sum(o.retrained for o in outs) / 500


def test_timing_ratio_magnitude():
    outs = [step(0.01, retrained=i < 103) for i in range(9357)]
    assert round(timing_stats(outs).retrain_ratio, 3) == 0.011


def test_timing_empty():
    with pytest.raises(EmptyStreamError):
        timing_stats([])
