"""Benchmark runner: ingest a series, stream it through one detector, score, write reports."""

from __future__ import annotations

import csv
import json
import os
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .cells import CellKind, TrainingConfig
from .data import AIR_QUALITY_ROWS, LabeledSeries, label_sentinels, parse_air_quality, parse_synthetic_spec
from .detector import Detector, DetectorConfig, StepOutcome, Verdict
from .errors import ConfigurationError, EmptyStreamError
from .evaluation import (
    AnomalyLabel,
    ConfusionCounts,
    ScoringConfig,
    TimingStats,
    match_detections,
    prf1,
    timing_stats,
    undetected_labels,
)

REPORT_SCHEMA = "repad2.report/1"
TRACE_COLUMNS = (
    "t", "value", "predicted", "aare", "mu_aare", "sigma_aare", "thd",
    "verdict", "retrained", "warmup_trained", "data_quality_flag", "elapsed",
)
PLOT_AARE_COLUMNS = ("t", "aare", "thd")
PLOT_VERDICT_COLUMNS = ("t", "value", "verdict")

# thresholds enforced by --assert
MIN_RECALL = 0.90
MIN_F1 = 0.85
MAX_RETRAIN_RATIO = 0.05


@dataclass
class RunConfig:
    data: str | None = None
    column: str = "PT08.S1(CO)"
    synthetic: str | None = None
    cell: CellKind = CellKind.LSTM
    epochs: int = 50
    lr: float = 0.005
    hidden: int = 10
    seed: int = 140
    lookback: int = 3
    window_w: int | None = None  # None: length of the series
    sigma_multiplier: float = 3.0
    k: int = 3
    out: str | None = "results"
    format: str = "json"
    expected_rows: int | None = AIR_QUALITY_ROWS

    def __post_init__(self):
        self.cell = CellKind(self.cell)
        if (self.data is None) == (self.synthetic is None):
            raise ConfigurationError("exactly one of data and synthetic must be given")
        if self.format not in ("json", "csv"):
            raise ConfigurationError(f"format must be json or csv, got {self.format!r}")

    def detector_config(self, series_length: int) -> DetectorConfig:
        return DetectorConfig(
            window_w=self.window_w if self.window_w is not None else series_length,
            look_back=self.lookback,
            sigma_multiplier=self.sigma_multiplier,
            cell_kind=self.cell,
            training=TrainingConfig(epochs=self.epochs, learning_rate=self.lr, seed=self.seed, hidden_dim=self.hidden),
        )


@dataclass
class EvaluationReport:
    metadata: dict[str, Any]
    labels: list[AnomalyLabel]
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    timing: TimingStats
    missed_labels: list[AnomalyLabel]
    trace: list[StepOutcome] = field(repr=False)

    @property
    def detections(self) -> list[int]:
        return [o.t for o in self.trace if o.verdict is Verdict.ANOMALOUS]

    def summary(self) -> dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "metadata": self.metadata,
            "labels": [_label_dict(lab) for lab in self.labels],
            "counts": asdict(self.counts),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "timing": asdict(self.timing),
            "missed_labels": [_label_dict(lab) for lab in self.missed_labels],
        }

    def to_dict(self) -> dict[str, Any]:
        return {**self.summary(), "trace": [trace_record(o) for o in self.trace]}


def _label_dict(lab: AnomalyLabel) -> dict[str, Any]:
    return {"kind": lab.kind.value, "start": lab.start, "end": lab.end}


def label_from_dict(d: dict[str, Any]) -> AnomalyLabel:
    return AnomalyLabel(int(d["start"]), int(d["end"]), d["kind"])


def trace_record(o: StepOutcome) -> dict[str, Any]:
    snap = o.threshold
    return {
        "t": o.t,
        "value": o.value,
        "predicted": o.predicted,
        "aare": o.aare,
        "mu_aare": snap.mu_aare if snap else None,
        "sigma_aare": snap.sigma_aare if snap else None,
        "thd": snap.thd if snap else None,
        "verdict": o.verdict.value,
        "retrained": o.retrained,
        "warmup_trained": o.warmup_trained,
        "data_quality_flag": o.data_quality_flag,
        "elapsed": o.elapsed,
    }


def load_series(cfg: RunConfig) -> LabeledSeries:
    if cfg.synthetic is not None:
        return parse_synthetic_spec(cfg.synthetic)
    return label_sentinels(parse_air_quality(cfg.data, cfg.column, cfg.expected_rows))


def score(
    trace: Sequence[StepOutcome], labels: Sequence[AnomalyLabel], k: int
) -> tuple[ConfusionCounts, tuple[float, float, float], TimingStats, list[AnomalyLabel]]:
    detections = [o.t for o in trace if o.verdict is Verdict.ANOMALOUS]
    cfg = ScoringConfig(k)
    counts = match_detections(labels, detections, cfg)
    return counts, prf1(counts), timing_stats(trace), undetected_labels(labels, detections, cfg)


def run_benchmark(cfg: RunConfig, write: bool = True) -> EvaluationReport:
    """Replay one series point by point through a fresh detector and score it."""
    started = datetime.now(timezone.utc).isoformat()
    labeled = load_series(cfg)
    values = labeled.series.values
    if len(values) == 0:
        raise EmptyStreamError("series has no points")
    det_cfg = cfg.detector_config(len(values))
    detector = Detector(det_cfg)
    trace = [detector.step(float(v)) for v in values]

    counts, (p, r, f1), timing, missed = score(trace, labeled.labels, cfg.k)
    metadata = {
        "code_version": __version__,
        "started_at": started,
        "python": platform.python_version(),
        "series": {"name": labeled.series.name, "length": len(values),
                   "origin": labeled.series.origin.isoformat() if labeled.series.origin else None},
        "config": {
            "data": cfg.data, "column": cfg.column, "synthetic": cfg.synthetic,
            "cell": det_cfg.cell_kind.value, "epochs": cfg.epochs, "lr": cfg.lr, "hidden": cfg.hidden,
            "seed": cfg.seed, "lookback": det_cfg.look_back, "predict_forward": det_cfg.predict_forward,
            "window_w": det_cfg.window_w, "window_w_auto": cfg.window_w is None,
            "sigma_multiplier": det_cfg.sigma_multiplier, "k": cfg.k, "activation": "tanh",
            "gradient_clip": det_cfg.training.clip, "canonical": det_cfg.canonical,
        },
        "retrain_count": detector.retrain_count,
        "warmup_train_count": detector.warmup_train_count,
    }
    report = EvaluationReport(metadata, list(labeled.labels), counts, p, r, f1, timing, missed, trace)
    if write and cfg.out is not None:
        write_report(report, cfg.out, cfg.format)
        emit_plot_series(report, cfg.out)
    return report


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, columns: Iterable[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_report(report: EvaluationReport, out_dir: str | os.PathLike, fmt: str = "json") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / "report.json"
        path.write_text(json.dumps(report.to_dict(), indent=1))
        return [path]
    summary = out / "summary.json"
    summary.write_text(json.dumps(report.summary(), indent=1))
    trace = out / "trace.csv"
    _write_csv(trace, TRACE_COLUMNS, ([trace_record(o)[c] for c in TRACE_COLUMNS] for o in report.trace))
    return [summary, trace]


def emit_plot_series(report: EvaluationReport, path: str | os.PathLike) -> tuple[Path, Path]:
    """Write ``aare_threshold.csv`` (t, aare, thd) and ``verdicts.csv`` (t, value, verdict)."""
    if not report.trace:
        raise EmptyStreamError("report has an empty trace")
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    a = out / "aare_threshold.csv"
    _write_csv(a, PLOT_AARE_COLUMNS, (
        (o.t, o.aare, o.threshold.thd if o.threshold else None) for o in report.trace if o.aare is not None
    ))
    v = out / "verdicts.csv"
    _write_csv(v, PLOT_VERDICT_COLUMNS, ((o.t, o.value, o.verdict.value) for o in report.trace))
    return a, v


def read_verdicts(path: str | os.PathLike) -> list[tuple[int, float, Verdict]]:
    with open(path, newline="") as fh:
        return [(int(r["t"]), float(r["value"]), Verdict(r["verdict"])) for r in csv.DictReader(fh)]


def acceptance_checks(report: EvaluationReport) -> dict[str, bool]:
    t = report.timing
    return {
        f"recall >= {MIN_RECALL}": report.recall >= MIN_RECALL,
        f"f1 >= {MIN_F1}": report.f1 >= MIN_F1,
        f"retrain_ratio <= {MAX_RETRAIN_RATIO}": t.retrain_ratio <= MAX_RETRAIN_RATIO,
        "dt_train_mean > dt_notrain_mean": (
            t.dt_train_mean is not None and t.dt_notrain_mean is not None and t.dt_train_mean > t.dt_notrain_mean
        ),
    }
