"""Real-time lightweight anomaly detection for univariate streams with pluggable recurrent cells."""

__version__ = "0.1.0"

from .cells import (  # noqa: E402
    CellKind,
    CellParameters,
    TrainingConfig,
    WindowNormalizer,
    forward,
    gradients,
    init_parameters,
    predict_next,
    train_window,
)
from .detector import Detector, DetectorConfig, StepOutcome, ThresholdSnapshot, Verdict, aare, threshold  # noqa: E402
from .evaluation import AnomalyLabel, ConfusionCounts, ScoringConfig, match_detections, prf1, timing_stats  # noqa: E402

__all__ = [
    "AnomalyLabel", "CellKind", "CellParameters", "ConfusionCounts", "Detector", "DetectorConfig",
    "ScoringConfig", "StepOutcome", "ThresholdSnapshot", "TrainingConfig", "Verdict", "WindowNormalizer",
    "aare", "forward", "gradients", "init_parameters", "match_detections", "predict_next", "prf1",
    "threshold", "timing_stats", "train_window",
]
