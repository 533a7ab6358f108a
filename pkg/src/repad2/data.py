"""Air Quality CSV ingestion, sentinel labeling and synthetic test streams."""

from __future__ import annotations

import csv
import enum
import io
import os
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ColumnNotFoundError, IntegrityError, InvalidArgumentError, ParseError
from .evaluation import AnomalyLabel

SENTINEL = -200.0
AIR_QUALITY_ROWS = 9357
BENCHMARK_COLUMNS = ("PT08.S1(CO)", "C6H6(GT)", "PT08.S2(NMHC)")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    name: str
    values: np.ndarray
    interval: timedelta = timedelta(hours=1)
    origin: datetime | None = None

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class LabeledSeries:
    series: TimeSeries
    labels: tuple[AnomalyLabel, ...] = field(default_factory=tuple)


def _parse_number(cell: str, row: int) -> float:
    try:
        return float(cell.strip().replace(",", "."))
    except ValueError:
        raise ParseError(f"cannot parse {cell!r} as a number", row=row) from None


def parse_air_quality(
    source: str | os.PathLike | TextIO,
    column: str,
    expected_rows: int | None = AIR_QUALITY_ROWS,
) -> TimeSeries:
    """Read one column of the UCI ``AirQualityUCI.csv`` file.

    The file is ``;``-delimited with decimal commas.  Rows whose ``Date``
    field is empty (the file's trailing filler) are skipped.  ``row`` numbers
    in errors are 1-based physical lines, header included.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8-sig") as fh:
            return parse_air_quality(fh, column, expected_rows)

    reader = csv.reader(source, delimiter=";")
    try:
        header = [h.strip().lstrip("\ufeff") for h in next(reader)]
    except StopIteration:
        raise ParseError("empty input", row=1) from None
    if column not in header:
        raise ColumnNotFoundError(f"column {column!r} not in header {[h for h in header if h]}")
    col = header.index(column)
    date_col = header.index("Date") if "Date" in header else 0
    time_col = header.index("Time") if "Time" in header else None

    values: list[float] = []
    origin = None
    for row_no, row in enumerate(reader, start=2):
        if not row or date_col >= len(row) or not row[date_col].strip():
            continue
        if col >= len(row):
            raise ParseError(f"missing column {column!r}", row=row_no)
        values.append(_parse_number(row[col], row_no))
        if origin is None:
            origin = _parse_origin(row[date_col], row[time_col] if time_col is not None else "")

    if expected_rows is not None and len(values) != expected_rows:
        raise IntegrityError(f"expected {expected_rows} data rows, found {len(values)}")
    return TimeSeries(column, np.asarray(values, dtype=np.float64), timedelta(hours=1), origin)


def _parse_origin(date: str, clock: str) -> datetime | None:
    for fmt in ("%d/%m/%Y %H.%M.%S", "%d/%m/%Y %H:%M:%S", "%d/%m/%Y "):
        try:
            return datetime.strptime(f"{date.strip()} {clock.strip()}", fmt)
        except ValueError:
            continue
    return None


def sentinel_runs(values: Sequence[float], sentinel: float = SENTINEL) -> list[tuple[int, int]]:
    """Maximal inclusive ``(start, end)`` runs of ``values == sentinel``."""
    flags = np.asarray(values, dtype=np.float64) == sentinel
    if not flags.any():
        return []
    edges = np.diff(np.concatenate(([0], flags.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def label_sentinels(series: TimeSeries, sentinel: float = SENTINEL) -> LabeledSeries:
    labels = tuple(
        AnomalyLabel.point(s) if s == e else AnomalyLabel.collective(s, e)
        for s, e in sentinel_runs(series.values, sentinel)
    )
    return LabeledSeries(series, labels)


class Pattern(str, enum.Enum):
    SINE = "sine"
    CONSTANT = "constant"
    RANDOM_WALK = "random_walk"


def synth_stream(
    length: int,
    pattern: Pattern | str,
    injected: Iterable[AnomalyLabel] = (),
    seed: int = 0,
    *,
    level: float = 1000.0,
    amplitude: float = 200.0,
    period: float = 24.0,
    noise: float = 0.0,
    sentinel: float = SENTINEL,
) -> LabeledSeries:
    """Deterministic test stream with ``sentinel`` written over each injected label.

    ``noise`` is the Gaussian noise std for SINE and the step std for
    RANDOM_WALK (default 1.0 there); CONSTANT ignores it.  Labels must be
    separated by at least one normal point, otherwise they would merge into
    one run.
    """
    if length < 1:
        raise InvalidArgumentError(f"length must be positive, got {length}")
    pattern = Pattern(pattern)
    labels = tuple(sorted(injected))
    for prev, cur in zip(labels, labels[1:]):
        if cur.start <= prev.end + 1:
            raise InvalidArgumentError(f"labels overlap or touch: {prev} and {cur}")
    for lab in labels:
        if lab.start < 0 or lab.end >= length:
            raise InvalidArgumentError(f"label {lab} outside [0, {length})")

    rng = np.random.default_rng(seed)
    t = np.arange(length, dtype=np.float64)
    if pattern is Pattern.CONSTANT:
        values = np.full(length, level)
    elif pattern is Pattern.SINE:
        values = level + amplitude * np.sin(2 * np.pi * t / period)
        if noise:
            values = values + rng.normal(0.0, noise, length)
    else:
        steps = rng.normal(0.0, noise or 1.0, length)
        steps[0] = 0.0
        values = level + np.cumsum(steps)
    for lab in labels:
        values[lab.start:lab.end + 1] = sentinel
    name = f"synthetic-{pattern.value}"
    return LabeledSeries(TimeSeries(name, values, timedelta(hours=1), None), labels)


def parse_synthetic_spec(spec: str) -> LabeledSeries:
    """Build a stream from ``pattern,key=value,...``.

    Keys: ``length`` (default 2000), ``seed``, ``level``, ``amplitude``,
    ``period``, ``noise``, ``points=i/j/...``, ``collectives=a-b/c-d/...``.
    Example: ``sine,length=3000,noise=10,points=500,collectives=1200-1210``.
    """
    head, *rest = [p.strip() for p in spec.split(",") if p.strip()]
    opts: dict[str, str] = {}
    for item in rest:
        key, sep, val = item.partition("=")
        if not sep:
            raise InvalidArgumentError(f"bad synthetic option {item!r}")
        opts[key.strip()] = val.strip()
    labels = [AnomalyLabel.point(int(p)) for p in opts.pop("points", "").split("/") if p]
    for run in (r for r in opts.pop("collectives", "").split("/") if r):
        a, _, b = run.partition("-")
        labels.append(AnomalyLabel.collective(int(a), int(b)))
    kwargs = {k: float(opts.pop(k)) for k in ("level", "amplitude", "period", "noise") if k in opts}
    length = int(opts.pop("length", 2000))
    seed = int(opts.pop("seed", 0))
    if opts:
        raise InvalidArgumentError(f"unknown synthetic options {sorted(opts)}")
    return synth_stream(length, head.lower(), labels, seed, **kwargs)


def write_air_quality_csv(path: str | os.PathLike | io.TextIOBase, columns: dict[str, Sequence[float]]) -> None:
    """Write columns in the UCI file's dialect (used to build test fixtures)."""
    names = list(columns)
    n = len(next(iter(columns.values())))
    base = datetime(2004, 3, 10, 18)

    def fmt(v: float) -> str:
        return (f"{v:g}" if v != int(v) else str(int(v))).replace(".", ",")

    def emit(fh):
        fh.write(";".join(["Date", "Time", *names]) + ";;\n")
        for i in range(n):
            ts = base + timedelta(hours=i)
            cells = [ts.strftime("%d/%m/%Y"), ts.strftime("%H.%M.%S"), *(fmt(columns[c][i]) for c in names)]
            fh.write(";".join(cells) + ";;\n")
        fh.write(";" * (len(names) + 3) + "\n")

    if isinstance(path, (str, os.PathLike)):
        with open(path, "w", newline="") as fh:
            emit(fh)
    else:
        emit(path)
