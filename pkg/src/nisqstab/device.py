"""Device metrics derived from calibration snapshots.

Locations are qubit indices (``int``) or ordered qubit pairs
(``tuple[int, int]``). Times in records are microseconds for T1/T2 and
nanoseconds for gate durations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping, Sequence, Union

import numpy as np

from .histogram import SampleSeries

log = logging.getLogger(__name__)

Qubit = int
Pair = tuple[int, int]
Location = Union[Qubit, Pair]

INIT_FIDELITY = "init_fidelity"
GATE_FIDELITY = "gate_fidelity"
DUTY_CYCLE = "duty_cycle"
METRICS = (INIT_FIDELITY, GATE_FIDELITY, DUTY_CYCLE)
PROBABILITY_METRICS = frozenset({INIT_FIDELITY, GATE_FIDELITY})
GRANULARITIES = ("monthly", "weekly", "daily")


def location_label(loc: Location) -> str:
    if isinstance(loc, tuple):
        return f"{loc[0]}-{loc[1]}"
    return str(loc)


def parse_location(text: str) -> Location:
    """Inverse of :func:`location_label`: ``"3"`` -> 3, ``"0-1"`` -> (0, 1)."""
    text = str(text).strip()
    if "-" in text:
        a, b = text.split("-", 1)
        return (int(a), int(b))
    return int(text)


def location_sort_key(loc: Location):
    return (1, loc) if isinstance(loc, tuple) else (0, (loc,))


def _check_prob(name, values):
    for k, v in values.items():
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{name}[{k}] = {v} is not a probability")


def _check_time(name, values):
    for k, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name}[{k}] = {v} must be positive and finite")


@dataclass(frozen=True)
class CalibrationRecord:
    """One timestamped calibration snapshot of a device."""

    timestamp: datetime
    readout_error: Mapping[Qubit, float] = field(default_factory=dict)
    t1: Mapping[Qubit, float] = field(default_factory=dict)
    t2: Mapping[Qubit, float] = field(default_factory=dict)
    gate_error: Mapping[Pair, float] = field(default_factory=dict)
    gate_duration: Mapping[Pair, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))
        _check_prob("readout_error", self.readout_error)
        _check_prob("gate_error", self.gate_error)
        _check_time("t1", self.t1)
        _check_time("t2", self.t2)
        _check_time("gate_duration", self.gate_duration)

    @property
    def qubits(self) -> set[Qubit]:
        return set(self.readout_error) | set(self.t1) | set(self.t2)

    @property
    def pairs(self) -> set[Pair]:
        return set(self.gate_error) | set(self.gate_duration)


@dataclass(frozen=True)
class MetricSeries:
    """Time-ordered values of one metric at one location.

    ``skipped`` counts input records that lacked the fields this metric
    needs.
    """

    metric_name: str
    location: Location
    points: tuple[tuple[datetime, float], ...]
    skipped: int = 0

    def __post_init__(self):
        pts = tuple((t, float(v)) for t, v in self.points)
        object.__setattr__(self, "points", pts)
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if not t1 > t0:
                raise ValueError(f"timestamps must be strictly increasing ({t0} then {t1})")
        for t, v in pts:
            if not math.isfinite(v):
                raise ValueError(f"non-finite {self.metric_name} at {t}")
            if self.metric_name in PROBABILITY_METRICS and not 0.0 <= v <= 1.0:
                raise ValueError(f"{self.metric_name} value {v} at {t} outside [0, 1]")

    @property
    def timestamps(self) -> list[datetime]:
        return [t for t, _ in self.points]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points], dtype=float)

    @property
    def is_probability(self) -> bool:
        return self.metric_name in PROBABILITY_METRICS

    def __len__(self) -> int:
        return len(self.points)

    def to_samples(self) -> SampleSeries:
        return SampleSeries(self.values, tuple(self.timestamps))


def _series(metric, loc, records, value_of) -> MetricSeries:
    points, skipped = [], 0
    for rec in sorted(records, key=lambda r: r.timestamp):
        v = value_of(rec)
        if v is None:
            skipped += 1
        else:
            points.append((rec.timestamp, v))
    if skipped:
        log.warning("%s at %s: skipped %d record(s) with missing fields",
                    metric, location_label(loc), skipped)
    return MetricSeries(metric, loc, tuple(points), skipped)


def init_fidelity(records: Sequence[CalibrationRecord], qubit: Qubit) -> MetricSeries:
    """F_I = 1 - readout error, per record."""
    if not any(qubit in r.readout_error for r in records):
        raise KeyError(f"unknown qubit {qubit!r}")
    return _series(INIT_FIDELITY, qubit, records,
                   lambda r: 1.0 - r.readout_error[qubit] if qubit in r.readout_error else None)


def gate_fidelity(records: Sequence[CalibrationRecord], pair: Pair) -> MetricSeries:
    """F_G = 1 - error per Clifford of the two-qubit gate on ``pair``."""
    pair = tuple(pair)
    if not any(pair in r.gate_error for r in records):
        raise KeyError(f"unknown pair {location_label(pair)!r}")
    return _series(GATE_FIDELITY, pair, records,
                   lambda r: 1.0 - r.gate_error[pair] if pair in r.gate_error else None)


def duty_cycle(
    records: Sequence[CalibrationRecord],
    pair: Pair,
    fixed_gate_duration: float | None = None,
) -> MetricSeries:
    """tau = T_G / T_2 for the gate on ``pair``.

    T_2 is taken from the pair's first qubit. T_G is ``fixed_gate_duration``
    (ns) when given, otherwise each record's own duration for ``pair``.
    """
    pair = tuple(pair)
    q = pair[0]
    if not any(q in r.t2 for r in records):
        raise KeyError(f"no T2 recorded for qubit {q!r}")
    if fixed_gate_duration is None:
        if not any(pair in r.gate_duration for r in records):
            raise ValueError(f"no gate duration for pair {location_label(pair)}")
    elif not (math.isfinite(fixed_gate_duration) and fixed_gate_duration > 0):
        raise ValueError("fixed_gate_duration must be positive")

    def value(r: CalibrationRecord):
        tg = fixed_gate_duration if fixed_gate_duration is not None else r.gate_duration.get(pair)
        if tg is None or q not in r.t2:
            return None
        return tg / (r.t2[q] * 1e3)

    return _series(DUTY_CYCLE, pair, records, value)


def mean_gate_duration(records: Sequence[CalibrationRecord], pair: Pair) -> float:
    vals = [r.gate_duration[pair] for r in records if pair in r.gate_duration]
    if not vals:
        raise ValueError(f"no gate duration for pair {location_label(pair)}")
    return float(np.mean(vals))


def default_pair_for_qubit(pairs, qubit: Qubit) -> Pair:
    """Lexicographically smallest pair that starts with ``qubit``."""
    candidates = sorted(p for p in pairs if p[0] == qubit)
    if not candidates:
        raise KeyError(f"no pair starting with qubit {qubit!r}")
    return candidates[0]


@dataclass(frozen=True)
class RollingStats:
    mean: tuple[tuple[datetime, float], ...]
    std: tuple[tuple[datetime, float], ...]


def rolling_stats(series: MetricSeries, window_days: int = 30) -> RollingStats:
    """Trailing calendar-window mean and sample std at every point.

    The window for a point at time t holds every observation in
    [t - window_days, t]. Points whose window has fewer than two
    observations get no std entry.
    """
    if window_days < 1:
        raise ValueError("window_days must be at least 1")
    if not series.points:
        return RollingStats((), ())
    secs = np.array([t.timestamp() for t in series.timestamps])
    vals = series.values
    starts = np.searchsorted(secs, secs - window_days * 86400.0, side="left")
    mean, std = [], []
    for i, (t, _) in enumerate(series.points):
        # shift by the first value so a constant window is exactly 0
        w = vals[starts[i]: i + 1]
        d = w - w[0]
        mean.append((t, float(w[0] + d.mean())))
        if w.size >= 2:
            std.append((t, float(d.std(ddof=1))))
    return RollingStats(tuple(mean), tuple(std))


def group_label(t: datetime, granularity: str = "monthly") -> str:
    t = t.astimezone(timezone.utc)
    if granularity == "monthly":
        return f"{t.year:04d}-{t.month:02d}"
    if granularity == "daily":
        return f"{t.year:04d}-{t.month:02d}-{t.day:02d}"
    if granularity == "weekly":
        year, week, _ = t.isocalendar()
        return f"{year:04d}-W{week:02d}"
    raise ValueError(f"unknown granularity {granularity!r}")


def dedup_daily(series: MetricSeries) -> MetricSeries:
    """Keep only the last observation of each UTC day."""
    last: dict[str, tuple[datetime, float]] = {}
    for t, v in series.points:
        last[group_label(t, "daily")] = (t, v)
    pts = tuple(last[k] for k in sorted(last))
    return MetricSeries(series.metric_name, series.location, pts, series.skipped)


def partition(series: MetricSeries, granularity: str = "monthly") -> dict[str, SampleSeries]:
    """Group a series by calendar period; labels sort chronologically."""
    groups: dict[str, list[tuple[datetime, float]]] = {}
    for t, v in series.points:
        groups.setdefault(group_label(t, granularity), []).append((t, v))
    return {
        k: SampleSeries([v for _, v in groups[k]], tuple(t for t, _ in groups[k]))
        for k in sorted(groups)
    }


def monthly_partition(series: MetricSeries) -> dict[str, SampleSeries]:
    """Group by UTC calendar month, labelled ``"YYYY-MM"``."""
    return partition(series, "monthly")
