"""Shewhart-style stability charts built on d_4.

A chart compares the histogram of every group (a calendar period for
temporal charts, a device location for spatial ones) against a reference
group's histogram. All histograms of one chart share one support and
grid, so the plotted distances are comparable; the default control limit
is the median of the plotted distances, reference point included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .device import (
    Location,
    MetricSeries,
    location_label,
    location_sort_key,
    partition,
)
from .histogram import DEFAULT_BINS, SampleSeries, Support, build_histogram, pooled_support
from .mbd import DEFAULT_ORDER, mbd

TEMPORAL = "temporal"
SPATIAL = "spatial"
DEFAULT_PAD = 0.05
MIN_GROUP_SIZE = 2


@dataclass(frozen=True)
class ControlChart:
    metric_name: str
    mode: str
    reference_label: str
    points: tuple[tuple[str, float], ...]
    threshold: float
    bin_count: int
    support: Support
    order: int = DEFAULT_ORDER
    location: str | None = None
    low_sample: tuple[str, ...] = ()
    group_sizes: tuple[int, ...] = ()
    threshold_source: str = "median"

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.points]

    @property
    def distances(self) -> np.ndarray:
        return np.array([d for _, d in self.points])

    def distance(self, label: str) -> float:
        return dict(self.points)[label]

    def with_threshold(self, threshold: float) -> "ControlChart":
        """Copy of the chart with a user-chosen control limit."""
        _check_threshold(threshold)
        return replace(self, threshold=float(threshold), threshold_source="user")


@dataclass(frozen=True)
class StabilityVerdict:
    label: str
    stable: bool
    d4: float
    threshold: float


def _check_threshold(threshold):
    if math.isnan(threshold) or threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold!r}")


def _support_for(metric_probability: bool, groups, pad_fraction):
    if metric_probability:
        return Support.probability()
    pad = DEFAULT_PAD if pad_fraction is None else pad_fraction
    return pooled_support(list(groups), pad)


def _chart(metric, mode, ref_label, groups: dict[str, SampleSeries], support, bins,
           order, location=None) -> ControlChart:
    hists = {k: build_histogram(s, support, bins) for k, s in groups.items()}
    ref = hists[ref_label]
    points = tuple((k, mbd(h, ref, order).d) for k, h in hists.items())
    return ControlChart(
        metric_name=metric,
        mode=mode,
        reference_label=ref_label,
        points=points,
        threshold=float(np.median([d for _, d in points])),
        bin_count=bins,
        support=support,
        order=order,
        location=location,
        low_sample=tuple(k for k, s in groups.items() if len(s) < MIN_GROUP_SIZE),
        group_sizes=tuple(len(s) for s in groups.values()),
    )


def temporal_chart(
    series: MetricSeries,
    reference_month: str,
    bins: int = DEFAULT_BINS,
    order: int = DEFAULT_ORDER,
    granularity: str = "monthly",
    pad_fraction: float | None = None,
) -> ControlChart:
    """Distance of each period's histogram from the reference period's.

    ``reference_month`` is a group label in the format of ``granularity``
    (``"YYYY-MM"`` when monthly). Probability-valued metrics use the support
    [0, 1]; others pool the whole series and pad by ``pad_fraction``
    (default 0.05) of its range.
    """
    groups = partition(series, granularity)
    ref = groups.get(reference_month)
    if ref is None or len(ref) < MIN_GROUP_SIZE:
        n = 0 if ref is None else len(ref)
        raise ValueError(
            f"reference month insufficient: {reference_month!r} has {n} point(s), "
            f"need at least {MIN_GROUP_SIZE}"
        )
    support = _support_for(series.is_probability, [series.values], pad_fraction)
    return _chart(series.metric_name, TEMPORAL, reference_month, groups, support, bins,
                  order, location=location_label(series.location))


def spatial_chart(
    series_by_location: Mapping[Location, MetricSeries],
    reference_location: Location,
    bins: int = DEFAULT_BINS,
    order: int = DEFAULT_ORDER,
    pad_fraction: float | None = None,
) -> ControlChart:
    """Distance of each location's full-history histogram from the reference location's."""
    if reference_location not in series_by_location:
        raise KeyError(f"unknown reference location {location_label(reference_location)!r}")
    metrics = {s.metric_name for s in series_by_location.values()}
    if len(metrics) != 1:
        raise ValueError(f"spatial chart needs a single metric, got {sorted(metrics)}")
    (metric,) = metrics
    ordered = sorted(series_by_location, key=location_sort_key)
    groups = {location_label(loc): series_by_location[loc].to_samples() for loc in ordered}
    ref_label = location_label(reference_location)
    if len(groups[ref_label]) < MIN_GROUP_SIZE:
        raise ValueError(f"reference location {ref_label!r} has fewer than {MIN_GROUP_SIZE} points")
    empty = [k for k, s in groups.items() if len(s) == 0]
    if empty:
        raise ValueError(f"no samples for location(s) {empty}")
    support = _support_for(series_by_location[reference_location].is_probability,
                           groups.values(), pad_fraction)
    return _chart(metric, SPATIAL, ref_label, groups, support, bins, order)


def assess(chart: ControlChart, threshold_override: float | None = None) -> list[StabilityVerdict]:
    """One verdict per chart point: stable iff d4 <= the control limit."""
    if not chart.points:
        raise ValueError("empty chart")
    if threshold_override is not None:
        _check_threshold(threshold_override)
        limit = float(threshold_override)
    else:
        limit = chart.threshold
    return [StabilityVerdict(label, d <= limit, d, limit) for label, d in chart.points]
