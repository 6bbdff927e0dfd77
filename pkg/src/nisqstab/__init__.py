"""Moment-based histogram distance and stability charts for NISQ calibration data."""

from .addressability import (
    CorrelatedNoiseModel,
    OutcomeDistribution,
    ShotCounts,
    addressability,
    closed_form_fa,
    estimate_fa,
    mutual_information,
    simulate_counts,
)
from .histogram import Histogram, SampleSeries, Support, align, build_histogram, pooled_support
from .mbd import DistanceResult, MomentTerms, mbd, mbd_analytic, s_m, tvd
from .monitor import ControlChart, StabilityVerdict, assess, spatial_chart, temporal_chart

__version__ = "0.1.0"
