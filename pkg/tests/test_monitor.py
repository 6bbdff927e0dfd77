import math
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nisqstab import device as dm
from nisqstab.device import CalibrationRecord, MetricSeries
from nisqstab.histogram import Support, build_histogram
from nisqstab.mbd import mbd
from nisqstab.monitor import assess, spatial_chart, temporal_chart
from nisqstab.rng import make_rng

UTC = timezone.utc
START = datetime(2019, 3, 1, tzinfo=UTC)


def daily(values, metric=dm.DUTY_CYCLE, location=(0, 1)):
    pts = tuple((START + timedelta(days=i), float(v)) for i, v in enumerate(values))
    return MetricSeries(metric, location, pts)


def month_index(n):
    return np.array([(START + timedelta(days=i)).month for i in range(n)])


@pytest.fixture(scope="module")
def drifted():
    """13 months of a duty-cycle-like series; September shifted by 5 std."""
    rng = make_rng(4, "monitor/drift")
    n = 397
    v = rng.normal(0.005, 0.0003, n)
    months = month_index(n)
    v[months == 9] += 5 * 0.0003
    return daily(v)


class TestTemporal:
    def test_reference_point_is_zero(self, drifted):
        chart = temporal_chart(drifted, "2019-05")
        assert chart.distance("2019-05") == 0.0
        assert len(chart.points) == 13

    def test_drift_month_is_the_maximum(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        d = dict(chart.points)
        assert max(d, key=d.get) == "2019-09"
        assert d["2019-09"] > chart.threshold
        verdicts = {v.label: v.stable for v in assess(chart)}
        assert not verdicts["2019-09"]

    def test_non_probability_support_is_padded(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        lo, hi = drifted.values.min(), drifted.values.max()
        pad = 0.05 * (hi - lo)
        assert chart.support.a == pytest.approx(lo - pad)
        assert chart.support.b == pytest.approx(hi + pad)

    def test_probability_metric_uses_unit_support(self):
        s = daily(np.full(60, 0.97), metric=dm.INIT_FIDELITY, location=0)
        chart = temporal_chart(s, "2019-03")
        assert (chart.support.a, chart.support.b) == (0.0, 1.0)
        assert all(d == 0.0 for _, d in chart.points)

    def test_threshold_is_median_with_reference(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        assert chart.threshold == float(np.median(chart.distances))
        assert chart.threshold_source == "median"

    def test_reference_month_insufficient(self, drifted):
        with pytest.raises(ValueError, match="reference month insufficient"):
            temporal_chart(drifted, "2018-01")
        pts = ((START, 0.9), (START + timedelta(days=40), 0.9), (START + timedelta(days=41), 0.9))
        with pytest.raises(ValueError, match="reference month insufficient"):
            temporal_chart(MetricSeries(dm.INIT_FIDELITY, 0, pts), "2019-03")

    def test_low_sample_months_flagged(self):
        pts = ((START, 0.9), (START + timedelta(days=1), 0.91), (START + timedelta(days=40), 0.9))
        chart = temporal_chart(MetricSeries(dm.INIT_FIDELITY, 0, pts), "2019-03")
        assert chart.low_sample == ("2019-04",)

    def test_invariant_under_record_order(self):
        rng = make_rng(9, "monitor/shuffle")
        recs = [CalibrationRecord(START + timedelta(days=i), readout_error={0: float(e)})
                for i, e in enumerate(rng.uniform(0.01, 0.2, 120))]
        a = temporal_chart(dm.init_fidelity(recs, 0), "2019-03")
        shuffled = [recs[i] for i in rng.permutation(len(recs))]
        b = temporal_chart(dm.init_fidelity(shuffled, 0), "2019-03")
        assert a == b

    def test_weekly_granularity(self, drifted):
        chart = temporal_chart(drifted, "2019-W10", granularity="weekly")
        assert chart.distance("2019-W10") == 0.0
        assert len(chart.points) > 50


def location_series(spreads, seed=1, n=300):
    out = {}
    for q, spread in enumerate(spreads):
        rng = make_rng(seed, f"monitor/loc/{q}")
        e = np.clip(rng.normal(0.04, 0.01 * spread, n), 0, 1)
        out[q] = daily(1 - e, metric=dm.INIT_FIDELITY, location=q)
    return out


class TestSpatial:
    def test_identical_locations_all_zero(self):
        base = daily(np.linspace(0.9, 0.99, 50), metric=dm.INIT_FIDELITY, location=0)
        same = {q: MetricSeries(base.metric_name, q, base.points) for q in range(5)}
        chart = spatial_chart(same, 0)
        assert all(d == 0.0 for _, d in chart.points)
        assert all(v.stable for v in assess(chart))

    def test_widest_location_is_the_maximum(self):
        series = location_series([1, 1, 1, 2, 1])
        chart = spatial_chart(series, 0)
        d = dict(chart.points)
        assert max(d, key=d.get) == "3"
        # cross-check against a direct computation
        sup = Support.probability()
        direct = mbd(build_histogram(series[3].values, sup, 20),
                     build_histogram(series[0].values, sup, 20), 4).d
        assert d["3"] == pytest.approx(direct, rel=1e-12)

    def test_single_location(self):
        chart = spatial_chart(location_series([1]), 0)
        assert chart.points == (("0", 0.0),)
        assert [v.stable for v in assess(chart)] == [True]

    def test_labels_sorted(self):
        chart = spatial_chart(location_series([1, 1, 1]), 2)
        assert chart.labels == ["0", "1", "2"]
        assert chart.distance("2") == 0.0

    def test_unknown_reference(self):
        with pytest.raises(KeyError):
            spatial_chart(location_series([1, 1]), 7)

    def test_mixed_metrics_rejected(self):
        a = daily(np.full(5, 0.9), metric=dm.INIT_FIDELITY, location=0)
        b = daily(np.full(5, 0.9), metric=dm.GATE_FIDELITY, location=(0, 1))
        with pytest.raises(ValueError, match="single metric"):
            spatial_chart({0: a, (0, 1): b}, 0)


class TestAssess:
    def test_infinite_threshold_all_stable(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        assert all(v.stable for v in assess(chart, math.inf))

    def test_zero_threshold_only_reference(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        stable = [v.label for v in assess(chart, 0.0) if v.stable]
        assert stable == ["2019-03"]

    def test_median_keeps_at_least_half(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        n = len(chart.points)
        assert sum(v.stable for v in assess(chart)) >= math.ceil(n / 2)

    def test_verdict_is_d_le_threshold(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        for v in assess(chart):
            assert v.stable == (v.d4 <= v.threshold)

    def test_negative_override_rejected(self, drifted):
        chart = temporal_chart(drifted, "2019-03")
        with pytest.raises(ValueError):
            assess(chart, -0.1)
        with pytest.raises(ValueError):
            chart.with_threshold(float("nan"))

    def test_with_threshold(self, drifted):
        chart = temporal_chart(drifted, "2019-03").with_threshold(0.5)
        assert chart.threshold == 0.5 and chart.threshold_source == "user"

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, 5), st.floats(0, 5))
    def test_monotone_in_threshold(self, drifted, t1, t2):
        lo, hi = sorted((t1, t2))
        chart = temporal_chart(drifted, "2019-03")
        a = assess(chart, lo)
        b = assess(chart, hi)
        assert all(y.stable for x, y in zip(a, b) if x.stable)
