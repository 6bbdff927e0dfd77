"""JSON/CSV emission for charts and study reports.

Floats are rounded to 12 significant digits before serialisation so
output bytes do not depend on last-bit floating point noise.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Sequence

from .monitor import ControlChart, StabilityVerdict


def num(x):
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.12g}")


def _clean(obj):
    if isinstance(obj, float):
        return num(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def chart_to_dict(chart: ControlChart, verdicts: Sequence[StabilityVerdict], config: dict) -> dict:
    sizes = dict(zip(chart.labels, chart.group_sizes))
    return {
        "metric": chart.metric_name,
        "mode": chart.mode,
        "location": chart.location,
        "reference": chart.reference_label,
        "points": [
            {"label": v.label, "d4": v.d4, "stable": v.stable, "n": sizes.get(v.label),
             "low_sample": v.label in chart.low_sample}
            for v in verdicts
        ],
        "threshold": verdicts[0].threshold if verdicts else chart.threshold,
        "threshold_source": "user" if config.get("threshold_override") is not None
        else chart.threshold_source,
        "median_threshold": chart.threshold,
        "order": chart.order,
        "bin_count": chart.bin_count,
        "support": {"a": chart.support.a, "b": chart.support.b, "gamma": chart.support.gamma},
        "config_echo": config,
    }


def write_chart(chart: ControlChart, verdicts, config: dict, out_dir, stem: str) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jpath, cpath = out / f"{stem}.json", out / f"{stem}.csv"
    jpath.write_text(dumps(chart_to_dict(chart, verdicts, config)))
    with cpath.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "d4", "threshold", "stable"])
        for v in verdicts:
            w.writerow([v.label, f"{v.d4:.12g}", f"{v.threshold:.12g}", str(v.stable).lower()])
    return jpath, cpath


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def write_rows(header: Sequence[str], rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{c:.12g}" if isinstance(c, float) else c for c in row])
    return path
