"""Command line interface.

Exit codes: 0 success (and, for charts, every point stable), 2 usage or
data error, 3 at least one chart point above the control limit.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import device as dm
from .addressability import fa_sweep
from .config import RunConfig, load_config
from .device import location_label, parse_location
from .ingest import SYNTH_KINDS, ingest, load_dataset, synth_records, write_calibration_csv
from .monitor import assess, spatial_chart, temporal_chart
from .report import write_chart, write_json, write_rows
from .studies import snr_study

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSTABLE = 3
OUTPUT_ENV = "NISQSTAB_OUTPUT_DIR"

log = logging.getLogger("nisqstab")


class UsageError(Exception):
    pass


def output_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUTPUT_ENV) or "nisqstab-out")


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return cfg.updated(
        bins=args.bins,
        truncation_order=args.order,
        reference_month=args.reference_month,
        reference_location=args.reference_location,
        threshold_override=args.threshold,
        group_granularity=args.granularity,
        seed=args.seed,
        dedup_daily=True if args.dedup_daily else None,
        gate_duration=args.gate_duration,
    )


def _fixed_duration(records, pair, cfg: RunConfig):
    if cfg.gate_duration == "record":
        return None
    if cfg.gate_duration == "mean":
        return dm.mean_gate_duration(records, pair)
    return float(cfg.gate_duration)


def build_series(dataset, metric: str, location, cfg: RunConfig) -> dm.MetricSeries:
    loc = parse_location(location) if isinstance(location, str) else location
    recs = dataset.records
    if metric == dm.INIT_FIDELITY:
        if isinstance(loc, tuple):
            raise UsageError("init_fidelity is a per-qubit metric; pass a qubit id")
        series = dm.init_fidelity(recs, loc)
    elif metric == dm.GATE_FIDELITY:
        if not isinstance(loc, tuple):
            raise UsageError("gate_fidelity is a per-pair metric; pass a pair id like 0-1")
        series = dm.gate_fidelity(recs, loc)
    elif metric == dm.DUTY_CYCLE:
        pair = loc if isinstance(loc, tuple) else dm.default_pair_for_qubit(dataset.pairs, loc)
        series = dm.duty_cycle(recs, pair, _fixed_duration(recs, pair, cfg))
    else:
        raise UsageError(f"unknown metric {metric!r}; choose from {', '.join(dm.METRICS)}")
    if cfg.dedup_daily:
        series = dm.dedup_daily(series)
    if series.skipped:
        print(f"warning: {metric} {location_label(series.location)}: "
              f"{series.skipped} record(s) skipped for missing fields", file=sys.stderr)
    return series


def _locations(dataset, metric):
    if metric == dm.INIT_FIDELITY:
        return dataset.qubits
    if metric in (dm.GATE_FIDELITY, dm.DUTY_CYCLE):
        return dataset.pairs
    raise UsageError(f"unknown metric {metric!r}; choose from {', '.join(dm.METRICS)}")


def _finish_chart(chart, cfg, out, stem) -> int:
    verdicts = assess(chart, cfg.threshold_override)
    jpath, _ = write_chart(chart, verdicts, cfg.to_dict(), out, stem)
    unstable = [v.label for v in verdicts if not v.stable]
    print(f"{chart.mode} chart {chart.metric_name}: {len(verdicts)} points, "
          f"threshold {verdicts[0].threshold:.6g}, unstable: {', '.join(unstable) or 'none'}")
    print(f"wrote {jpath}")
    return EXIT_UNSTABLE if unstable else EXIT_OK


def cmd_temporal(args) -> int:
    cfg = resolve_config(args)
    dataset = load_dataset(args.dataset)
    series = build_series(dataset, args.metric, args.location, cfg)
    if not series.points:
        raise UsageError(f"no data for {args.metric} at {args.location}")
    ref = cfg.reference_month or dm.group_label(series.timestamps[0], cfg.group_granularity)
    chart = temporal_chart(series, ref, cfg.bins, cfg.truncation_order, cfg.group_granularity)
    stem = f"temporal_{args.metric}_{location_label(series.location)}"
    return _finish_chart(chart, cfg, output_dir(args), stem)


def cmd_spatial(args) -> int:
    cfg = resolve_config(args)
    dataset = load_dataset(args.dataset)
    locs = _locations(dataset, args.metric)
    series = {loc: build_series(dataset, args.metric, loc, cfg) for loc in locs}
    ref = parse_location(cfg.reference_location) if cfg.reference_location else locs[0]
    if ref not in series:
        raise UsageError(f"unknown reference location {location_label(ref)!r}")
    chart = spatial_chart(series, ref, cfg.bins, cfg.truncation_order)
    return _finish_chart(chart, cfg, output_dir(args), f"spatial_{args.metric}")


def cmd_snr_study(args) -> int:
    cfg = resolve_config(args)
    res = snr_study(args.n_samples, args.n_reps, cfg.seed, cfg.bins, cfg.truncation_order)
    report = {
        "mbd_snr": res.mbd_snr,
        "tvd_snr": res.tvd_snr,
        "mbd_higher": bool(res.mbd_snr > res.tvd_snr),
        "parameters": {
            "n_samples": res.n_samples, "n_reps": res.n_reps, "bins": res.bins,
            "order": res.order, "first": [10.0, 1.0], "second": [10.0, 4.0],
        },
        "seed": res.seed,
    }
    path = write_json(report, output_dir(args) / "snr_study.json")
    print(f"MBD SNR {res.mbd_snr:.6g}, TVD SNR {res.tvd_snr:.6g}; wrote {path}")
    return EXIT_OK


def cmd_addressability(args) -> int:
    cfg = resolve_config(args)
    if not args.u:
        raise UsageError("empty u grid; pass one or more values with --u")
    bad = [u for u in args.u if not 0.0 <= u <= 0.5]
    if bad:
        raise UsageError(f"u must lie in [0, 0.5], got {bad}")
    rows = fa_sweep(args.u, args.shots, cfg.seed, args.p)
    out = output_dir(args)
    table = [{"u": r.u, "closed_form": r.closed_form, "analytic": r.analytic,
              "monte_carlo": r.monte_carlo, "abs_error": r.abs_error} for r in rows]
    path = write_json({"shots": args.shots, "p": args.p, "seed": cfg.seed, "rows": table},
                      out / "addressability.json")
    write_rows(["u", "closed_form", "monte_carlo", "abs_error"],
               [(r.u, r.closed_form, r.monte_carlo, r.abs_error) for r in rows],
               out / "addressability.csv")
    for r in rows:
        print(f"u={r.u:<6g} closed={r.closed_form:.6f} mc={r.monte_carlo:.6f} err={r.abs_error:.2e}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_ingest(args) -> int:
    manifest = ingest(args.files, args.dataset, args.device)
    print(f"dataset {args.dataset}: {manifest.records} records, "
          f"{manifest.time_span[0]} .. {manifest.time_span[1]}")
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = resolve_config(args)
    recs = synth_records(args.kind, cfg.seed, drift_month=args.drift_month,
                         target_qubit=args.target_qubit, twice_daily=args.twice_daily)
    path = Path(args.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_calibration_csv(recs, path, args.device)
    print(f"wrote {len(recs)} {args.kind} records to {path}")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = resolve_config(args)
    dataset = load_dataset(args.dataset)
    out = output_dir(args)
    summary = []
    for metric in dm.METRICS:
        for loc in _locations(dataset, metric):
            try:
                series = build_series(dataset, metric, loc, cfg)
            except (KeyError, ValueError) as exc:
                summary.append({"metric": metric, "location": location_label(loc),
                                "error": str(exc)})
                continue
            v = series.values
            roll = dm.rolling_stats(series, 30)
            stem = f"rolling_{metric}_{location_label(loc)}"
            std = dict(roll.std)
            write_rows(["timestamp", "value", "rolling_mean", "rolling_std"],
                       [(t.isoformat(), val, m, std.get(t, ""))
                        for (t, val), (_, m) in zip(series.points, roll.mean)],
                       out / f"{stem}.csv")
            summary.append({
                "metric": metric, "location": location_label(loc), "points": len(series),
                "skipped": series.skipped, "mean": float(v.mean()),
                "std": float(v.std(ddof=1)) if v.size > 1 else None,
                "min": float(v.min()), "max": float(v.max()),
                "periods": len(dm.partition(series, cfg.group_granularity)),
            })
    path = write_json({"manifest": dataset.manifest.to_dict(), "series": summary,
                       "config_echo": cfg.to_dict()}, out / "report.json")
    print(f"wrote {path}")
    return EXIT_OK


def _config_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration (overrides --config)")
    g.add_argument("--config", help="JSON file with RunConfig fields")
    g.add_argument("--bins", type=int)
    g.add_argument("--order", type=int, dest="order", help="MBD truncation order")
    g.add_argument("--reference-month")
    g.add_argument("--reference-location")
    g.add_argument("--threshold", type=float, help="user control limit instead of the median")
    g.add_argument("--granularity", choices=dm.GRANULARITIES)
    g.add_argument("--seed", type=int)
    g.add_argument("--dedup-daily", action="store_true", default=None)
    g.add_argument("--gate-duration", help="'mean', 'record' or a duration in ns")
    g.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./nisqstab-out)")
    return p


def make_parser() -> argparse.ArgumentParser:
    common = _config_flags()
    parser = argparse.ArgumentParser(prog="nisqstab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate calibration CSVs into a dataset")
    p.add_argument("files", nargs="+")
    p.add_argument("--dataset", required=True)
    p.add_argument("--device")
    p.set_defaults(func=cmd_ingest)

    for name, func, helptext in (("temporal", cmd_temporal, "per-period chart at one location"),
                                 ("spatial", cmd_spatial, "per-location chart over all time")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--dataset", required=True)
        p.add_argument("--metric", required=True, choices=dm.METRICS)
        if name == "temporal":
            p.add_argument("--location", required=True, help="qubit id (3) or pair id (0-1)")
        p.set_defaults(func=func)

    p = sub.add_parser("snr-study", parents=[common], help="MBD vs TVD sampling SNR")
    p.add_argument("--n-samples", type=int, default=8192)
    p.add_argument("--n-reps", type=int, default=400)
    p.set_defaults(func=cmd_snr_study)

    p = sub.add_parser("addressability", parents=[common], help="F_A closed form vs Monte Carlo")
    p.add_argument("--u", type=float, nargs="*", default=[0.0, 0.12, 0.5])
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--p", type=float, default=0.0, help="uncorrelated flip probability")
    p.set_defaults(func=cmd_addressability)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic calibration CSV")
    p.add_argument("--kind", choices=SYNTH_KINDS, default="stable")
    p.add_argument("--output", required=True)
    p.add_argument("--device", default="synthetic")
    p.add_argument("--drift-month", default="2019-09")
    p.add_argument("--target-qubit", type=int)
    p.add_argument("--twice-daily", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", parents=[common], help="per-series summary and rolling stats")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # exit codes are limited to 0/2/3
        print(f"error: unexpected {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
