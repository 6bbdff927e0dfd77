"""Calibration CSV I/O, on-disk datasets and synthetic fixtures.

Input files carry one row per (timestamp, location)::

    timestamp,device,location_kind,location_id,readout_error,t1_us,t2_us,gate_error,gate_length_ns

``location_kind`` is ``qubit`` (id ``"3"``) or ``pair`` (id ``"0-1"``).
Qubit rows fill readout_error/t1_us/t2_us, pair rows gate_error and
gate_length_ns; inapplicable or unknown cells stay empty. Timestamps are
ISO-8601 and are interpreted as UTC when they carry no offset.

A dataset is a directory holding ``manifest.json`` and the ingested
files under ``data/``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import shutil
from dataclasses import asdict, dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .device import CalibrationRecord, location_label, location_sort_key, parse_location
from .rng import make_rng

log = logging.getLogger(__name__)

COLUMNS = (
    "timestamp", "device", "location_kind", "location_id",
    "readout_error", "t1_us", "t2_us", "gate_error", "gate_length_ns",
)
QUBIT_FIELDS = {"readout_error": "readout_error", "t1_us": "t1", "t2_us": "t2"}
PAIR_FIELDS = {"gate_error": "gate_error", "gate_length_ns": "gate_duration"}
PROBABILITY_FIELDS = {"readout_error", "gate_error"}

MANIFEST = "manifest.json"
DATA_DIR = "data"


class CalibrationFormatError(ValueError):
    """The file as a whole cannot be used (bad header, no valid rows)."""


def parse_timestamp(text: str) -> datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    t = datetime.fromisoformat(text)
    if t.tzinfo is None:
        return t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def format_timestamp(t: datetime) -> str:
    return t.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass
class CalibrationData:
    device: str
    records: list[CalibrationRecord]
    issues: list[str] = field(default_factory=list)


def _parse_row(row: dict, applicable: dict):
    values = {}
    for col in COLUMNS[4:]:
        cell = (row.get(col) or "").strip()
        if not cell:
            continue
        if col not in applicable:
            raise ValueError(f"{col} does not apply to a {row['location_kind']} row")
        v = float(cell)
        if col in PROBABILITY_FIELDS:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"probability out of range ({col}={cell})")
        elif not (np.isfinite(v) and v > 0):
            raise ValueError(f"time must be positive ({col}={cell})")
        values[applicable[col]] = v
    return values


def read_calibration_csv(path) -> CalibrationData:
    """Parse one calibration file, collecting per-row problems in ``issues``.

    Invalid rows are skipped. When the same (timestamp, location) appears
    twice, the later row wins.
    """
    path = Path(path)
    issues: list[str] = []
    cells: dict[tuple[datetime, str, object], dict] = {}
    device = None
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != COLUMNS:
            raise CalibrationFormatError(
                f"{path}: missing or malformed header, expected {','.join(COLUMNS)}"
            )
        for row in reader:
            line = reader.line_num
            try:
                if None in row:
                    raise ValueError("too many fields")
                ts = parse_timestamp(row["timestamp"])
                kind = row["location_kind"].strip()
                if kind == "qubit":
                    loc = int(row["location_id"])
                    values = _parse_row(row, QUBIT_FIELDS)
                elif kind == "pair":
                    loc = parse_location(row["location_id"])
                    if not isinstance(loc, tuple):
                        raise ValueError(f"pair id {row['location_id']!r} is not 'a-b'")
                    values = _parse_row(row, PAIR_FIELDS)
                else:
                    raise ValueError(f"unknown location_kind {kind!r}")
                dev = (row["device"] or "").strip()
                if device is None:
                    device = dev
                elif dev != device:
                    raise ValueError(f"device {dev!r} differs from {device!r}")
            except (ValueError, TypeError) as exc:
                issues.append(f"{exc}, line {line}")
                continue
            key = (ts, kind, loc)
            if key in cells:
                issues.append(
                    f"duplicate {kind} {location_label(loc)} at {format_timestamp(ts)}, "
                    f"line {line} replaces the earlier row"
                )
            cells[key] = values
    if not cells:
        raise CalibrationFormatError(f"{path}: no valid rows")
    for msg in issues:
        log.warning("%s: %s", path, msg)
    return CalibrationData(device or "", _assemble(cells), issues)


def _assemble(cells) -> list[CalibrationRecord]:
    by_time: dict[datetime, dict[str, dict]] = {}
    for (ts, _kind, loc), values in cells.items():
        slot = by_time.setdefault(ts, {k: {} for k in ("readout_error", "t1", "t2",
                                                        "gate_error", "gate_duration")})
        for name, v in values.items():
            slot[name][loc] = v
    return [CalibrationRecord(ts, **by_time[ts]) for ts in sorted(by_time)]


def parse_calibration_csv(path) -> list[CalibrationRecord]:
    return read_calibration_csv(path).records


def merge_records(groups: Iterable[Sequence[CalibrationRecord]]) -> list[CalibrationRecord]:
    """Union of several record lists; later lists win on field collisions."""
    cells = {}
    for records in groups:
        for rec in records:
            for name, kind in (("readout_error", "qubit"), ("t1", "qubit"), ("t2", "qubit"),
                               ("gate_error", "pair"), ("gate_duration", "pair")):
                for loc, v in getattr(rec, name).items():
                    cells.setdefault((rec.timestamp, kind, loc), {})[name] = v
    return _assemble(cells)


def _cell(v) -> str:
    return "" if v is None else repr(float(v))


def write_calibration_csv(records: Sequence[CalibrationRecord], path, device: str) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for rec in sorted(records, key=lambda r: r.timestamp):
            ts = format_timestamp(rec.timestamp)
            for q in sorted(rec.qubits):
                w.writerow([ts, device, "qubit", str(q), _cell(rec.readout_error.get(q)),
                            _cell(rec.t1.get(q)), _cell(rec.t2.get(q)), "", ""])
            for p in sorted(rec.pairs):
                w.writerow([ts, device, "pair", location_label(p), "", "", "",
                            _cell(rec.gate_error.get(p)), _cell(rec.gate_duration.get(p))])
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class DatasetManifest:
    device_name: str
    records: int
    time_span: tuple[str, str]
    locations: dict
    source_files: list[dict]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["time_span"] = list(self.time_span)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        return cls(d["device_name"], int(d["records"]), tuple(d["time_span"]),
                   d["locations"], list(d["source_files"]))


@dataclass
class Dataset:
    root: Path
    manifest: DatasetManifest
    records: list[CalibrationRecord]

    @property
    def qubits(self) -> list[int]:
        return sorted({q for r in self.records for q in r.qubits})

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted({p for r in self.records for p in r.pairs})


def _manifest_for(device, records, sources) -> DatasetManifest:
    qubits = sorted({q for r in records for q in r.qubits})
    pairs = sorted({p for r in records for p in r.pairs}, key=location_sort_key)
    return DatasetManifest(
        device_name=device,
        records=len(records),
        time_span=(format_timestamp(records[0].timestamp), format_timestamp(records[-1].timestamp)),
        locations={"qubits": [str(q) for q in qubits], "pairs": [location_label(p) for p in pairs]},
        source_files=sources,
    )


def ingest(paths: Sequence, dataset_dir, device: str | None = None) -> DatasetManifest:
    """Validate calibration files and add them to the dataset at ``dataset_dir``.

    Files already present (same name and digest) are not added twice.
    """
    root = Path(dataset_dir)
    (root / DATA_DIR).mkdir(parents=True, exist_ok=True)
    sources = []
    if (root / MANIFEST).exists():
        old = DatasetManifest.from_dict(json.loads((root / MANIFEST).read_text()))
        sources = old.source_files
        device = device or old.device_name
    for p in paths:
        p = Path(p)
        parsed = read_calibration_csv(p)
        digest = sha256_file(p)
        device = device or parsed.device
        stored = f"{DATA_DIR}/{p.name}"
        existing = next((s for s in sources if s["stored"] == stored), None)
        if existing is not None:
            if existing["sha256"] != digest:
                raise ValueError(f"{stored} already ingested with different content")
            continue
        shutil.copyfile(p, root / stored)
        sources.append({"path": str(p), "stored": stored, "sha256": digest,
                        "issues": len(parsed.issues)})
    records = merge_records(parse_calibration_csv(root / s["stored"]) for s in sources)
    manifest = _manifest_for(device or "", records, sources)
    (root / MANIFEST).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    return manifest


def load_dataset(dataset_dir) -> Dataset:
    root = Path(dataset_dir)
    mpath = root / MANIFEST
    if not mpath.exists():
        raise FileNotFoundError(f"{root} is not a dataset (no {MANIFEST}); run ingest first")
    manifest = DatasetManifest.from_dict(json.loads(mpath.read_text()))
    for s in manifest.source_files:
        if sha256_file(root / s["stored"]) != s["sha256"]:
            raise ValueError(f"{s['stored']} changed since ingest (digest mismatch)")
    records = merge_records(parse_calibration_csv(root / s["stored"]) for s in manifest.source_files)
    if len(records) != manifest.records:
        raise ValueError("manifest record count does not match stored data")
    return Dataset(root, manifest, records)


# Synthetic fixtures --------------------------------------------------------

YORKTOWN_PAIRS = ((0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4))
SYNTH_KINDS = ("stable", "drift", "spread")

# Readout error noise is a normal truncated at +-3 sd. With these values
# every undisturbed F_I lies inside the single 20-bin cell [0.95, 1.0),
# so undisturbed months have identical histograms on the default grid.
READOUT_MEAN = 0.0372
READOUT_SD = 0.004
GATE_ERROR_MEAN = 0.0172
GATE_ERROR_SD = 0.002
TRUNCATE_SD = 3.0
DRIFT_SHIFT_SD = 5.0


def _tnorm(rng, mean, sd, size):
    z = rng.standard_normal(size)
    bad = np.abs(z) > TRUNCATE_SD
    while bad.any():
        z[bad] = rng.standard_normal(int(bad.sum()))
        bad = np.abs(z) > TRUNCATE_SD
    return mean + sd * z


def synth_records(
    kind: str = "stable",
    seed: int = 0,
    start: date = date(2019, 3, 1),
    end: date = date(2020, 3, 31),
    n_qubits: int = 5,
    pairs: Sequence[tuple[int, int]] = YORKTOWN_PAIRS,
    drift_month: str = "2019-09",
    target_qubit: int | None = None,
    twice_daily: bool = False,
) -> list[CalibrationRecord]:
    """Daily calibration snapshots for a small device.

    ``drift`` raises the target qubit's readout error during
    ``drift_month`` by 5 standard deviations of its undisturbed values
    (default target: qubit 0). ``spread`` doubles the target qubit's
    readout-error and T2 spread for the whole history (default: qubit 3).
    Qubit/pair streams come from child streams of ``seed``.
    """
    if kind not in SYNTH_KINDS:
        raise ValueError(f"kind must be one of {SYNTH_KINDS}")
    if target_qubit is None:
        target_qubit = 0 if kind == "drift" else 3
    days = [start + timedelta(days=i) for i in range((end - start).days + 1)]
    n = len(days)
    months = np.array([f"{d.year:04d}-{d.month:02d}" for d in days])

    readout, t1, t2 = {}, {}, {}
    for q in range(n_qubits):
        rng = make_rng(seed, f"synth/qubit/{q}")
        widen = 2.0 if (kind == "spread" and q == target_qubit) else 1.0
        e = _tnorm(rng, READOUT_MEAN, READOUT_SD * widen, n)
        if kind == "drift" and q == target_qubit:
            hit = months == drift_month
            if not hit.any():
                raise ValueError(f"drift month {drift_month} outside the fixture span")
            e[hit] += DRIFT_SHIFT_SD * e[~hit].std(ddof=1)
        readout[q] = e
        t1[q] = _tnorm(rng, 55.0, 6.0, n)
        t2[q] = _tnorm(rng, 45.0 + 5.0 * q, 5.0 * widen, n)
    gate_err, gate_len = {}, {}
    for k, p in enumerate(pairs):
        rng = make_rng(seed, f"synth/pair/{location_label(p)}")
        gate_err[p] = _tnorm(rng, GATE_ERROR_MEAN, GATE_ERROR_SD, n)
        gate_len[p] = 350.0 + 40.0 * k

    records = []
    hours = (0, 12) if twice_daily else (0,)
    for i, d in enumerate(days):
        for h in hours:
            ts = datetime(d.year, d.month, d.day, h, tzinfo=timezone.utc)
            records.append(CalibrationRecord(
                ts,
                readout_error={q: float(readout[q][i]) for q in readout},
                t1={q: float(t1[q][i]) for q in t1},
                t2={q: float(t2[q][i]) for q in t2},
                gate_error={p: float(gate_err[p][i]) for p in gate_err},
                gate_duration={p: gate_len[p] for p in gate_len},
            ))
    return records
