import json
from datetime import datetime, timezone

import numpy as np
import pytest

from nisqstab import device as dm
from nisqstab.ingest import (
    COLUMNS,
    CalibrationFormatError,
    ingest,
    load_dataset,
    parse_calibration_csv,
    parse_timestamp,
    read_calibration_csv,
    sha256_file,
    synth_records,
    write_calibration_csv,
)
from nisqstab.monitor import assess, temporal_chart

HEADER = ",".join(COLUMNS)
UTC = timezone.utc


def write(tmp_path, body, name="cal.csv", header=HEADER):
    p = tmp_path / name
    p.write_text(header + "\n" + body if header else body)
    return p


THREE = """\
2019-03-01T00:00:00Z,ibmqx2,qubit,0,0.02,55.0,50.0,,
2019-03-02T00:00:00Z,ibmqx2,qubit,0,0.03,54.0,48.0,,
2019-03-03T00:00:00Z,ibmqx2,qubit,0,0.04,53.0,47.0,,
"""


class TestParse:
    def test_three_rows_in_order(self, tmp_path):
        data = read_calibration_csv(write(tmp_path, THREE))
        assert data.device == "ibmqx2" and data.issues == []
        assert [r.timestamp.day for r in data.records] == [1, 2, 3]
        assert dm.init_fidelity(data.records, 0).values.tolist() == [0.98, 0.97, 0.96]
        assert data.records[0].t2 == {0: 50.0}

    def test_out_of_range_probability_names_line(self, tmp_path):
        body = THREE + "2019-03-04T00:00:00Z,ibmqx2,qubit,0,1.2,53.0,47.0,,\n"
        data = read_calibration_csv(write(tmp_path, body))
        assert len(data.records) == 3
        assert len(data.issues) == 1
        assert "probability out of range" in data.issues[0]
        assert "line 5" in data.issues[0]

    def test_pair_rows(self, tmp_path):
        body = ("2019-03-01T00:00:00Z,ibmqx2,pair,0-1,,,,0.015,350\n"
                "2019-03-01T00:00:00Z,ibmqx2,qubit,0,0.02,55,50,,\n")
        (rec,) = parse_calibration_csv(write(tmp_path, body))
        assert rec.gate_error == {(0, 1): 0.015} and rec.gate_duration == {(0, 1): 350.0}
        assert dm.duty_cycle([rec], (0, 1)).values[0] == pytest.approx(350 / 50e3)

    def test_inapplicable_or_bad_fields(self, tmp_path):
        body = THREE + ("2019-03-05T00:00:00Z,ibmqx2,qubit,0,0.02,55,50,0.01,\n"
                        "2019-03-06T00:00:00Z,ibmqx2,gadget,0,0.02,55,50,,\n"
                        "2019-03-07T00:00:00Z,ibmqx2,qubit,0,0.02,-5,50,,\n"
                        "2019-03-08T00:00:00Z,other,qubit,0,0.02,55,50,,\n"
                        "not-a-date,ibmqx2,qubit,0,0.02,55,50,,\n")
        data = read_calibration_csv(write(tmp_path, body))
        assert len(data.records) == 3 and len(data.issues) == 5
        assert [m.rsplit("line ", 1)[1] for m in data.issues] == ["5", "6", "7", "8", "9"]

    def test_duplicate_last_wins(self, tmp_path):
        body = THREE + "2019-03-02T00:00:00Z,ibmqx2,qubit,0,0.09,54.0,48.0,,\n"
        data = read_calibration_csv(write(tmp_path, body))
        assert dm.init_fidelity(data.records, 0).values[1] == pytest.approx(0.91)
        assert any("duplicate" in m for m in data.issues)

    def test_missing_header(self, tmp_path):
        with pytest.raises(CalibrationFormatError, match="header"):
            read_calibration_csv(write(tmp_path, THREE, header=None))

    def test_no_valid_rows(self, tmp_path):
        body = "2019-03-04T00:00:00Z,ibmqx2,qubit,0,1.2,53.0,47.0,,\n"
        with pytest.raises(CalibrationFormatError, match="no valid rows"):
            read_calibration_csv(write(tmp_path, body))

    def test_timestamps(self):
        assert parse_timestamp("2019-03-01T05:00:00Z") == datetime(2019, 3, 1, 5, tzinfo=UTC)
        assert parse_timestamp("2019-03-01") == datetime(2019, 3, 1, tzinfo=UTC)


def test_write_read_round_trip(tmp_path):
    recs = synth_records("stable", seed=1, end=datetime(2019, 3, 20).date())
    p = write_calibration_csv(recs, tmp_path / "rt.csv", "synth")
    back = parse_calibration_csv(p)
    assert back == recs


class TestDataset:
    def test_manifest(self, tmp_path):
        src = write(tmp_path, THREE)
        m = ingest([src], tmp_path / "ds")
        assert m.device_name == "ibmqx2" and m.records == 3
        assert m.time_span == ("2019-03-01T00:00:00Z", "2019-03-03T00:00:00Z")
        assert m.locations == {"qubits": ["0"], "pairs": []}
        (sf,) = m.source_files
        assert sf["sha256"] == sha256_file(src)
        stored = json.loads((tmp_path / "ds" / "manifest.json").read_text())
        assert stored["records"] == 3
        ds = load_dataset(tmp_path / "ds")
        assert ds.qubits == [0] and len(ds.records) == 3

    def test_reingest_is_idempotent(self, tmp_path):
        src = write(tmp_path, THREE)
        a = ingest([src], tmp_path / "ds")
        b = ingest([src], tmp_path / "ds")
        assert a == b

    def test_conflicting_content(self, tmp_path):
        src = write(tmp_path, THREE)
        ingest([src], tmp_path / "ds")
        src.write_text(HEADER + "\n" + THREE.replace("0.02", "0.05"))
        with pytest.raises(ValueError, match="different content"):
            ingest([src], tmp_path / "ds")

    def test_tampering_detected(self, tmp_path):
        ingest([write(tmp_path, THREE)], tmp_path / "ds")
        stored = tmp_path / "ds" / "data" / "cal.csv"
        stored.write_text(stored.read_text().replace("0.02", "0.05"))
        with pytest.raises(ValueError, match="digest"):
            load_dataset(tmp_path / "ds")

    def test_files_merge(self, tmp_path):
        a = write(tmp_path, THREE, "a.csv")
        b = write(tmp_path, "2019-03-01T00:00:00Z,ibmqx2,pair,0-1,,,,0.015,350\n", "b.csv")
        m = ingest([a, b], tmp_path / "ds")
        assert m.records == 3 and m.locations["pairs"] == ["0-1"]

    def test_not_a_dataset(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_dataset(tmp_path)


class TestSynth:
    def test_shape(self):
        recs = synth_records("stable")
        assert len(recs) == 397
        assert sorted(recs[0].qubits) == [0, 1, 2, 3, 4]
        assert len(recs[0].pairs) == 6
        assert len(synth_records("stable", twice_daily=True)) == 794

    def test_deterministic(self):
        assert synth_records("drift", seed=3) == synth_records("drift", seed=3)
        assert synth_records("drift", seed=3) != synth_records("drift", seed=4)

    def test_drift_month_flagged_alone(self):
        s = dm.init_fidelity(synth_records("drift", seed=0), 0)
        verdicts = assess(temporal_chart(s, "2019-03"))
        assert [v.label for v in verdicts if not v.stable] == ["2019-09"]

    def test_stable_all_months_pass(self):
        for q in range(5):
            s = dm.init_fidelity(synth_records("stable", seed=0), q)
            assert all(v.stable for v in assess(temporal_chart(s, "2019-03")))

    def test_spread_widens_target(self):
        recs = synth_records("spread", seed=0)
        sd = {q: np.std(dm.init_fidelity(recs, q).values) for q in range(5)}
        assert max(sd, key=sd.get) == 3
        assert sd[3] > 1.6 * np.median(list(sd.values()))

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            synth_records("chaos")
