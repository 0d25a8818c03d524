import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intgeom.report import CheckRecord, VerificationReport, emit_report


def _report():
    r = VerificationReport("demo", {"n": 4, "axes": np.array([1.0, 0.5])}, 7)
    r.add("first", 0.1, 1e-3, 3.0, "pass", z=np.float64(0.25), flag=True)
    r.add("second", float("inf"), 0.0, 1.0, "inconclusive", witness=[0.6, 0.8])
    return r


def test_verdict_aggregation():
    r = _report()
    assert r.verdict == "inconclusive" and r.exit_code == 3
    r.add("third", 1.0, 0.0, 0.5, "fail")
    assert r.verdict == "fail" and r.exit_code == 2
    assert VerificationReport("empty", {}, 0).exit_code == 0


def test_check_rejects_unknown_verdict():
    with pytest.raises(ValueError):
        CheckRecord("x", 0.0, 0.0, 0.0, "maybe")


def test_json_is_parseable_and_ordered():
    out = json.loads(emit_report(_report(), "json"))
    assert list(out) == ["suite", "version", "seed", "parameters", "verdict", "checks"]
    assert out["parameters"]["axes"] == [1.0, 0.5]
    first, second = out["checks"]
    assert first["details"] == {"z": 0.25, "flag": True}
    assert second["estimate"] == "inf"
    assert list(first) == ["name", "estimate", "standard_error", "tolerance", "verdict", "details"]


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip_exactly(x):
    r = VerificationReport("rt", {}, 0)
    r.add("x", x, 0.0, 0.0, "pass")
    assert json.loads(emit_report(r, "json"))["checks"][0]["estimate"] == x
    row = list(csv.reader(io.StringIO(emit_report(r, "csv").decode())))[1]
    assert float(row[3]) == x


def test_csv_layout():
    rows = list(csv.reader(io.StringIO(emit_report(_report(), "csv").decode())))
    assert rows[0] == ["suite", "seed", "name", "estimate", "standard_error", "tolerance", "verdict"]
    assert rows[1][:3] == ["demo", "7", "first"]
    assert rows[2][3] == "inf"


def test_output_is_byte_stable():
    assert emit_report(_report(), "json") == emit_report(_report(), "json")
    assert emit_report(_report(), "csv") == emit_report(_report(), "csv")


def test_wall_time_only_when_set():
    r = _report()
    assert "wall_time" not in json.loads(emit_report(r))
    r.wall_time = 1.5
    assert json.loads(emit_report(r))["wall_time"] == 1.5


def test_extend_prefixes_names():
    a, b = VerificationReport("a", {}, 0), _report()
    a.extend(b, "sub/")
    assert [c.name for c in a.checks] == ["sub/first", "sub/second"]


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(_report(), "xml")
