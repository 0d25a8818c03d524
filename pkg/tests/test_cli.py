import json
import subprocess
import sys

import pytest

from intgeom.cli import int_list, main

CUBE = "[body]\nkind = lp_ball\nn = 5\np = inf\n"


def test_int_list_forms():
    assert int_list("2-5") == (2, 3, 4, 5)
    assert int_list("3,4,5") == (3, 4, 5)
    assert int_list("1, 3-4") == (1, 3, 4)


def test_table_text_and_json(capsys):
    assert main(["table", "--n", "3", "--p", "1"]) == 0
    out = capsys.readouterr().out
    assert "12.566370614359" in out  # c(3, 1) = 4 pi
    assert main(["table", "--n", "3,4", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {"c", "grassmann"} == set(data)


def test_verify_constants_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["verify", "constants", "--n", "3,4", "--count", "3", "--format", "csv", "--out", str(a)]) == 0
    assert main(["verify", "constants", "--n", "3,4", "--count", "3", "--format", "csv", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_verify_json_to_stdout(capsys):
    assert main(["verify", "wedge", "--n", "3", "--k", "1", "--L", "4", "--count", "2", "--seed", "3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["suite"] == "wedge" and rep["seed"] == 3 and rep["verdict"] == "pass"
    assert "wall_time" not in rep


def test_verify_timing_flag(capsys):
    assert main(["verify", "constants", "--n", "3", "--count", "1", "--timing"]) == 0
    assert json.loads(capsys.readouterr().out)["wall_time"] >= 0


def test_verify_from_config(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[suite]\nsuite = parseval\nn = 3\nL = 4\ncount = 2\n")
    assert main(["verify", "--config", str(cfg), "--count", "1"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["parameters"]["count"] == 1 and len(rep["checks"]) == 1


def test_verify_input_errors(capsys):
    assert main(["verify"]) == 1
    assert "error" in json.loads(capsys.readouterr().err)
    assert main(["verify", "wedge", "--L", "3"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["verify", "unknown-suite"])
    assert info.value.code == 1


def test_membership_cube(tmp_path, capsys):
    spec = tmp_path / "cube.ini"
    spec.write_text(CUBE)
    assert main(["membership", str(spec), "--k", "1", "--expect", "negative"]) == 0
    rep = json.loads(capsys.readouterr().out)
    (check,) = rep["checks"]
    assert check["details"]["outcome"] == "negative"
    assert check["estimate"] < -check["tolerance"]
    assert main(["membership", str(spec), "--k", "1", "--expect", "positive"]) == 2
    capsys.readouterr()


def test_membership_with_bp_probe(tmp_path, capsys):
    spec = tmp_path / "ball.ini"
    spec.write_text("[body]\nkind = ball\nn = 4\n")
    assert main(["membership", str(spec), "--k", "1", "--L", "6", "--samples", "500", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3 and lines[2].split(",")[2].startswith("BP_1 probe")


def test_membership_bad_spec_reports_location(tmp_path, capsys):
    spec = tmp_path / "bad.ini"
    spec.write_text("[body]\nkind = ellipsoid\naxes = 1,2,x\n")
    assert main(["membership", str(spec), "--k", "1"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err == {"error": "expected comma-separated numbers, got '1,2,x'", "field": "axes", "line": 3, "section": "body"}


def test_membership_level_out_of_range(tmp_path, capsys):
    spec = tmp_path / "cube.ini"
    spec.write_text(CUBE)
    assert main(["membership", str(spec), "--k", "5"]) == 1
    capsys.readouterr()


def test_petkantschin_command(tmp_path, capsys):
    assert main(["petkantschin", "--n", "3", "--k", "1,1", "--samples", "20000", "--format", "csv"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[1].split(",")[-1] == "pass"
    cfg = tmp_path / "p.ini"
    cfg.write_text("[petkantschin]\nn = 4\nk_list = 1,1\nd = 1\nintegrand = zonal\nsamples = 20000\nseed = 2\n")
    assert main(["petkantschin", "--config", str(cfg)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["parameters"]["d"] == 1 and rep["seed"] == 2


def test_petkantschin_input_errors(capsys):
    assert main(["petkantschin", "--n", "3"]) == 1
    assert main(["petkantschin", "--n", "3", "--k", "2,2"]) == 1
    errs = capsys.readouterr().err.strip().splitlines()
    assert all("error" in json.loads(e) for e in errs)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "intgeom", "table", "--n", "3", "--p", "1", "--format", "csv"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("table,x,y,value")
