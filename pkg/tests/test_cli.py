import csv
import io
import json
import subprocess
import sys
from importlib.resources import files

import jsonschema
import numpy as np
import pytest

from pinchlab.cli import main
from pinchlab.spectra import pinching_oneloop

SCHEMA = json.loads(files("pinchlab").joinpath("schemas/output.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text, newline="")))


def test_verify_oneloop_passes(capsys):
    code, out, _ = run(capsys, "verify", "--family", "oneloop", "--c", "1", "--grid", "default", "--samples", "2000")
    assert code == 0
    rows = rows_of(out)
    assert {r["check"] for r in rows} >= {"connection", "curvature_forms", "spectrum", "einstein", "weyl_half"}
    assert all(r["passed"] == "true" for r in rows)


def test_verify_pedersen_passes(capsys):
    code, _, _ = run(capsys, "verify", "--family", "pedersen", "--m2", "0.5", "--samples", "2000")
    assert code == 0


def test_verify_reports_named_failure(capsys):
    code, _, err = run(capsys, "verify", "--family", "oneloop", "--c", "1", "--grid", "2", "--samples", "0",
                       "--tol", "1e-30")
    assert code == 1
    assert "FAIL" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "oneloop", "--c", "-1"],
    ["verify", "--family", "oneloop", "--m2", "1"],
    ["verify", "--family", "pedersen", "--grid", "1.5"],
    ["sweep", "--range", "1", "1", "5"],
    ["sweep", "--range", "2", "1", "5"],
    ["sweep", "--range", "0", "1", "5", "--spacing", "log"],
    ["sweep"],
    ["boundary", "--family", "pedersen"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_pinching_sweep_decreases(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "oneloop", "--range", "1e-3", "1e3", "200", "--spacing", "log")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 200
    d = [float(r["delta"]) for r in rows]
    assert all(a >= b for a, b in zip(d, d[1:]))
    assert d[0] > 0.999
    assert d[-1] == pinching_oneloop(1e3) and d[-1] < 0.2525
    assert rows[0]["version"]


def test_pedersen_sweep_flips_at_one(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "pedersen", "--range", "0", "2", "21")
    assert code == 0
    for r in rows_of(out):
        m2 = float(r["m2"])
        expect = "AllNegative" if m2 < 1 else ("ZeroAtOrigin" if m2 == 1 else "MixedSigns")
        assert r["classification"] == expect


def test_csv_round_trips_seventeen_digits(capsys):
    _, out, _ = run(capsys, "sweep", "--range", "0.1", "7", "9")
    assert out.count("\r\n") == 10
    got = [float(r["rho_tilde"]) for r in rows_of(out)]
    assert got == list(np.linspace(0.1, 7, 9))


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "hb", "--b", "0.5", "--grid", "1", "--samples", "1000"],
    ["sweep", "--family", "pedersen", "--param", "varrho", "--m2", "8", "--range", "0", "0.9", "10"],
    ["sweep", "--family", "hb", "--range", "0", "5", "3"],
    ["boundary", "--family", "oneloop", "--c", "1", "--samples", "50"],
    ["boundary", "--family", "oneloop", "--c", "0", "--samples", "50"],
    ["boundary", "--family", "hb", "--b", "0", "--samples", "50"],
    ["limit"],
])
def test_json_validates_against_schema(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert len(doc["rows"]) >= 1


def test_identical_inputs_give_identical_bytes(capsys, tmp_path):
    argv = ["verify", "--family", "pedersen", "--m2", "8", "--grid", "0.3,0.5", "--samples", "3000", "--seed", "9"]
    a, b = tmp_path / "a.csv", tmp_path / "b.json"
    assert main(argv + ["-o", str(a)]) == 0
    first = a.read_bytes()
    assert main(argv + ["-o", str(a)]) == 0
    assert a.read_bytes() == first
    main(["boundary", "--family", "hb", "--b", "1", "--samples", "40", "--format", "json", "-o", str(b)])
    first = b.read_bytes()
    main(["boundary", "--family", "hb", "--b", "1", "--samples", "40", "--format", "json", "-o", str(b)])
    assert b.read_bytes() == first
    capsys.readouterr()


def test_thread_count_does_not_change_output(capsys, monkeypatch):
    argv = ["verify", "--family", "oneloop", "--c", "0.1", "--grid", "0.1,2", "--samples", "140000"]
    monkeypatch.setenv("PINCHLAB_THREADS", "1")
    _, one, _ = run(capsys, *argv)
    monkeypatch.setenv("PINCHLAB_THREADS", "4")
    _, four, _ = run(capsys, *argv)
    assert one == four
    monkeypatch.setenv("PINCHLAB_THREADS", "zero")
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_boundary_reports_pole_orders(capsys):
    for fam, flag in (("hb", "--b"), ("oneloop", "--c")):
        code, out, err = run(capsys, "boundary", "--family", fam, flag, "1", "--samples", "20", "--format", "json")
        assert code == 0
        assert abs(json.loads(out)["summary"]["pole_order"] - 2.0) <= 0.05
        assert "pole_order=" in err


def test_boundary_round_class(capsys):
    code, out, _ = run(capsys, "boundary", "--family", "hb", "--b", "0", "--samples", "1000", "--format", "json")
    assert code == 0
    assert json.loads(out)["summary"]["max_off_scalar"] <= 1e-10


def test_limit_table(capsys):
    code, out, _ = run(capsys, "limit")
    assert code == 0
    rows = rows_of(out)
    assert [float(r["b"]) for r in rows] == [10.0 ** -k for k in range(1, 9)]
    assert float(rows[-1]["max_abs_residual"]) <= 1e-8


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "pinchlab.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("pinchlab ")
