import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from spectral_corners import cli
from spectral_corners.classify import CSV_COLUMNS
from spectral_corners.report import IdentityReport, emit, to_json


def call(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_entry_example(capsys):
    code, out, _ = call(capsys, "entry", "--family", "C", "--tau", "2", "--rho", "0",
                        "--n", "2", "--m", "4")
    assert code == 0 and out.strip() == "0.5"
    code, out, _ = call(capsys, "entry", "--family", "A", "--tau", "1", "--rho", "1", "--q", "0.25",
                        "--n", "2", "--m", "2", "--format", "json")
    assert json.loads(out) == {"value": 0.0625}


def test_smith_example(capsys):
    code, out, _ = call(capsys, "verify", "smith", "--size", "8")
    rep = json.loads(out)[0]
    assert code == 0
    assert rep["notes"]["det"] == 768 and rep["notes"]["phi_product"] == 768


def test_rank_two_example(capsys):
    code, out, _ = call(capsys, "verify", "rank-two", "--family", "B", "--tau", "-0.5",
                        "--rho", "2", "--size", "64")
    rep = json.loads(out)[0]
    assert code == 0 and rep["rel_discrepancy"] < 1e-12


REPORT_KEYS = {"lhs", "rhs", "abs_discrepancy", "rel_discrepancy", "notes"}
VERIFY_CASES = [
    ["poisson-circle", "--q", "0.5", "--tau", "1"],
    ["quadform-a", "--family", "A", "--tau", "1", "--rho", "1", "--q", "0.5", "--trials", "3"],
    ["halfplane", "--tau", "2", "--n", "1", "--m", "2"],
    ["zeta-divisor", "--tau", "4", "--n", "2", "--m", "4"],
    ["multiplier-gram", "--tau", "4", "--size", "8", "--tol", "1e-4"],
    ["rank-two", "--family", "A", "--tau", "1", "--rho", "0.5", "--q", "0.5", "--size", "32"],
    ["tensor", "--tau", "1", "--rho", "0.5", "--size", "24"],
    ["scaling", "--family", "B", "--tau", "1", "--rho", "2", "--k", "5", "--n", "2", "--m", "3"],
    ["smith", "--size", "12"],
    ["symbol-range", "--tau", "2", "--q", "0.25", "--size", "128"],
]


@pytest.mark.parametrize("argv", VERIFY_CASES, ids=lambda a: a[0])
def test_verify_exit_code_matches_reports(capsys, argv):
    code, out, _ = call(capsys, "verify", *argv)
    reps = json.loads(out)
    assert reps and all(set(r) == REPORT_KEYS for r in reps)
    passed = all(r["notes"]["passed"] for r in reps)
    assert code == (0 if passed else 1)
    assert passed


def test_verify_failure_exits_one(capsys):
    # 64 circle points cannot resolve the kernel at q = 0.9 to 1e-10
    code, out, _ = call(capsys, "verify", "poisson-circle", "--q", "0.9", "--tau", "0.5",
                        "--n", "3", "--points", "64")
    assert code == 1 and json.loads(out)[0]["notes"]["passed"] is False
    code, out, _ = call(capsys, "verify", "quadform-a", "--family", "A", "--tau", "0.5",
                        "--rho", "0", "--q", "0.95", "--points", "16", "--trials", "1")
    assert code == 1 and json.loads(out)[0]["notes"]["passed"] is False


@pytest.mark.parametrize("argv", [
    ["entry", "--family", "C", "--tau", "2", "--rho", "0", "--n", "2"],      # missing --m
    ["entry", "--family", "A", "--tau", "1", "--rho", "1", "--n", "0", "--m", "0"],  # no q
    ["entry", "--family", "B", "--tau", "1", "--rho", "1", "--q", "0.5", "--n", "1", "--m", "1"],
    ["entry", "--family", "B", "--tau", "1", "--rho", "1", "--n", "0", "--m", "1"],  # origin
    ["dense", "--family", "B", "--tau", "1", "--rho", "1", "--bogus", "3"],
    ["verify", "nonexistent"],
    ["verify", "smith", "--size", "40"],
    ["verify", "zeta-divisor", "--tau", "2", "--n", "1", "--m", "1"],
    ["scan"],
    ["figure1", "--family", "A"],
    ["witness", "--family", "C", "--tau", "3", "--rho", "2", "--size", "64"],  # bounded
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = call(capsys, *argv)
    assert code == 2


def test_unwritable_output(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = call(capsys, "verify", "smith", "--size", "4", "--out", str(blocker / "x.json"))
    assert code == 2 and str(blocker) in err
    code, _, _ = call(capsys, "figure1", "--family", "B", "--resolution", "5",
                      "--out", str(blocker / "dir"))
    assert code == 2


def test_dense_eig_lanczos_matvec(capsys):
    base = ["--family", "C", "--tau", "1", "--rho", "0.5", "--size", "16"]
    code, out, _ = call(capsys, "dense", *base)
    d = json.loads(out)
    assert code == 0 and len(d["entries"]) == 16 and d["entries"][0][0] == 1.0
    code, out, _ = call(capsys, "eig", *base)
    e = json.loads(out)
    assert code == 0 and e["n_neg"] == 0 and len(e["eigenvalues"]) == 16
    code, out, _ = call(capsys, "lanczos", *base, "--which", "top")
    lz = json.loads(out)
    assert code == 0 and lz["top"][0] == pytest.approx(e["eigenvalues"][0], rel=1e-10)
    code, out, _ = call(capsys, "matvec-check", *base)
    assert code == 0 and json.loads(out)["notes"]["passed"]


def test_witness_command(capsys):
    code, out, _ = call(capsys, "witness", "--family", "B", "--tau", "1", "--rho", "0.5",
                        "--size", "2048", "--sigma", "0.7")
    rep = json.loads(out)
    assert code == 0 and rep["growing"] and rep["kind"] == "rayleigh" and rep["sigma"] == 0.7


SCAN = ["scan", "--family", "C", "--tau-steps", "4", "--rho-steps", "3", "--sizes", "32,64,128,256"]


def test_scan_reruns_are_byte_identical(tmp_path, capsys):
    paths = []
    for i, fmt in enumerate(["json", "json", "csv", "csv"]):
        path = tmp_path / f"scan{i}.{fmt}"
        assert cli.run([*SCAN, "--format", fmt, "--out", str(path)]) == 0
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] and paths[2] == paths[3]


def test_scan_parse_back(capsys):
    code, out, _ = call(capsys, *SCAN)
    data = json.loads(out)
    assert code == 0 and len(data["points"]) == 12
    code, out_csv, _ = call(capsys, *SCAN, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    assert list(rows[0]) == CSV_COLUMNS
    for pt, row in zip(data["points"], rows):
        assert float(row["tau"]) == pt["tau"] and float(row["rho"]) == pt["rho"]
        assert row["empirical"] == pt["empirical"]
        if pt["lmax_last"] is not None:
            assert float(row["lmax_last"]) == pt["lmax_last"]
            assert pt["lambda_max_by_size"][-1][1] == pt["lmax_last"]
    # reserialising the parsed document reproduces it exactly
    assert to_json(data) == out


def test_emit_schema():
    assert emit([], "json") == "[]\n"
    assert json.loads(emit([], "json")) == []
    rep = IdentityReport("x", 0.1 + 0.2, 0.3, 1e-12)
    d = json.loads(emit(rep, "json"))
    assert set(d) == REPORT_KEYS
    assert d["lhs"] == 0.1 + 0.2  # 17 digits round-trip exactly
    with pytest.raises(ValueError):
        emit([{"a": 1}], "csv")
    with pytest.raises(ValueError):
        emit({}, "xml")


def test_figure1_command(tmp_path, capsys):
    code, out, _ = call(capsys, "figure1", "--family", "A", "--resolution", "5",
                        "--out", str(tmp_path))
    assert code == 0 and "agreement" in out
    assert (tmp_path / "figure1_A.csv").exists() and (tmp_path / "figure1_A.svg").exists()


def test_console_script_and_module():
    exe = shutil.which("spectral-corners")
    argv = [exe] if exe else [sys.executable, "-m", "spectral_corners"]
    res = subprocess.run([*argv, "entry", "--family", "C", "--tau", "2", "--rho", "0",
                          "--n", "2", "--m", "4"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0.5"
    res = subprocess.run([sys.executable, "-m", "spectral_corners", "verify", "smith", "--size", "30"],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "24" in res.stderr
