import csv
import io
import json
import subprocess
import sys

import pytest

from yamabe_proj.cli import BRANCH_FIELDS, main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "cp", "--n", "2", "--q", "3", "--kmax", "3")
    assert code == 0
    rows = json.loads(out)["results"]
    assert [(r["k"], r["gap"], r["lambda_k"]) for r in rows] == [(1, 12, 12), (2, 32, 32), (3, 60, 60)]
    code, out, _ = run(capsys, "spectrum", "--space", "hp", "--n", "1", "--q", "4", "--kmax", "1")
    assert [(r["k"], r["gap"], r["lambda_k"]) for r in json.loads(out)["results"]] == [(1, 16, 8)]


@pytest.mark.parametrize("args", [
    ["spectrum", "--space", "cp", "--n", "2", "--q", "2", "--kmax", "3"],
    ["scan", "--space", "cp", "--n", "2", "--q", "4", "--lambda", "3"],
    ["spectrum", "--space", "cp", "--n", "0", "--q", "3", "--kmax", "3"],
    ["scan", "--space", "cp", "--n", "2", "--q", "3"],
    ["scan", "--space", "cp", "--n", "2", "--q", "3", "--lambda", "13", "--a-min", "-1"],
    ["branch", "--space", "cp", "--n", "2", "--q", "3", "--ds", "0"],
    ["eigenfunction", "--space", "cp", "--n", "2", "--k", "1", "--eps", "2"],
])
def test_config_errors_exit_2(capsys, args):
    code, out, err = run(capsys, *args)
    assert code == 2 and out == "" and "configuration error" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["spectrum", "--space", "rp", "--n", "2"])
    assert info.value.code == 2


@pytest.mark.parametrize("space,coeffs", [("cp", ["1", "-6", "6"]), ("hp", ["1", "-5", "5"])])
def test_eigenfunction(capsys, space, coeffs):
    code, out, _ = run(capsys, "eigenfunction", "--space", space, "--n", "1", "--k", "2")
    row = json.loads(out)["results"][0]
    assert code == 0 and row["coefficients"] == coeffs and row["zeros"] == 2 and row["all_simple"]


def test_eigenfunction_k0_and_table(capsys):
    code, out, _ = run(capsys, "eigenfunction", "--space", "hp", "--n", "3", "--k", "0",
                       "--samples", "5")
    row = json.loads(out)["results"][0]
    assert row["coefficients"] == ["1"] and row["zeros"] == 0
    assert [t["value"] for t in row["table"]] == [1.0] * 5


def test_scan_report(capsys):
    code, out, _ = run(capsys, "scan", "--space", "cp", "--n", "2", "--q", "3", "--lambda", "13")
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {"config", "results", "diagnostics"}
    assert doc["diagnostics"]["found"] >= 1 and doc["diagnostics"]["bound"] == 1
    assert all(r["ode_residual"] < 1e-6 for r in doc["results"])


def test_branch_csv(capsys):
    code, out, _ = run(capsys, "branch", "--space", "cp", "--n", "2", "--q", "3", "--k", "1",
                       "--steps", "5", "--ds", "0.01", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert out.splitlines()[0] == ",".join(BRANCH_FIELDS)
    assert len(rows) == 5
    assert float(rows[0]["s"]) == pytest.approx(0.01)
    assert float(rows[0]["lambda"]) == pytest.approx(12.0, abs=0.05)


def test_degenerate(capsys):
    code, out, _ = run(capsys, "degenerate", "--space", "cp", "--n", "2", "--q", "3")
    row = json.loads(out)["results"][0]
    assert code == 0 and row["lambda"] < 12
    assert abs(row["lin_miss"]) < 1e-6 and abs(row["dlambda_ds"]) < 1e-6


def test_degenerate_missing_fold_exit_3(capsys):
    code, out, err = run(capsys, "degenerate", "--space", "hp", "--n", "1", "--q", "3",
                         "--steps", "30")
    assert code == 3 and out == "" and "no turning point" in err


def test_out_path(capsys, tmp_path):
    path = tmp_path / "spec.json"
    code, out, _ = run(capsys, "spectrum", "--space", "cp", "--n", "2", "--q", "3", "--kmax", "2",
                       "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["config"]["kmax"] == 2


def _numbers(obj):
    if isinstance(obj, float):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _numbers(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _numbers(v)


def test_json_round_trip(capsys):
    code, out, _ = run(capsys, "scan", "--space", "hp", "--n", "1", "--q", "3", "--lambda", "17",
                       "--grid", "500")
    doc = json.loads(out)
    for x in _numbers(doc):
        assert float(format(x, ".17g")) == x
    assert json.dumps(doc, indent=2) + "\n" == out


def test_determinism_subprocess(tmp_path):
    args = [sys.executable, "-m", "yamabe_proj.cli", "scan", "--space", "cp", "--n", "2",
            "--q", "3", "--lambda", "33", "--grid", "800"]
    outs = [subprocess.run(args, capture_output=True, check=True, env={"YAMABE_THREADS": t, "PATH": ""}).stdout
            for t in ("1", "2")]
    assert outs[0] == outs[1] and outs[0]
