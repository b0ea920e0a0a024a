import csv
import io
import json
import subprocess
import sys

import pytest

from periodscope.cli import fmt, main, table_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_linear(capsys):
    code, out, _ = run(capsys, "analyze", "--poly", "0,1", "--grid", "8")
    rep = json.loads(out)
    assert code == 0
    assert rep["classification"] == "isochronous"
    assert rep["evidence"]["center_asymptotics"]["T0"] == pytest.approx(6.283185307179586, rel=1e-15)


def test_analyze_named_isochronous(capsys):
    code, out, _ = run(capsys, "analyze", "--named", "loud-quarter", "--grid", "8")
    assert code == 0 and json.loads(out)["classification"] == "isochronous"


def test_analyze_is_byte_identical(capsys):
    _, a, _ = run(capsys, "analyze", "--named", "cubic-soft", "--grid", "12")
    _, b, _ = run(capsys, "analyze", "--named", "cubic-soft", "--grid", "12")
    assert a == b


def test_input_file(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"type": "polynomial", "coeffs": ["0", "1", "0", "-1"]}))
    code, out, _ = run(capsys, "analyze", "--input", str(f), "--grid", "8")
    assert code == 0 and json.loads(out)["classification"] == "monotone-increasing"


@pytest.mark.parametrize(
    "argv,field",
    [
        (["analyze", "--poly", "0,0.5"], "coeffs[1]"),
        (["analyze", "--poly", "0,1", "--grid", "4"], "grid"),
        (["analyze", "--poly", "0,1", "--tol", "0.1"], "tol"),
        (["analyze", "--named", "pendulum"], "name"),
        (["verify", "--only", "nothing"], "only"),
        (["analyze"], "no potential"),
    ],
)
def test_malformed_input_exit_1(capsys, argv, field):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert field in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--input", str(tmp_path / "none.json"))
    assert code == 1 and "input" in err


def test_validation_failure_exit_2(capsys):
    code, _, err = run(capsys, "analyze", "--poly", "0,-1")
    assert code == 2 and "not a center" in err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 1


def test_period_table_linear(capsys):
    code, out, _ = run(capsys, "period-table", "--poly", "0,1", "--grid", "8")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["h", "T", "Tp", "Tpp", "error"]
    assert len(rows) == 9
    assert {r[1] for r in rows[1:]} <= {"6.28318530717958", "6.28318530717959"}


def test_csv_round_trip(capsys):
    _, out, _ = run(capsys, "period-table", "--named", "cubic-soft", "--grid", "10")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    parsed = [tuple(float(v) if v else None for v in r) for r in rows]
    assert table_csv(parsed) == out


def test_fmt_fifteen_digits():
    assert fmt(2 * 3.141592653589793) == "6.28318530717959"
    assert fmt(None) == ""


def test_period_table_json_and_plotdata(tmp_path, capsys):
    out_file = tmp_path / "t.json"
    code, _, _ = run(capsys, "period-table", "--named", "cubic-soft", "--grid", "8", "--format", "json", "--out", str(out_file))
    data = json.loads(out_file.read_text())
    assert code == 0 and len(data["rows"]) == 8
    code, out, _ = run(
        capsys, "period-table", "--named", "linear", "--named", "cubic-soft", "--grid", "8", "--format", "plotdata"
    )
    blocks = out.strip().split("\n\n")
    assert code == 0 and len(blocks) == 2
    assert all(len(line.split()) == 2 for b in blocks for line in b.splitlines()[1:])


def test_several_potentials_need_plotdata(capsys):
    code, _, _ = run(capsys, "period-table", "--named", "linear", "--named", "cubic-soft")
    assert code == 1


def test_sas_solve_hyperelliptic(capsys):
    code, out, _ = run(capsys, "sas-solve", "--poly", "0,1/2,-1/2,0,1")
    lines = out.splitlines()
    assert code == 0
    assert lines[:3] == ["deg U = 4", "deg Psi = 13", "2 box(es)"]


def test_sas_solve_zero_boxes_and_curve(capsys):
    _, out, _ = run(capsys, "sas-solve", "--poly", "0,1,0,-1")
    assert "0 box(es)" in out
    _, out, _ = run(capsys, "sas-solve", "--poly", "0,1")
    assert "curve of solutions" in out


def test_sas_solve_json(capsys):
    code, out, _ = run(capsys, "sas-solve", "--named", "hyperelliptic", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["solutions"] == 2 and len(data["boxes"]) == 2


def test_verify_single_group(capsys):
    code, out, _ = run(capsys, "verify", "--only", "isochrony")
    assert code == 0 and "4/4 checks passed" in out


def test_verify_failure_exit_4(capsys):
    code, _, _ = run(capsys, "verify", "--only", "printed-boxes")
    assert code == 4


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "periodscope.cli", "analyze", "--poly", "0,1", "--grid", "8"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and '"isochronous"' in res.stdout
