import csv
import io
import json
from fractions import Fraction

import pytest

from freespec import cli
from freespec.moments import RankParam, solve_recursion


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_moments_json(capsys):
    code, out, _ = run(capsys, "moments", "--theta", "3/4", "--t", "1.0", "--n", "6", "--format", "json")
    assert code == 0
    records = json.loads(out)
    assert len(records) == 6
    tab = solve_recursion(RankParam(Fraction(3, 4)), 6)
    for rec in records:
        assert rec["r_n"] == tab.r(rec["n"], 1.0)  # bit-for-bit round trip
        assert "exp" in rec["s_n"]


def test_moments_beyond_exact_table(capsys):
    code, out, _ = run(capsys, "moments", "--theta", "0.75", "--n", "15")
    assert code == 0
    rec = json.loads(out)
    assert len(rec) == 15 and rec[-1]["s_n"] is None


def test_rationals_round_trip(capsys, tmp_path):
    path = tmp_path / "st.json"
    code, _, _ = run(capsys, "stationary", "--theta", "4/5", "--points", "9", "--output", str(path))
    assert code == 0
    records = json.loads(path.read_text())
    assert records[0]["kind"] == "atom"
    assert cli.decode_fraction(records[0]["value"]) == Fraction(3, 5)
    assert len(records) == 10


def test_csv_headers(capsys):
    for cmd, extra in (("moments", []), ("blowup", []), ("flow", ["--t", "0.2"]), ("stationary", [])):
        code, out, _ = run(capsys, cmd, "--theta", "3/4", "--format", "csv", *extra)
        assert code == 0
        header = next(csv.reader(io.StringIO(out)))
        assert header == cli.CSV_HEADERS[cmd]


def test_blowup_residual(capsys):
    code, out, _ = run(capsys, "blowup", "--theta", "3/4", "--t", "1.0")
    rec = json.loads(out)[0]
    assert code == 0 and rec["residual"] < 1e-12
    assert set(rec) == {"t", "a", "y", "z", "residual"}


def test_flow_marks_blowup(capsys):
    code, out, _ = run(capsys, "flow", "--theta", "3/4", "--t", "0.3", "--z", "-0.5", "0.5")
    recs = json.loads(out)
    assert recs[0]["status"] == "ok" and recs[1]["status"] == "past-blowup"


def test_jacobi_table(capsys):
    code, out, _ = run(capsys, "jacobi", "--theta", "3/4", "--n-grid", "10", "100")
    recs = json.loads(out)
    assert code == 0 and [r["n"] for r in recs] == [10, 100]
    assert recs[0]["limit"] == "1/2"


def test_invalid_arguments(capsys):
    assert run(capsys, "moments", "--theta", "3/2")[0] == 2
    assert run(capsys, "moments", "--theta", "abc")[0] == 2
    assert run(capsys, "moments", "--theta", "1/2", "--n", "0")[0] == 2
    assert run(capsys, "blowup", "--theta", "1", "--t", "1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_verify_passes(capsys):
    code, out, err = run(capsys, "verify", "--theta", "3/4")
    assert code == 0
    recs = json.loads(out)
    assert all(r["passed"] for r in recs)
    assert {r["module"] for r in recs} == {"moments", "stationary", "ncfree", "flow", "convolution", "jacobi"}
    assert "PASS" in err and "FAIL" not in err


def test_verify_exit_code_on_failure(capsys, monkeypatch):
    monkeypatch.setattr(cli.jacobi, "corollary_weight", lambda rank: Fraction(7))
    code, out, err = run(capsys, "verify", "--theta", "1/2")
    assert code == 1
    assert "FAIL" in err


def test_simulate_small(capsys):
    code, out, _ = run(capsys, "simulate", "--theta", "3/4", "--t", "0.0", "--N", "8", "--trials", "2")
    recs = json.loads(out)
    assert code == 0 and recs[0]["mean"] == 1.0 and recs[0]["exact"] == 1.0


def test_encode():
    assert cli.encode({"a": [Fraction(-3, 4), 1.5]}) == {"a": ["-3/4", 1.5]}
    assert cli.encode(float("inf")) is None
