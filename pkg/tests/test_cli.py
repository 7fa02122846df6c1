import csv
import io
import json
from pathlib import Path

import pytest

from wtlab.cli import main, parse_complex

INPUTS = Path(__file__).resolve().parents[1] / "inputs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("text,val", [("2i", 2j), ("0.5+i", 0.5 + 1j), ("-i", -1j), ("1-2.5i", 1 - 2.5j), ("3", 3)])
def test_parse_complex(text, val):
    assert parse_complex(text) == val


def test_eval_single_atom(capsys):
    code, out, _ = run(capsys, "eval", "--measure", str(INPUTS / "single_atom.json"), "--z", "2i")
    assert code == 0
    doc = json.loads(out)
    assert doc["data"]["values"][0] == [[[0.0, 0.5]]]


def test_eval_csv_format(capsys):
    code, out, _ = run(capsys, "eval", "--measure", str(INPUTS / "two_atoms.json"), "--z", "2i", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["re_z", "im_z", "entryindex", "re", "im"]
    assert float(rows[1][4]) == pytest.approx(0.8)


def test_check_passes(capsys):
    assert run(capsys, "check", "--measure", str(INPUTS / "example_a.json"))[0] == 0


def test_check_failure_exit_two(capsys):
    code, out, _ = run(capsys, "check", "--example", "diag", "--params", '{"as_printed": true}')
    assert code == 2
    assert json.loads(out)["passed"] is False


def test_period_verdicts(capsys):
    assert run(capsys, "period", "--example", "a")[0] == 0
    assert run(capsys, "period", "--example", "a", "--b", "3.0")[0] == 2


def test_tolerance_override(capsys):
    code, out, _ = run(capsys, "period", "--example", "a", "--b", "3.0", "--tol", "period=100")
    assert code == 0


def test_invert_and_model(capsys):
    code, out, _ = run(capsys, "invert", "--measure", str(INPUTS / "two_atoms.json"), "--alpha", "0", "--beta", "2")
    assert code == 0
    assert json.loads(out)["data"]["estimate"][0][0][0] == pytest.approx(0.5, abs=1e-6)
    assert run(capsys, "model", "--measure", str(INPUTS / "lattice.json"))[0] == 0


def test_orbit(capsys):
    code, out, _ = run(capsys, "orbit", "--ctx", str(INPUTS / "ctx_cyclic.json"), "--nmax", "50", "--tol", "1e-6")
    assert code == 0
    assert json.loads(out)["data"]["period"] == 4


def test_examples(capsys):
    assert run(capsys, "example", "--id", "b", "--sweep-period")[0] == 0
    assert run(capsys, "example", "--id", "schrodinger")[0] == 0
    code, _, err = run(capsys, "example", "--id", "schrodinger", "--params", '{"vhat": {"1": [0.3, 0.1], "-1": [0.3, 0.1]}}')
    assert code == 2


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "--measure", str(INPUTS / "bad_measure.json"), "--z", "i")
    assert code == 1
    doc = json.loads(err.strip().splitlines()[-1])
    assert doc["pointer"] == "/atoms/0/weight/0/0"
    assert run(capsys, "eval", "--measure", str(tmp_path / "missing.json"), "--z", "i")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "eval", "--measure", str(INPUTS / "single_atom.json"), "--z", "zz")[0] == 1
    assert run(capsys, "check", "--example", "b", "--params", "{bad")[0] == 1
    assert run(capsys, "check", "--example", "b", "--tol", "nope=1")[0] == 1


def test_deterministic_outputs(tmp_path, capsys):
    outs = []
    for jobs in ("1", "3", "1"):
        j, c = tmp_path / f"r{len(outs)}.json", tmp_path / f"r{len(outs)}.csv"
        assert main(["check", "--measure", str(INPUTS / "example_a.json"), "--jobs", jobs,
                     "--out", str(j), "--csv", str(c)]) == 0
        outs.append((j.read_bytes(), c.read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_selftest_exit_zero(capsys):
    code, out, err = run(capsys, "selftest")
    assert code == 0
    assert err.count("[PASS]") == 13
