import csv
import io
import json
import re

import numpy as np
import pytest

from cryptononlocal.cli import main
from cryptononlocal.matrixfile import dumps_matrix

FLOAT = re.compile(r"-?\d+\.\d+(?:e[-+]\d+)?")


def write(tmp_path, matrix, name="m.json"):
    path = tmp_path / name
    path.write_text(dumps_matrix(np.asarray(matrix, dtype=complex)))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestIdentities:
    def test_qubit(self, capsys):
        code, out, _ = run(capsys, "identities", "--dim", "2", "--seed", "1")
        assert code == 0

    def test_six(self, capsys):
        code, out, _ = run(capsys, "identities", "--dim", "6", "--seed", "7", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) > 5
        assert all(float(r["max_residual"]) < 1e-10 and r["ok"] == "true" for r in rows)

    def test_dim_one(self, capsys):
        assert run(capsys, "identities", "--dim", "1")[0] == 2


class TestDecompose:
    def test_diagonal(self, capsys, tmp_path):
        code, out, _ = run(capsys, "decompose", "--input", write(tmp_path, np.diag([3, 1, -1])), "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["alpha0"] == pytest.approx(1.0)
        assert [t["alpha"] for t in doc["terms"]] == pytest.approx([2.0, 2.0])

    def test_identity(self, capsys, tmp_path):
        code, out, _ = run(capsys, "decompose", "--input", write(tmp_path, np.eye(3)), "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["alpha0"] == pytest.approx(1.0)
        assert all(abs(t["alpha"]) < 1e-12 for t in doc["terms"])

    def test_non_hermitian(self, capsys, tmp_path):
        code, _, err = run(capsys, "decompose", "--input", write(tmp_path, [[1, 2], [0, 1]]))
        assert code == 3
        assert "asymmetry" in err

    def test_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 2, "entries": [[1, 0]]}')
        assert run(capsys, "decompose", "--input", str(path))[0] == 2

    def test_missing_input(self, capsys):
        assert run(capsys, "decompose")[0] == 2

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run(capsys, "decompose", "--input", write(tmp_path, np.diag([1, -1])), "--output", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["dim"] == 2


class TestTheorem:
    def test_qm_faithful(self, capsys):
        code, out, _ = run(
            capsys, "theorem", "--model", "qm-faithful", "--dim", "3", "--n", "16",
            "--samples-tau", "500", "--format", "csv", "--workers", "2",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "j,theta,lhs_mean,lhs_stderr,rhs,verdict"
        assert len(lines) == 1 + 16 + 1

    def test_leggett(self, capsys):
        code, out, _ = run(capsys, "theorem", "--model", "leggett", "--n", "16", "--samples-tau", "5000", "--format", "json")
        assert code == 0
        assert json.loads(out)["final"]["violated"] is True

    def test_leggett_too_coarse(self, capsys):
        # no violation is expected at n = 8 either, so the verdict matches
        assert run(capsys, "theorem", "--model", "leggett", "--n", "8", "--samples-tau", "5000")[0] == 0

    def test_unknown_model(self, capsys):
        assert run(capsys, "theorem", "--model", "bohm")[0] == 2

    def test_input_must_be_omega(self, capsys, tmp_path):
        path = write(tmp_path, np.diag([2.0, -1.0]))
        assert run(capsys, "theorem", "--input", path, "--n", "4", "--samples-tau", "10")[0] == 3

    def test_nested(self, capsys):
        code, _, _ = run(
            capsys, "theorem", "--dim", "2", "--n", "2", "--nested", "--samples-tau", "10", "--samples-mu", "50"
        )
        assert code == 0

    def test_byte_identical_csv(self, capsys):
        argv = ["theorem", "--model", "leggett", "--n", "4", "--seed", "99", "--samples-tau", "2000",
                "--format", "csv", "--workers", "3"]
        first = run(capsys, *argv)[1]
        assert run(capsys, *argv)[1] == first

    def test_seventeen_digits(self, capsys):
        out = run(capsys, "theorem", "--model", "leggett", "--n", "4", "--samples-tau", "2000", "--format", "csv")[1]
        for token in FLOAT.findall(out):
            assert float(format(float(token), ".17g")) == float(token)
            assert token == format(float(token), ".17g")


class TestLeggettScan:
    def test_default(self, capsys):
        code, out, err = run(capsys, "leggett-scan", "--samples-tau", "5000", "--format", "csv")
        assert code == 0
        assert [int(r.split(",")[0]) for r in out.strip().splitlines()[1:]] == [1, 2, 4, 8, 16, 32, 64]
        assert "16" in err

    def test_short_scan(self, capsys):
        code, _, err = run(capsys, "leggett-scan", "--n", "1,2,4", "--samples-tau", "2000")
        assert code == 0
        assert "no violation" in err

    def test_dim_three(self, capsys):
        assert run(capsys, "leggett-scan", "--dim", "3")[0] == 2


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", "--dim", "3", "--n", "4", "--format", "csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 1 + 5


@pytest.mark.parametrize("argv", [["theorem", "--seed", "-1"], ["theorem", "--n", "0"], ["bogus"], []])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2
