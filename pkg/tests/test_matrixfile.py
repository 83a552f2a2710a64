import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptononlocal.matrixfile import MatrixFileError, dumps_matrix, fmt, loads_matrix, read_matrix, to_json


def test_example_document():
    m = loads_matrix('{"dim": 2, "entries": [[1, 0], [0, 0], [0, 0], [-1, 0]]}')
    np.testing.assert_array_equal(m, np.diag([1.0, -1.0]))


def test_scientific_notation():
    m = loads_matrix('{"dim": 1, "entries": [[1.5e-3, -2E2]]}')
    assert m[0, 0] == complex(1.5e-3, -200)


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=8, max_size=8))
def test_round_trip(values):
    m = (np.array(values[:4]) + 1j * np.array(values[4:])).reshape(2, 2)
    np.testing.assert_array_equal(loads_matrix(dumps_matrix(m)), m)


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(-0.0) == "0"
    assert fmt(1.0) == "1"
    with pytest.raises(ValueError):
        fmt(float("nan"))


def test_to_json_is_valid_json():
    obj = {"a": [1.5, 2], "b": {"c": [[0.1, 0.2]]}, "d": True, "e": None, "f": "x", "g": []}
    assert json.loads(to_json(obj)) == obj


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        '{"dim": 2}',
        '{"dim": 0, "entries": []}',
        '{"dim": true, "entries": [[1, 0]]}',
        '{"dim": 2, "entries": [[1, 0]]}',
        '{"dim": 1, "entries": [[1]]}',
        '{"dim": 1, "entries": [["1", 0]]}',
        '{"dim": 1, "entries": [[NaN, 0]]}',
    ],
)
def test_rejects(text):
    with pytest.raises(MatrixFileError):
        loads_matrix(text)


def test_read_missing(tmp_path):
    with pytest.raises(MatrixFileError):
        read_matrix(tmp_path / "absent.json")
