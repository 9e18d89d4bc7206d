import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from glduality import Frame
from glduality.report import dumps_report, format_float, loads_report, read_table, to_plain, write_report, write_table


def test_format_float():
    assert format_float(1.0) == "1.0"
    assert format_float(-3) == "-3.0"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(1e-20) == "9.9999999999999995e-21"
    assert format_float(math.nan) == '"nan"'
    assert format_float(-math.inf) == '"-inf"'


def test_to_plain():
    plain = to_plain({"z": 1 + 2j, "a": np.array([1.0, 2.0]), "f": Frame.PSEUDO, "n": np.int64(3), "b": np.bool_(True)})
    assert plain == {"z": {"re": 1.0, "im": 2.0}, "a": [1.0, 2.0], "f": Frame.PSEUDO.value, "n": 3, "b": True}


def test_report_is_sorted_and_valid_json():
    text = dumps_report({"b": [1, 2.5, None], "a": {"y": "s\"q", "x": True}})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": {"x": True, "y": 's"q'}, "b": [1, 2.5, None]}


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip_is_exact(x):
    assert loads_report(dumps_report({"x": x}))["x"] == x


def test_write_report_is_atomic_and_deterministic(tmp_path):
    path = tmp_path / "r.json"
    write_report(path, {"x": 0.1, "y": [1 + 1j]})
    first = path.read_bytes()
    write_report(path, {"y": [1 + 1j], "x": 0.1})
    assert path.read_bytes() == first
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]


@pytest.mark.parametrize("name", ["t.csv", "t.tsv"])
def test_table_round_trip_is_exact(tmp_path, name):
    rng = np.random.default_rng(1)
    cols = [rng.normal(size=50) * 10.0 ** rng.integers(-15, 15, size=50) for _ in range(3)]
    path = tmp_path / name
    write_table(path, ["a", "b", "c"], cols, "\t" if name.endswith("tsv") else ",")
    header, data = read_table(path)
    assert header == ["a", "b", "c"]
    assert np.array_equal(data, np.column_stack(cols))
    if name.endswith("tsv"):
        assert "\t" in path.read_text().splitlines()[0]
