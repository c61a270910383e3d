import json
import math

import pytest

from cohex.errors import DomainError
from cohex.table import SweepTable, emit, emit_csv, emit_json, parse_csv


def _sample():
    return SweepTable(
        columns=("x", "y", "status"),
        rows=[
            (0.0, 1.0, "ok"),
            (0.5, None, "no-convergence"),
            (1.0, -2.25e-17, "ok"),
        ],
        meta={"model": "demo", "grid": "3 x 1"},
    )


def test_table_rejects_duplicate_columns():
    with pytest.raises(DomainError):
        SweepTable(columns=("x", "x"), rows=[], meta={})


def test_table_rejects_ragged_rows():
    with pytest.raises(DomainError):
        SweepTable(columns=("x", "y"), rows=[(1.0,)], meta={})


def test_table_rejects_non_finite_cells():
    with pytest.raises(DomainError):
        SweepTable(columns=("x",), rows=[(math.nan,)], meta={})
    with pytest.raises(DomainError):
        SweepTable(columns=("x",), rows=[(math.inf,)], meta={})


def test_table_column_access_and_all_ok():
    tab = _sample()
    assert tab.column("x") == [0.0, 0.5, 1.0]
    assert tab.column("status") == ["ok", "no-convergence", "ok"]
    assert not tab.all_ok()
    clean = SweepTable(("x", "status"), [(1.0, "ok")], {})
    assert clean.all_ok()


def test_csv_round_trip_is_identity():
    tab = _sample()
    text = emit_csv(tab)
    back = parse_csv(text)
    assert back.columns == tab.columns
    assert back.rows == [tuple(r) for r in tab.rows]
    assert back.meta == tab.meta
    # a second pass changes nothing
    assert emit_csv(back) == text


def test_csv_preserves_full_precision():
    val = -2.548158530351421e-01
    tab = SweepTable(("v",), [(val,)], {})
    back = parse_csv(emit_csv(tab))
    assert back.rows[0][0] == val


def test_empty_table_emission():
    tab = SweepTable(("a", "b"), [], {"note": "empty"})
    text = emit_csv(tab)
    back = parse_csv(text)
    assert back.rows == [] and back.columns == ("a", "b")
    doc = json.loads(emit_json(tab))
    assert doc["rows"] == []


def test_json_structure():
    doc = json.loads(emit_json(_sample()))
    assert doc["meta"]["model"] == "demo"
    assert doc["meta"]["columns"] == ["x", "y", "status"]
    assert doc["rows"][1] == [0.5, None, "no-convergence"]


def test_emit_dispatch_and_unknown_format():
    tab = _sample()
    assert emit(tab, "csv") == emit_csv(tab)
    assert emit(tab, "json") == emit_json(tab)
    with pytest.raises(DomainError):
        emit(tab, "yaml")
