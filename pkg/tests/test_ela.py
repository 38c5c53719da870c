import json

import pytest

from pc4pm import KeySpec, TypedValue, encode_dfg, parse_ela, write_ela
from pc4pm.errors import MalformedAbstraction, ModelInvariantError
from pc4pm.model import AbstractionHeader, EventLogAbstraction

from conftest import make_fix1


def minimal_abstraction(rows=()):
    return EventLogAbstraction(
        header=AbstractionHeader(
            abstraction_kind="test-kind",
            origin_log_id="",
            technique="test",
        ),
        columns=("x", "y"),
        rows=rows,
    )


def test_minimal_round_trip():
    ela = minimal_abstraction()
    assert parse_ela(write_ela(ela)) == ela


def test_rows_round_trip_all_kinds():
    rows = [
        (TypedValue.string("s"), TypedValue("integer", 3)),
        (TypedValue("real", 0.25), TypedValue("boolean", False)),
    ]
    ela = minimal_abstraction(rows)
    back = parse_ela(write_ela(ela))
    assert back.rows == ela.rows


def test_connector_output_round_trips():
    key = KeySpec("k", b"0123456789abcdef")
    ela = encode_dfg(make_fix1(), key)
    assert parse_ela(write_ela(ela)) == ela


def test_row_arity_mismatch_rejected():
    with pytest.raises(ModelInvariantError):
        minimal_abstraction(rows=[(TypedValue.string("only-one"),)])
    # and the same guard holds when the file itself is doctored
    doc = json.loads(write_ela(minimal_abstraction()).decode())
    doc["rows"] = [[["string", "lonely"]]]
    with pytest.raises(MalformedAbstraction):
        parse_ela(json.dumps(doc).encode())


def test_missing_header_fields_rejected():
    doc = json.loads(write_ela(minimal_abstraction()).decode())
    del doc["header"]["abstraction_kind"]
    with pytest.raises(MalformedAbstraction):
        parse_ela(json.dumps(doc).encode())
    with pytest.raises(MalformedAbstraction):
        parse_ela(b"{}")
    with pytest.raises(MalformedAbstraction):
        parse_ela(b"not json at all")
