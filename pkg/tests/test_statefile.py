import json
import math

import numpy as np
import pytest
from hypothesis import given

from steerport.qmat import ket_to_density
from steerport.statefile import (
    StateFileError,
    density_to_dict,
    dump_state,
    load_state,
    parse_state,
    state_to_dict,
)
from steerport.states import PSI_MINUS, mems_rank3_params, saturating_family

from .conftest import densities, three_qubit, x_states


@given(densities())
def test_density_round_trip(rho):
    parsed = parse_state(json.loads(json.dumps(density_to_dict(rho))))
    assert np.array_equal(parsed.rho, rho)


@given(x_states())
def test_x_round_trip(x):
    parsed = parse_state(json.loads(json.dumps(state_to_dict(x))))
    assert parsed.x == x


@given(three_qubit())
def test_three_qubit_round_trip(t):
    parsed = parse_state(json.loads(json.dumps(state_to_dict(t))))
    assert parsed.three == t
    assert parsed.rho is None


def test_mems_parses_as_x_state(tmp_path):
    path = tmp_path / "m.json"
    dump_state(mems_rank3_params(0.6), path)
    parsed = load_state(path)
    assert parsed.kind == "mems"
    assert parsed.x is not None


def test_density_file_gets_x_params_when_x_shaped():
    parsed = parse_state(density_to_dict(ket_to_density(PSI_MINUS)))
    assert parsed.x is not None
    assert parsed.x.b == pytest.approx(0.5)


@pytest.mark.parametrize(
    "doc, message",
    [
        ([], "JSON object"),
        ({"type": "qutrit"}, "type"),
        ({"type": "density_matrix", "qubits": 3, "matrix": []}, "qubits"),
        ({"type": "density_matrix", "qubits": 2, "matrix": [[1]]}, "4 rows"),
        ({"type": "mems", "lambdas": [0.5, 0.5]}, "list of 4"),
        ({"type": "mems", "lambdas": [0.5, 0.5, 0.5, 0.0]}, "sum"),
        ({"type": "x_state", "a": 0.25, "b": 0.25, "c": 0.25, "d": 0.25, "w": {"re": 0.5, "im": 0}, "z": {"re": 0, "im": 0}}, "a\\*d"),
        ({"type": "x_state", "a": 0.25, "b": 0.25, "c": 0.25, "d": 0.25, "w": 0.1, "z": {"re": 0, "im": 0}}, "'re'"),
        ({"type": "x_state", "b": 0.25, "c": 0.25, "d": 0.25}, "missing field 'a'"),
        ({"type": "three_qubit_pure", "alphas": [1, 0, 0, 0, 0], "theta": 5}, "theta"),
        ({"type": "three_qubit_pure", "alphas": [1, 0, 0, 0, "x"], "theta": 0}, "numbers"),
    ],
)
def test_parse_errors_name_invariant(doc, message):
    with pytest.raises(StateFileError, match=message):
        parse_state(doc)


def test_density_trace_violation():
    doc = density_to_dict(2 * ket_to_density(PSI_MINUS))
    with pytest.raises(StateFileError, match="trace"):
        parse_state(doc)


def test_load_errors(tmp_path):
    with pytest.raises(StateFileError, match="cannot read"):
        load_state(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(StateFileError, match="invalid JSON"):
        load_state(bad)


def test_saturating_family_dict():
    d = state_to_dict(saturating_family(0.5))
    assert d["type"] == "three_qubit_pure"
    assert d["alphas"][0] == pytest.approx(math.sqrt(0.5))
