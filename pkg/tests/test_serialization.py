import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from asympolar.errors import ParseError
from asympolar.jordan import JordanSpec
from asympolar.serialization import (
    input_from_json,
    load_input,
    matrix_from_json,
    matrix_to_json,
    spec_from_json,
    spec_to_json,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(hnp.arrays(np.complex128, hnp.array_shapes(min_dims=2, max_dims=2, max_side=5),
                  elements=st.builds(complex, finite, finite)))
def test_matrix_round_trip_exact(a):
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(a))))
    np.testing.assert_array_equal(back, a)


def test_real_when_imaginary_zero():
    a = matrix_from_json({"rows": 1, "cols": 2, "data": [[1, 0], [2.5, 0]]})
    assert a.dtype == float
    np.testing.assert_array_equal(a, [[1, 2.5]])
    assert matrix_from_json({"rows": 1, "cols": 1, "data": [[0, 1]]}).dtype == complex


def test_bare_numbers_accepted():
    np.testing.assert_array_equal(matrix_from_json({"rows": 1, "cols": 2, "data": [1, 2]}), [[1, 2]])


@pytest.mark.parametrize("obj", [
    [],
    {"rows": 2, "cols": 2},
    {"rows": 2, "cols": 2, "data": [[1, 0]] * 3},
    {"rows": 0, "cols": 2, "data": []},
    {"rows": 1, "cols": 1, "data": [[1, 0, 0]]},
    {"rows": 1, "cols": 1, "data": [["1", 0]]},
    {"rows": 1, "cols": 1, "data": [[True, 0]]},
    {"rows": 1.5, "cols": 1, "data": [[1, 0]]},
])
def test_bad_matrices(obj):
    with pytest.raises(ParseError):
        matrix_from_json(obj)


def test_non_finite_rejected():
    with pytest.raises(ParseError):
        matrix_from_json(json.loads('{"rows":1,"cols":1,"data":[[NaN,0]]}'))


def test_spec_round_trip():
    spec = JordanSpec(np.array([[1.0, 2.0, 0], [0, 1j, 0], [0, 0, 3]]), ((2 + 1j, 2), (0.5, 1)))
    back = input_from_json(json.loads(json.dumps(spec_to_json(spec)))).spec
    np.testing.assert_array_equal(back.M, spec.M)
    assert back.blocks == spec.blocks


@pytest.mark.parametrize("obj", [
    {"M": {"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}},
    {"M": {"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}, "blocks": []},
    {"M": {"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}, "blocks": [[1, 0, 1]]},
    {"M": {"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}, "blocks": [[1, 0, 0], [1, 0, 2]]},
    {"M": {"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}, "blocks": [[1, 0]]},
])
def test_bad_specs(obj):
    with pytest.raises(ParseError):
        spec_from_json(obj)


def test_group_wrapper():
    m = {"rows": 1, "cols": 1, "data": [[1, 0]]}
    assert input_from_json({"group": "sl", "matrix": m}).group == "sl"
    assert input_from_json({"group": "sl", **m}).group == "sl"
    with pytest.raises(ParseError):
        input_from_json({"group": "gl", **m})
    with pytest.raises(ParseError):
        input_from_json([1])


def test_load_input_errors(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        load_input(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError, match="invalid JSON"):
        load_input(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text('{"rows": 1}')
    with pytest.raises(ParseError, match="wrong.json"):
        load_input(wrong)
