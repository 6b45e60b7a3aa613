import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnorm.serialize import dumps, jsonable, matrix_from_json, matrix_to_json, vector_from_json, vector_to_json
from opnorm.spaces import lp_space, polytope_space

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=100)
@given(st.integers(0, 4), st.integers(0, 4), st.data())
def test_matrix_round_trip_is_bit_exact(r, c, data):
    vals = data.draw(st.lists(st.tuples(finite, finite), min_size=r * c, max_size=r * c))
    M = np.array([complex(a, b) for a, b in vals], dtype=np.complex128).reshape(r, c)
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(M))))
    assert back.shape == M.shape
    assert back.tobytes() == M.tobytes()


def test_vector_round_trip_extremes():
    v = np.array([5e-324, -0.0, 1.7976931348623157e308, 0.1 + 0.2j, np.pi * 1j])
    back = vector_from_json(json.loads(json.dumps(vector_to_json(v))))
    assert back.tobytes() == v.tobytes()


def test_matrix_errors_carry_location():
    with pytest.raises(ValueError, match=r"T.entries\[1\]"):
        matrix_from_json({"rows": 1, "cols": 2, "entries": [[1, 0], [1, "x"]]}, "T")
    with pytest.raises(ValueError, match="expected 4 entries"):
        matrix_from_json({"rows": 2, "cols": 2, "entries": []})
    with pytest.raises(ValueError, match="missing key"):
        matrix_from_json({"rows": 2})
    with pytest.raises(ValueError):
        matrix_to_json(np.array([np.nan]).reshape(1, 1))


def test_jsonable_converts_numpy_and_nonfinite():
    out = jsonable({"a": np.float64(1.5), "b": np.arange(2), "c": np.bool_(True), "d": np.inf, "e": np.nan})
    assert out == {"a": 1.5, "b": [0, 1], "c": True, "d": "inf", "e": None}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_space_norms():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 3)) + 1j * rng.standard_normal((20, 3))
    for p in (1.0, 2.0, 3.0, np.inf):
        S = lp_space(3, p)
        np.testing.assert_allclose(S.norms(X), np.linalg.norm(X, ord=p, axis=1))
    cube = polytope_space(np.vstack([np.eye(2), -np.eye(2)]), field="real")
    assert cube.norm(np.array([3.0, -1.0])) == pytest.approx(3.0)


def test_dual_norms():
    phi = np.array([1.0, -2.0, 0.5])
    assert lp_space(3, 1.0, "real").dual_norm(phi) == pytest.approx(2.0)
    assert lp_space(3, np.inf, "real").dual_norm(phi) == pytest.approx(3.5)
    assert lp_space(3, 2.0, "real").dual_norm(phi) == pytest.approx(np.linalg.norm(phi))
    diamond = polytope_space(np.array([[1.0, 1], [1, -1], [-1, 1], [-1, -1]]), field="real")
    # dual of the cube-shaped dual ball: ||(1,0)||_* = 1
    assert diamond.dual_norm(np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_random_vectors_cover_scales():
    S = lp_space(4, 2.0)
    n = S.norms(S.random_vectors(np.random.default_rng(1), 2000))
    assert n.min() < 0.05 and n.max() > 20
