from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

import pytest

from strata2rec import PLANE, ModelError, TargetModel


def test_plane_pairing_is_antidiagonal_and_self_inverse():
    inv = PLANE.pairing_inverse()
    for i in range(3):
        for j in range(3):
            assert inv[i][j] == (1 if i + j == 2 else 0)


@pytest.mark.parametrize("g,n,d", [(0, 2, 1), (1, 3, 1), (2, 7, 2), (2, 0, 0), (0, 3, 0)])
def test_plane_virtual_dimension(g, n, d):
    assert PLANE.virtual_dimension(g, n, d) == 3 * d + n + g - 1


def test_shipped_model_file_is_the_plane():
    text = resources.files("strata2rec.data").joinpath("plane.json").read_text()
    assert TargetModel.loads(text) == PLANE


def test_json_round_trip(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(PLANE.to_dict()))
    assert TargetModel.from_json(path) == PLANE


def test_line_is_a_valid_model():
    line = TargetModel("P1", ("T0", "T1"), (0, 1), ((0, 1), (1, 0)), 2, 1)
    assert line.pairing_inverse() == ((0, 1), (1, 0))
    assert line.virtual_dimension(0, 0, 1) == 2 * 1 - 2


@pytest.mark.parametrize(
    "doc,message",
    [
        ({"labels": ["a"], "codegrees": [0, 1], "pairing": [[1]], "first_chern_degree": 1, "dimension": 1}, "sizes"),
        ({"labels": ["a", "b"], "codegrees": [0, 1], "pairing": [[0, 1], [2, 0]], "first_chern_degree": 1, "dimension": 1}, "symmetric"),
        ({"labels": ["a", "b"], "codegrees": [0, 1], "pairing": [[1, 1], [1, 1]], "first_chern_degree": 1, "dimension": 1}, "singular"),
        ({"labels": ["a"], "codegrees": [0]}, "missing"),
    ],
)
def test_invalid_models_are_rejected(doc, message):
    with pytest.raises(ModelError, match=message):
        TargetModel.from_dict(doc)


def test_rational_pairing_entries():
    m = TargetModel.loads(json.dumps(
        {"labels": ["a", "b"], "codegrees": [0, 1], "pairing": [["0", "1/2"], ["1/2", "0"]], "first_chern_degree": 1, "dimension": 1}
    ))
    assert m.pairing_inverse() == ((0, 2), (2, 0))
    assert isinstance(m.pairing[0][1], Fraction)


def test_bad_json_text():
    with pytest.raises(ModelError):
        TargetModel.loads("{not json")
