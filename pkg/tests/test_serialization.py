import json

import numpy as np
import pytest

from dwis import GridSpec, build_field, eval_field_grid
from dwis.field import field_from_json, field_to_json, grid_to_csv


def test_grid_csv_row_major_y_outer():
    grid = GridSpec(0, 1, 10, 11, nx=2, ny=2)
    values = np.array([[1.0, 2.0], [3.0, 4.0]])
    lines = grid_to_csv(grid, values).strip().splitlines()
    assert lines[0] == "x,y,value"
    assert lines[1] == "0.0,10.0,1.0"
    assert lines[2] == "1.0,10.0,2.0"  # x varies fastest
    assert lines[3] == "0.0,11.0,3.0"
    assert lines[4] == "1.0,11.0,4.0"


def test_grid_csv_shape_check():
    grid = GridSpec(0, 1, 0, 1, nx=3, ny=2)
    with pytest.raises(ValueError):
        grid_to_csv(grid, np.zeros((3, 3)))


def test_field_json_round_trip():
    f = build_field(3, 2, 3.0, 10.0, seed=9)
    text = field_to_json(f)
    parsed = json.loads(text)
    assert len(parsed) == 5
    assert set(parsed[0]) == {"amplitude", "cx", "cy", "sigma"}
    back = field_from_json(text)
    assert back.components == f.components
    grid = GridSpec(0, 100, 0, 100, nx=8, ny=8)
    np.testing.assert_array_equal(eval_field_grid(back, grid), eval_field_grid(f, grid))
