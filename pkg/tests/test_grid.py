import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gorlicz.grid import (
    Accumulator,
    Cube,
    GridError,
    GridFunction,
    cube_average,
    cube_family,
    integrate,
    load_function,
    make_grid,
    save_function,
)


def test_grid_geometry():
    g = make_grid([(-1.0, 1.0)], 4)
    assert g.n == 1 and g.size == 4
    assert g.cell_volume == 0.5
    assert g.axis_centers(0).tolist() == [-0.75, -0.25, 0.25, 0.75]


def test_grid_2d_points_in_c_order():
    g = make_grid([(0.0, 2.0), (0.0, 4.0)], (2, 2))
    assert g.points().tolist() == [[0.5, 1.0], [0.5, 3.0], [1.5, 1.0], [1.5, 3.0]]
    assert g.cell_volume == 2.0


@pytest.mark.parametrize("box,res", [([(1.0, 1.0)], 4), ([(0.0, 1.0)], 1), ([(0.0, 1.0)] * 3, 4),
                                     ([(0.0, np.inf)], 4)])
def test_bad_grids_rejected(box, res):
    with pytest.raises(GridError):
        make_grid(box, res)


def test_cell_of():
    g = make_grid([(0.0, 1.0)], 10)
    assert g.cell_of(0.55) == (5,)
    with pytest.raises(GridError):
        g.cell_of(1.5)


def test_non_finite_values_need_extended_flag():
    g = make_grid([(0.0, 1.0)], 2)
    with pytest.raises(GridError):
        GridFunction(g, [1.0, np.inf])
    assert GridFunction(g, [1.0, np.inf], extended=True).values[1] == np.inf


def test_values_are_read_only():
    f = make_grid([(0.0, 1.0)], 4).sample(lambda x: x[:, 0])
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_integrate_linear_exact_under_midpoint_rule():
    f = make_grid([(0.0, 2.0)], 8).sample(lambda x: 3.0 * x[:, 0] + 1.0)
    assert integrate(f) == pytest.approx(8.0, rel=1e-15)


def test_integrate_over_cube():
    g = make_grid([(0.0, 1.0), (0.0, 1.0)], 4)
    f = g.sample(lambda x: np.ones(len(x)))
    assert integrate(f, Cube((0, 0), 2)) == 0.25


def test_integrate_gaussian_converges():
    g = make_grid([(-8.0, 8.0)], 1024)
    f = g.sample(lambda x: np.exp(-x[:, 0] ** 2))
    assert integrate(f) == pytest.approx(np.sqrt(np.pi), rel=1e-10)


def test_dyadic_family_count():
    fam = cube_family(make_grid([(0.0, 1.0)], 8), "dyadic")
    assert len(fam) == 15 and len(list(fam.cubes())) == 15
    assert fam.sides == (1, 2, 4, 8)


def test_dyadic_family_2d_count():
    fam = cube_family(make_grid([(0.0, 1.0)] * 2, 4), "dyadic")
    assert len(fam) == 1 + 4 + 16


def test_dyadic_requires_power_of_two():
    with pytest.raises(GridError):
        cube_family(make_grid([(0.0, 1.0)], 6), "dyadic")


def test_dyadic_cubes_nested():
    cubes = list(cube_family(make_grid([(0.0, 1.0)], 16), "dyadic").cubes())
    for P, Q in itertools.combinations(cubes, 2):
        a0, a1 = P.anchor[0], P.anchor[0] + P.side
        b0, b1 = Q.anchor[0], Q.anchor[0] + Q.side
        overlap = min(a1, b1) > max(a0, b0)
        assert not overlap or (a0 <= b0 and b1 <= a1) or (b0 <= a0 and a1 <= b1)


def test_sliding_family_count():
    fam = cube_family(make_grid([(0.0, 1.0)], 10), "sliding", radii=(1, 2))
    assert len(fam) == 8 + 6
    assert fam.centered_radii == (1, 2)


def test_all_family_count():
    fam = cube_family(make_grid([(0.0, 1.0)], 5), "all")
    assert len(fam) == 5 + 4 + 3 + 2 + 1


def test_standard_family_contains_dyadic_and_sliding():
    fam = cube_family(make_grid([(0.0, 1.0)], 16), "standard")
    # sliding sides 1, 3, 5, 9; dyadic sides 2, 4, 8, 16 (side 1 is already sliding)
    assert {(l.side, l.stride) for l in fam.layers} == {(1, 1), (3, 1), (5, 1), (9, 1), (2, 2), (4, 4), (8, 8), (16, 16)}
    assert 16 in fam.sides and 1 in fam.sides


def test_unknown_family_kind():
    with pytest.raises(GridError):
        cube_family(make_grid([(0.0, 1.0)], 4), "hexagonal")


def test_restricted_stays_inside():
    fam = cube_family(make_grid([(0.0, 1.0)], 16), "standard")
    Q = Cube((4,), 8)
    for P in fam.restricted(Q):
        assert Q.anchor[0] <= P.anchor[0] and P.anchor[0] + P.side <= Q.anchor[0] + Q.side


def _naive_sum(v, Q, absolute):
    w = v[Q.slices()]
    return float(np.sum(np.abs(w) if absolute else w))


@settings(max_examples=50, deadline=None)
@given(v=arrays(np.float64, (12,), elements=st.floats(-100, 100)), a=st.integers(0, 11), s=st.integers(1, 12),
       absolute=st.booleans())
def test_accumulator_matches_direct_sum_1d(v, a, s, absolute):
    s = min(s, 12 - a)
    f = GridFunction(make_grid([(0.0, 1.0)], 12), v)
    Q = Cube((a,), s)
    assert Accumulator(f).cube_sum(Q, absolute) == pytest.approx(_naive_sum(v, Q, absolute), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(v=arrays(np.float64, (6, 6), elements=st.floats(-100, 100)), a=st.integers(0, 5), b=st.integers(0, 5),
       s=st.integers(1, 6))
def test_accumulator_matches_direct_sum_2d(v, a, b, s):
    s = min(s, 6 - a, 6 - b)
    f = GridFunction(make_grid([(0.0, 1.0)] * 2, 6), v)
    Q = Cube((a, b), s)
    acc = Accumulator(f)
    assert acc.cube_sum(Q) == pytest.approx(_naive_sum(v, Q, False), abs=1e-9)
    assert acc.cube_sum(Q, True) == pytest.approx(_naive_sum(v, Q, True), abs=1e-9)


def test_accumulator_sparse_support():
    g = make_grid([(0.0, 1.0)], 64)
    v = np.zeros(64)
    v[30:34] = 2.0
    acc = Accumulator(GridFunction(g, v))
    assert acc.cube_sum(Cube((0,), 16)) == 0.0
    assert acc.cube_sum(Cube((28,), 8)) == 8.0
    assert cube_average(acc, Cube((30,), 4)) == 2.0


def test_cube_average_outside_rejected():
    acc = Accumulator(make_grid([(0.0, 1.0)], 4).sample(lambda x: x[:, 0]))
    with pytest.raises(GridError):
        cube_average(acc, Cube((3,), 2))


@pytest.mark.parametrize("suffix", [".bin", ".csv"])
def test_function_file_round_trip(tmp_path, suffix):
    g = make_grid([(-1.0, 1.0), (0.0, 3.0)], (4, 6))
    f = g.sample(lambda x: np.sin(7 * x[:, 0]) * np.exp(x[:, 1]) / 3.0)
    path = tmp_path / ("f" + suffix)
    save_function(f, path)
    back = load_function(path)
    assert back.grid == g and np.array_equal(back.values, f.values)


def test_extended_flag_survives_round_trip(tmp_path):
    f = GridFunction(make_grid([(0.0, 1.0)], 2), [1.0, np.inf], extended=True)
    save_function(f, tmp_path / "f.bin")
    back = load_function(tmp_path / "f.bin")
    assert back.extended and back.values[1] == np.inf


def test_csv_without_header_rejected(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("index,value\n0,1.0\n")
    with pytest.raises(GridError):
        load_function(p)
